#include "socialsim/prompts.hpp"

#include <fmt/format.h>

#include "socialsim/text.hpp"

namespace socialsim::prompts {

std::string enrich(std::string_view seed_text) {
  return fmt::format(
      "Please enrich the initial persona information provided by the user, including name, age, gender, "
      "nationality, personality, and hobbies. Note that this information needs to be logically consistent with "
      "the initial persona information provided by the user, and age and nationality should not always be used "
      "the same. Meanwhile, detailed historical behavior information, preferences for social media content, and "
      "knowledge should be generated. It should be as detailed as possible to help users build a virtual social "
      "media user persona with more depth and personality.\n\n"
      "{}{}\n\n"
      "The output format is JSON format, where the keys are \"name\", \"age\", \"gender\", and \"nationality\", "
      "\"personality\", \"hobbies\", \"detailed historical behaviour information\", \"preferences for social media "
      "content\", \"knowledge\".\n"
      "The following is an output example, please strictly follow the JSON format in the example for output.\n\n"
      "{{\n"
      "\"name\": \"John\",\n"
      "\"age\": 35,\n"
      "\"gender\": \"Male\",\n"
      "\"nationality\": \"American\",\n"
      "\"personality\": \"Adventurous, Outgoing\",\n"
      "\"hobbies\": \"Working on vintage cars, Listening to country music, Taking care of dogs\",\n"
      "\"detailed historical behaviour information\": \"John has always been passionate about cars, especially "
      "vintage cars. He has been collecting and restoring them for the past 10 years. His love for vintage cars led "
      "him to become knowledgeable about their mechanics and history. He has also participated in local car shows "
      "and won a few awards for his beautifully restored Mustangs. John's dogs are his loyal companions, and he "
      "spends quality time training and playing with them. He believes in responsible pet ownership and often "
      "volunteers at local animal shelters.\",\n"
      "\"preferences for social media content\": \"John enjoys sharing his car restoration projects on social media "
      "platforms, where he documents the progress and showcases the before and after pictures of his vintage "
      "Mustangs. He also loves sharing his favorite country music playlists and recommendations. Additionally, he "
      "posts adorable pictures of his dogs, sometimes showcasing their tricks and training achievements.\",\n"
      "\"knowledge\": \"John has extensive knowledge about vintage cars, particularly Ford Mustangs. He is familiar "
      "with various car models, their features, and the history of the Mustang brand. He keeps up with the latest "
      "trends in car restoration techniques and actively follows vintage car communities online. In terms of country "
      "music, John has a wide knowledge of classic and contemporary country artists, their discographies, and the "
      "stories behind their songs. He also has a good understanding of training techniques and dog behavior, thanks "
      "to his experience with his two dogs.\"\n"
      "}}",
      kSeedInfo, seed_text);
}

namespace {

std::string decision(std::string_view instruction, std::string_view post, std::string_view persona) {
  return fmt::format(
      "Assume that you are the person described in [Persona information] and you are browsing social media. {} "
      "The post content and persona information are as follows:\n\n{}{}\n\n{}{}",
      instruction, kPostContent, post, kPersonaInfo, persona);
}

}  // namespace

std::string like(std::string_view post, std::string_view persona) {
  return decision(
      "Please decide whether to like or take no action based on the content of the posts you see. When outputting, "
      "please strictly output one of \"like\" or \"no operation\" and do not output other content.",
      post, persona);
}

std::string reblog(std::string_view post, std::string_view persona) {
  return decision(
      "Please decide whether to forward based on the content of the posts you see. When outputting, please strictly "
      "output one of \"forward\" or \"no operation\" and do not output other content.",
      post, persona);
}

std::string comment(std::string_view post, std::string_view persona) {
  return decision(
      "Please decide whether to comment based on the content of the posts you see. Note that users generally only "
      "comment on content that interests them or when they want to express their opinions. If you choose not to "
      "comment, directly output \"no comment\" and do not output other content. If you choose to comment, output "
      "the comment content directly, do not output other content, and start with \"Comment content:\".",
      post, persona);
}

std::string topics(std::size_t count, std::string_view persona) {
  return fmt::format(
      "Assume that you are the person described in [Persona information]. You usually browse social media and post "
      "regularly. Please generate {} post topics suitable for posting on social media Twitter. The generated post "
      "topics need to be diverse and consistent with the persona information, be within 15 words in length, and do "
      "not include the topic symbol \"#\".\n\n"
      "The output format is:\n1. Theme one\n2. Theme two\n3. Theme three\n\n{}{}",
      count, kTopicPersona, persona);
}

namespace {

constexpr std::string_view kPostPreamble =
    "Assume you are the person described in [Persona information], and you usually browse social media and "
    "regularly post. Please generate a post suitable for posting on Twitter based on the provided topic. Directly "
    "output the generated post content, and do not insert images or videos.";

}  // namespace

std::string post_with_knowledge(std::string_view topic, std::string_view persona_json, std::string_view knowledge) {
  return fmt::format(
      "{} And you have some knowledge that this persona should have, which can be used as a reference, and the "
      "generated post can include some knowledge at the appropriate time. But the generated posts should not be a "
      "duplication of persona information or knowledge, and the post content should be about a single topic and be "
      "specific and rich. The length of the post must be limited to 500 characters. The post topic, persona "
      "information and the knowledge this persona possesses are as follows:\n\n{}{}\n\n{}{}\n\n{}{}",
      kPostPreamble, kPostTopic, topic, kPostPersona, persona_json, kPostKnowledge, knowledge);
}

std::string post(std::string_view topic, std::string_view persona_json) {
  return fmt::format(
      "{} The generated posts should not be a duplication of persona information, and the post content should be "
      "about a single topic and be specific and rich. The length of the post must be limited to 500 characters. The "
      "post topic and persona information are as follows:\n\n{}{}\n\n{}{}",
      kPostPreamble, kPostTopic, topic, kPostPersona, persona_json);
}

std::string plan(double activity, std::string_view persona) {
  return fmt::format(
      "Assume that you are the person described in [Persona information], you usually browse social media and "
      "perform social behaviors such as liking and posting, and {}{:.2f} (full activity level is 1). In order to be "
      "consistent with your persona's behavior, You need to plan and schedule your behavior and generate a "
      "coarse-grained planning table containing the frequency of the behavior and the duration of the behavior, all "
      "using a 24-hour time frame and providing only one time period for browsing and posting. Please strictly follow "
      "the following examples to generate a plan. Here is an example, please follow the format in the example for "
      "the output:\n\n"
      "Browsing time period: xx:xx-xx:xx\n"
      "Probability of liking: x%\n"
      "Probability of forwarding: x%\n"
      "Probability of commenting: x%\n"
      "Posting time period: day x-xx:xx-xx:xx\n"
      "Frequency of posting: x times per week\n\n"
      "Your persona information is as follows:\n\n{}{}",
      kActivity, activity, kPersonaInfo, persona);
}

std::string reflect_entry(std::size_t k, std::string_view uid, std::string_view summary, std::string_view action) {
  return fmt::format(
      "The {}-th post was posted by user {}, and the content of the post is: {}. Your action on this post is: {}.", k,
      uid, summary, action);
}

std::string reflect(std::string_view persona, std::string_view history) {
  return fmt::format(
      "Assume you are the person described in [Persona information], when you browse social media, you like, repost, "
      "and comment on multiple posts based on how much you like them. Please reflect and think based on your "
      "historical behavior and think about which user you want to follow. Please strictly enter the user ID you want "
      "to follow or \"do not follow\", no other content is required. Your persona information and historical "
      "behaviors are as follows:\n\n{}{}\n\n{}{}",
      kPersonaInfo, persona, kReflectContent, history);
}

std::string summary(std::string_view post) {
  return fmt::format(
      "The following is a post from social media, please generate a concise summary of no more than 50 words. {}{}",
      kSummaryBody, post);
}

std::string_view section(std::string_view prompt, std::string_view marker, std::string_view until) {
  auto pos = prompt.find(marker);
  if (pos == std::string_view::npos) return {};
  std::string_view rest = prompt.substr(pos + marker.size());
  if (!until.empty()) {
    auto end = rest.rfind(until);
    if (end != std::string_view::npos) rest = rest.substr(0, end);
  }
  return text::trim(rest);
}

}  // namespace socialsim::prompts
