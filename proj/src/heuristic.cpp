// Offline rule table standing in for a chat model. Every rule reads the
// slots back out of the rendered prompt, so the backend needs no side channel.

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <regex>

#include <fmt/format.h>
#include <json.hpp>

#include "socialsim/llm.hpp"
#include "socialsim/persona.hpp"
#include "socialsim/planning.hpp"
#include "socialsim/prompts.hpp"
#include "socialsim/retrieval.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

namespace {

using prompts::section;

std::string until(std::string_view marker) { return "\n\n" + std::string(marker); }

/// Value of a "Label: value" line in a rendered persona view.
std::string view_line(std::string_view view, std::string_view label) {
  std::size_t pos = 0;
  while (pos < view.size()) {
    auto end = view.find('\n', pos);
    if (end == std::string_view::npos) end = view.size();
    auto line = view.substr(pos, end - pos);
    if (line.starts_with(label)) {
      auto value = text::trim(line.substr(label.size()));
      if (value.ends_with(',')) value.remove_suffix(1);
      return std::string(text::trim(value));
    }
    pos = end + 1;
  }
  return {};
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto end = s.find(',', pos);
    if (end == std::string_view::npos) end = s.size();
    auto item = text::trim(s.substr(pos, end - pos));
    if (!item.empty()) out.push_back(text::to_lower(item));
    pos = end + 1;
  }
  return out;
}

std::string decide(const ChatRequest& r, double threshold, std::string_view yes) {
  auto post = section(r.prompt, prompts::kPostContent, until(prompts::kPersonaInfo));
  auto persona = section(r.prompt, prompts::kPersonaInfo);
  return pairwise_similarity(persona, post) >= threshold ? std::string(yes) : "no operation";
}

std::string comment(const ChatRequest& r, double threshold) {
  auto post = section(r.prompt, prompts::kPostContent, until(prompts::kPersonaInfo));
  auto persona = section(r.prompt, prompts::kPersonaInfo);
  if (pairwise_similarity(persona, post) < threshold) return "no comment";
  auto pref = view_line(persona, "Preferences for social media content: ");
  if (pref.empty()) return "Comment content: It's fascinating to see the dedication behind this post!";
  return fmt::format(
      "Comment content: It's fascinating to see the dedication behind this post! It speaks to what I care about: {}",
      pref);
}

constexpr std::array<std::string_view, 6> kTopicTemplates = {
    "My favorite moments with {}",       "What {} taught me this week", "Tips for anyone getting into {}",
    "Why {} matters so much to me",      "A small win in {} today",     "Questions I still have about {}",
};

std::string topics(const ChatRequest& r) {
  static const std::regex count_re(R"(generate (\d+) post topics)");
  std::smatch m;
  std::size_t count = 1;
  if (std::regex_search(r.prompt, m, count_re)) count = std::stoul(m[1].str());
  auto persona = section(r.prompt, prompts::kTopicPersona);
  auto hobbies = split_list(view_line(persona, "Hobbies: "));
  if (hobbies.empty()) hobbies.push_back("everyday life");

  const std::uint64_t h = text::fnv1a(r.seed_key);
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& hobby = hobbies[(h + i) % hobbies.size()];
    auto tmpl = kTopicTemplates[((h >> 8) + i + i / hobbies.size()) % kTopicTemplates.size()];
    lines.push_back(fmt::format("{}. {}", i + 1, fmt::format(fmt::runtime(tmpl), hobby)));
  }
  return text::join(lines, "\n");
}

constexpr std::array<std::string_view, 5> kOpeners = {
    "Thinking about {} today.", "Sharing some thoughts on {}.", "Quick note on {}.",
    "Let's talk about {}!",     "Something on my mind: {}.",
};

std::string post(const ChatRequest& r) {
  const bool has_knowledge = r.prompt.find(prompts::kPostKnowledge) != std::string::npos;
  auto topic = section(r.prompt, prompts::kPostTopic, until(prompts::kPostPersona));
  auto persona = has_knowledge ? section(r.prompt, prompts::kPostPersona, until(prompts::kPostKnowledge))
                               : section(r.prompt, prompts::kPostPersona);

  std::vector<std::string> parts;
  const std::uint64_t h = text::fnv1a(r.seed_key);
  parts.push_back(fmt::format(fmt::runtime(kOpeners[h % kOpeners.size()]), topic));

  auto j = nlohmann::json::parse(persona, nullptr, false);
  const std::string pref_key(persona_key::preferences);
  if (j.is_object() && j.contains(pref_key) && j[pref_key].is_string()) parts.push_back(j[pref_key].get<std::string>());

  if (has_knowledge) {
    auto knowledge = section(r.prompt, prompts::kPostKnowledge);
    auto pos = knowledge.find("Text: ");
    if (pos != std::string_view::npos) {
      auto line = knowledge.substr(pos + 6);
      line = line.substr(0, line.find('\n'));
      auto sentences = segment_sentences(line);
      if (!sentences.empty()) parts.push_back(sentences.front());
    }
  }
  return text::truncate_at_word(text::join(parts, " "), kMaxPostChars);
}

std::string plan(const ChatRequest& r) {
  static const std::regex activity_re(R"(activity level of: ([0-9.]+))");
  std::smatch m;
  double activity = 0.1;
  if (std::regex_search(r.prompt, m, activity_re)) activity = std::stod(m[1].str());
  auto persona = section(r.prompt, prompts::kPersonaInfo);
  const std::uint64_t h = text::fnv1a(persona);

  PlanSpec p;
  p.browse_start = 7 + static_cast<int>(h % 15);
  p.browse_end = std::min(24, p.browse_start + 1 + static_cast<int>((h >> 8) % 3));
  p.p_like = 0.2 * activity;
  p.p_reblog = 0.1 * activity;
  p.p_comment = 0.1 * activity;
  p.post_day = 1 + static_cast<int>((h >> 16) % 7);
  p.post_start = 8 + static_cast<int>((h >> 24) % 14);
  p.post_end = std::min(24, p.post_start + 1 + static_cast<int>((h >> 32) % 2));
  p.posts_per_week = 1 + (activity >= 0.5 ? 1 : 0) + static_cast<int>((h >> 40) % 2);
  return render_plan(p);
}

std::string summary(const ChatRequest& r) { return text::first_words(section(r.prompt, prompts::kSummaryBody), 50); }

std::string reflect(const ChatRequest& r) {
  static constexpr std::string_view kBy = "was posted by user ";
  static constexpr std::string_view kAction = "Your action on this post is: ";
  auto history = section(r.prompt, prompts::kReflectContent);

  std::map<std::string, int> counts;
  std::vector<std::string> order;
  std::size_t pos = 0;
  while (pos < history.size()) {
    auto end = history.find('\n', pos);
    if (end == std::string_view::npos) end = history.size();
    auto line = history.substr(pos, end - pos);
    pos = end + 1;
    auto by = line.find(kBy);
    auto act = line.rfind(kAction);
    if (by == std::string_view::npos || act == std::string_view::npos) continue;
    auto uid_start = by + kBy.size();
    auto uid = std::string(line.substr(uid_start, line.find(',', uid_start) - uid_start));
    auto action = line.substr(act + kAction.size());
    int positives = 0;
    for (auto token : {"like", "forward", "comment"})
      if (action.find(token) != std::string_view::npos) ++positives;
    if (!counts.contains(uid)) order.push_back(uid);
    counts[uid] += positives;
  }
  std::string best;
  int best_count = 0;
  for (const auto& uid : order)
    if (counts[uid] > best_count) {
      best_count = counts[uid];
      best = uid;
    }
  return best_count >= 2 ? best : "do not follow";
}

// Enrichment builds a plausible persona from the seed statements alone.

constexpr std::array<std::string_view, 12> kNames = {"Alex", "Maya", "Jordan", "Priya", "Lucas", "Sofia",
                                                     "Daniel", "Aiko", "Omar", "Elena", "Noah", "Grace"};
constexpr std::array<std::string_view, 3> kGenders = {"Female", "Male", "Non-binary"};
constexpr std::array<std::string_view, 8> kNationalities = {"Canadian", "American", "British", "Indian",
                                                            "Japanese", "Brazilian", "German", "Kenyan"};
constexpr std::array<std::string_view, 8> kPersonalities = {
    "Curious, Friendly",     "Thoughtful, Reserved",  "Adventurous, Outgoing", "Compassionate, Dedicated",
    "Analytical, Patient",   "Creative, Energetic",   "Easygoing, Humorous",   "Ambitious, Organized"};

/// "i love hiking in the mountains." -> "hiking in the mountains"
std::string interest_of(std::string_view line) {
  std::string s = text::to_lower(text::trim(line));
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) s.pop_back();
  static constexpr std::array<std::string_view, 14> kLeads = {
      "i really love ", "i really like ", "i love to ", "i like to ", "i love ", "i like ", "i enjoy ",
      "i am a ",        "i am ",          "i'm a ",     "i'm ",       "i have ", "my ",     "i "};
  for (auto lead : kLeads)
    if (s.starts_with(lead)) {
      s.erase(0, lead.size());
      break;
    }
  return s;
}

std::string sentence_case(std::string_view s) {
  std::string out(text::trim(s));
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  if (!out.empty() && out.back() != '.' && out.back() != '!' && out.back() != '?') out += '.';
  return out;
}

std::string enrich(const ChatRequest& r) {
  auto seed = section(r.prompt, prompts::kSeedInfo, "\n\nThe output format");
  std::vector<std::string> lines;
  std::vector<std::string> interests;
  std::size_t pos = 0;
  while (pos < seed.size()) {
    auto end = seed.find('\n', pos);
    if (end == std::string_view::npos) end = seed.size();
    auto line = text::trim(seed.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    lines.emplace_back(line);
    auto interest = interest_of(line);
    if (!interest.empty()) interests.push_back(std::move(interest));
  }
  if (interests.empty()) interests.push_back("everyday life");

  const std::uint64_t h = text::fnv1a(seed);
  PersonaProfile p;
  p.name = kNames[h % kNames.size()];
  p.age = 18 + static_cast<int>((h >> 8) % 50);
  p.gender = kGenders[(h >> 16) % kGenders.size()];
  p.nationality = kNationalities[(h >> 24) % kNationalities.size()];
  p.personality = kPersonalities[(h >> 32) % kPersonalities.size()];
  p.hobbies = text::join(interests, ", ");

  std::vector<std::string> history;
  for (const auto& line : lines) history.push_back(fmt::format("In {}'s own words: {}", p.name, sentence_case(line)));
  p.history = text::join(history, " ");

  std::vector<std::string> prefs;
  for (const auto& i : interests) prefs.push_back(fmt::format("{} enjoys social media posts about {}.", p.name, i));
  prefs.push_back(fmt::format("{} likes to share personal stories with friends online.", p.name));
  p.preferences = text::join(prefs, " ");

  std::vector<std::string> know;
  for (const auto& i : interests) know.push_back(fmt::format("{} knows a lot about {}.", p.name, i));
  p.knowledge = text::join(know, " ");
  return p.to_json().dump(2);
}

}  // namespace

std::string heuristic_rules(const ChatRequest& request, const HeuristicThresholds& t) {
  switch (request.tag) {
    case PromptTag::like:
      return decide(request, t.like, "like");
    case PromptTag::reblog:
      return decide(request, t.reblog, "forward");
    case PromptTag::comment:
      return comment(request, t.comment);
    case PromptTag::topics:
      return topics(request);
    case PromptTag::post:
      return post(request);
    case PromptTag::plan:
      return plan(request);
    case PromptTag::summary:
      return summary(request);
    case PromptTag::reflect:
      return reflect(request);
    case PromptTag::enrich:
      return enrich(request);
  }
  return {};
}

}  // namespace socialsim
