#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// Prompt templates for every LLM-backed step. Each renderer fills one fixed
// template; the marker constants let offline backends locate the slots again.
namespace socialsim::prompts {

inline constexpr std::string_view kPostContent = "Post content: ";
inline constexpr std::string_view kPersonaInfo = "Persona information: ";
inline constexpr std::string_view kSeedInfo = "Initial persona information provided by the user: ";
inline constexpr std::string_view kTopicPersona = "The persona information is as follows: ";
inline constexpr std::string_view kPostTopic = "The post topic is: ";
inline constexpr std::string_view kPostPersona = "Persona information (JSON format) is as follows: ";
inline constexpr std::string_view kPostKnowledge = "The knowledge that the persona possesses is as follows: ";
inline constexpr std::string_view kActivity = "you have an activity level of: ";
inline constexpr std::string_view kSummaryBody = "The content of the post is as follows: ";
inline constexpr std::string_view kReflectContent = "The content of multiple posts and your operations are as follows: ";

std::string enrich(std::string_view seed_text);

std::string like(std::string_view post, std::string_view persona);
std::string reblog(std::string_view post, std::string_view persona);
std::string comment(std::string_view post, std::string_view persona);

std::string topics(std::size_t count, std::string_view persona);

/// Post prompt with a knowledge section (used when knowledge was admitted).
std::string post_with_knowledge(std::string_view topic, std::string_view persona_json, std::string_view knowledge);
/// Post prompt without knowledge.
std::string post(std::string_view topic, std::string_view persona_json);

std::string plan(double activity, std::string_view persona);

/// One entry of the reflection history, k counted from 1.
std::string reflect_entry(std::size_t k, std::string_view uid, std::string_view summary, std::string_view action);
std::string reflect(std::string_view persona, std::string_view history);

std::string summary(std::string_view post);

/// Trimmed text between the first occurrence of `marker` and the last
/// occurrence of `until` after it (or the end of the prompt when `until` is
/// empty or absent). Empty if `marker` is absent.
std::string_view section(std::string_view prompt, std::string_view marker, std::string_view until = {});

}  // namespace socialsim::prompts
