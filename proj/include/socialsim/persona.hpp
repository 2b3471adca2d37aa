#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "socialsim/error.hpp"
#include "socialsim/llm.hpp"
#include "socialsim/retrieval.hpp"

namespace socialsim {

/// A handful of first-person statements describing a persona.
struct PersonaSeed {
  std::vector<std::string> lines;

  std::string text() const;
};

/// Seed file: persona blocks separated by blank lines, one statement per line.
std::vector<PersonaSeed> read_persona_seeds(const std::filesystem::path& path);

/// JSON keys of the persona document, in the order the enrichment prompt lists them.
namespace persona_key {
inline constexpr std::string_view name = "name";
inline constexpr std::string_view age = "age";
inline constexpr std::string_view gender = "gender";
inline constexpr std::string_view nationality = "nationality";
inline constexpr std::string_view personality = "personality";
inline constexpr std::string_view hobbies = "hobbies";
inline constexpr std::string_view history = "detailed historical behaviour information";
inline constexpr std::string_view preferences = "preferences for social media content";
inline constexpr std::string_view knowledge = "knowledge";
}  // namespace persona_key

struct PersonaProfile {
  std::string name;
  int age = 0;
  std::string gender;
  std::string nationality;
  std::string personality;
  std::string hobbies;
  std::string history;
  std::string preferences;
  std::string knowledge;

  nlohmann::json to_json() const;
  /// Validates all nine fields; `age` may be a number or a numeric string.
  static PersonaProfile from_json(const nlohmann::json& j);

  bool operator==(const PersonaProfile&) const = default;
};

/// Parses a completion into a profile: strips code fences, then extracts the
/// outermost JSON object.
PersonaProfile parse_profile(std::string_view completion);

class EnrichmentError : public Error {
 public:
  EnrichmentError(const std::string& what, std::string last_raw)
      : Error("enrichment", what), last_raw_(std::move(last_raw)) {}
  const std::string& last_raw() const noexcept { return last_raw_; }

 private:
  std::string last_raw_;
};

inline constexpr int kEnrichAttempts = 3;

/// `key_prefix` namespaces the seed keys ("<prefix>:enrich:<attempt>").
PersonaProfile enrich_persona(const PersonaSeed& seed, ChatBackend& backend, std::string_view key_prefix);

/// Sentences split at '.', '!' or '?' followed by whitespace or end of text.
std::vector<std::string> segment_sentences(std::string_view text);

struct PersonaIndex {
  std::vector<std::string> history;
  std::vector<std::string> preferences;
  std::vector<std::string> knowledge;
};

PersonaIndex segment_attributes(const PersonaProfile& profile);

/// Basic fields verbatim plus the single most relevant sentence of each
/// advanced attribute.
struct RetrievedPersonaView {
  std::string name;
  int age = 0;
  std::string gender;
  std::string nationality;
  std::string personality;
  std::string hobbies;
  std::optional<std::string> history_hit;
  std::optional<std::string> preferences_hit;
  std::optional<std::string> knowledge_hit;

  /// Multi-line "Name: ..., age: ..." layout used in decision prompts.
  std::string render() const;
  /// Same content keyed like the persona document, for post prompts.
  nlohmann::json to_json() const;
};

/// Picks the highest-similarity sentence per attribute. Ties keep the
/// earliest sentence; an all-zero attribute contributes its first sentence.
RetrievedPersonaView retrieve_persona(const PersonaIndex& index, const PersonaProfile& profile,
                                      std::string_view query);

/// The whole profile in the view layout (every attribute complete).
RetrievedPersonaView full_view(const PersonaProfile& profile);

inline constexpr double kDefaultKnowledgeThreshold = 0.25;
inline constexpr std::size_t kDefaultRetrievalDepth = 3;

/// Similarity of "title text" to the persona's knowledge description.
double knowledge_similarity(const KnowledgeEntry& candidate, const PersonaProfile& profile);
bool gate_knowledge(const KnowledgeEntry& candidate, const PersonaProfile& profile,
                    double t_k = kDefaultKnowledgeThreshold);

std::vector<KnowledgeEntry> personalized_knowledge(std::string_view topic, const Retriever& retriever,
                                                   const PersonaProfile& profile,
                                                   std::size_t k = kDefaultRetrievalDepth,
                                                   double t_k = kDefaultKnowledgeThreshold);

/// "Title: ...\nText: ..." blocks, one per entry, separated by a newline.
std::string render_knowledge(const std::vector<KnowledgeEntry>& entries);

/// Profile plus its precomputed sentence index.
struct Persona {
  PersonaProfile profile;
  PersonaIndex index;

  explicit Persona(PersonaProfile p) : profile(std::move(p)), index(segment_attributes(profile)) {}
  RetrievedPersonaView view_for(std::string_view query) const { return retrieve_persona(index, profile, query); }
};

/// Text used when scoring posts against a persona: personality, hobbies and
/// content preferences joined by spaces.
std::string scoring_text(const PersonaProfile& profile);

}  // namespace socialsim
