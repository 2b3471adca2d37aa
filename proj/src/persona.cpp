#include "socialsim/persona.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "socialsim/prompts.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;

std::string PersonaSeed::text() const { return text::join(lines, "\n"); }

std::vector<PersonaSeed> read_persona_seeds(const std::filesystem::path& path) {
  const std::string data = text::read_file(path);
  std::vector<PersonaSeed> seeds;
  PersonaSeed current;
  std::size_t pos = 0;
  while (pos <= data.size()) {
    auto end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    auto line = text::trim(std::string_view(data).substr(pos, end - pos));
    if (line.empty()) {
      if (!current.lines.empty()) seeds.push_back(std::move(current));
      current = {};
    } else {
      current.lines.emplace_back(line);
    }
    pos = end + 1;
  }
  if (!current.lines.empty()) seeds.push_back(std::move(current));
  return seeds;
}

// ---------------------------------------------------------------------------

namespace {

std::string required_string(const json& j, std::string_view key) {
  auto it = j.find(std::string(key));
  if (it == j.end()) throw ParseError(std::string(key), fmt::format("persona is missing \"{}\"", key));
  if (!it->is_string()) throw ParseError(std::string(key), fmt::format("persona field \"{}\" is not a string", key));
  auto value = std::string(text::trim(it->get<std::string>()));
  if (value.empty()) throw ParseError(std::string(key), fmt::format("persona field \"{}\" is empty", key));
  return value;
}

int required_age(const json& j) {
  const std::string key(persona_key::age);
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(key, "persona is missing \"age\"");
  long long age = 0;
  if (it->is_number_integer()) {
    age = it->get<long long>();
  } else if (it->is_number_float()) {
    double d = it->get<double>();
    if (d != static_cast<double>(static_cast<long long>(d))) throw ParseError(key, "age is not an integer");
    age = static_cast<long long>(d);
  } else if (it->is_string()) {
    auto s = text::trim(it->get<std::string>());
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), age);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(key, "age is not an integer");
  } else {
    throw ParseError(key, "age is not an integer");
  }
  if (age <= 0 || age > 1000) throw ParseError(key, "age must be a positive integer");
  return static_cast<int>(age);
}

}  // namespace

json PersonaProfile::to_json() const {
  return json{
      {std::string(persona_key::name), name},
      {std::string(persona_key::age), age},
      {std::string(persona_key::gender), gender},
      {std::string(persona_key::nationality), nationality},
      {std::string(persona_key::personality), personality},
      {std::string(persona_key::hobbies), hobbies},
      {std::string(persona_key::history), history},
      {std::string(persona_key::preferences), preferences},
      {std::string(persona_key::knowledge), knowledge},
  };
}

PersonaProfile PersonaProfile::from_json(const json& j) {
  if (!j.is_object()) throw ParseError("persona", "persona document is not a JSON object");
  PersonaProfile p;
  p.name = required_string(j, persona_key::name);
  p.age = required_age(j);
  p.gender = required_string(j, persona_key::gender);
  p.nationality = required_string(j, persona_key::nationality);
  p.personality = required_string(j, persona_key::personality);
  p.hobbies = required_string(j, persona_key::hobbies);
  p.history = required_string(j, persona_key::history);
  p.preferences = required_string(j, persona_key::preferences);
  p.knowledge = required_string(j, persona_key::knowledge);
  return p;
}

PersonaProfile parse_profile(std::string_view completion) {
  std::string body = text::strip_code_fence(completion);
  auto open = body.find('{');
  auto close = body.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ParseError("persona", "completion holds no JSON object");
  json j = json::parse(body.substr(open, close - open + 1), nullptr, false);
  if (j.is_discarded()) throw ParseError("persona", "completion is not valid JSON");
  return PersonaProfile::from_json(j);
}

PersonaProfile enrich_persona(const PersonaSeed& seed, ChatBackend& backend, std::string_view key_prefix) {
  if (seed.lines.empty()) throw ValidationError("persona seed has no lines");
  const std::string prompt = prompts::enrich(seed.text());
  std::string last_raw;
  std::string last_error;
  for (int attempt = 0; attempt < kEnrichAttempts; ++attempt) {
    auto request = ChatRequest::make(PromptTag::enrich, prompt, fmt::format("{}:enrich:{}", key_prefix, attempt));
    last_raw = backend.complete(request);
    try {
      return parse_profile(last_raw);
    } catch (const ParseError& e) {
      last_error = e.what();
    }
  }
  throw EnrichmentError(fmt::format("enrichment failed after {} attempts: {}", kEnrichAttempts, last_error),
                        last_raw);
}

// ---------------------------------------------------------------------------

std::vector<std::string> segment_sentences(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c != '.' && c != '!' && c != '?') continue;
    bool boundary = i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1]));
    if (!boundary) continue;
    auto item = text::trim(s.substr(start, i + 1 - start));
    if (!item.empty()) out.emplace_back(item);
    start = i + 1;
  }
  auto tail = text::trim(s.substr(std::min(start, s.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

PersonaIndex segment_attributes(const PersonaProfile& profile) {
  return {segment_sentences(profile.history), segment_sentences(profile.preferences),
          segment_sentences(profile.knowledge)};
}

namespace {

std::optional<std::string> best_sentence(const std::vector<std::string>& items, std::string_view query) {
  if (items.empty()) return std::nullopt;
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    double s = pairwise_similarity(query, items[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return items[best];
}

RetrievedPersonaView basics(const PersonaProfile& p) {
  RetrievedPersonaView v;
  v.name = p.name;
  v.age = p.age;
  v.gender = p.gender;
  v.nationality = p.nationality;
  v.personality = p.personality;
  v.hobbies = p.hobbies;
  return v;
}

std::string one_line(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c == '\n' || c == '\r') c = ' ';
  return out;
}

}  // namespace

RetrievedPersonaView retrieve_persona(const PersonaIndex& index, const PersonaProfile& profile,
                                      std::string_view query) {
  auto v = basics(profile);
  v.history_hit = best_sentence(index.history, query);
  v.preferences_hit = best_sentence(index.preferences, query);
  v.knowledge_hit = best_sentence(index.knowledge, query);
  return v;
}

RetrievedPersonaView full_view(const PersonaProfile& profile) {
  auto v = basics(profile);
  v.history_hit = profile.history;
  v.preferences_hit = profile.preferences;
  v.knowledge_hit = profile.knowledge;
  return v;
}

std::string RetrievedPersonaView::render() const {
  std::string out = fmt::format("Name: {}, age: {}, gender: {}, nationality: {},\nPersonality: {},\nHobbies: {},",
                                one_line(name), age, one_line(gender), one_line(nationality),
                                one_line(personality), one_line(hobbies));
  if (history_hit) out += "\nDetailed historical behaviour information: " + one_line(*history_hit);
  if (preferences_hit) out += "\nPreferences for social media content: " + one_line(*preferences_hit);
  if (knowledge_hit) out += "\nKnowledge: " + one_line(*knowledge_hit);
  return out;
}

json RetrievedPersonaView::to_json() const {
  json j = {
      {std::string(persona_key::name), name},
      {std::string(persona_key::age), age},
      {std::string(persona_key::gender), gender},
      {std::string(persona_key::nationality), nationality},
      {std::string(persona_key::personality), personality},
      {std::string(persona_key::hobbies), hobbies},
  };
  if (history_hit) j[std::string(persona_key::history)] = *history_hit;
  if (preferences_hit) j[std::string(persona_key::preferences)] = *preferences_hit;
  if (knowledge_hit) j[std::string(persona_key::knowledge)] = *knowledge_hit;
  return j;
}

// ---------------------------------------------------------------------------

double knowledge_similarity(const KnowledgeEntry& candidate, const PersonaProfile& profile) {
  return pairwise_similarity(candidate.indexed_text(), profile.knowledge);
}

bool gate_knowledge(const KnowledgeEntry& candidate, const PersonaProfile& profile, double t_k) {
  return knowledge_similarity(candidate, profile) > t_k;
}

std::vector<KnowledgeEntry> personalized_knowledge(std::string_view topic, const Retriever& retriever,
                                                   const PersonaProfile& profile, std::size_t k, double t_k) {
  std::vector<KnowledgeEntry> admitted;
  for (auto& hit : retriever.query(topic, k))
    if (gate_knowledge(hit.entry, profile, t_k)) admitted.push_back(std::move(hit.entry));
  return admitted;
}

std::string render_knowledge(const std::vector<KnowledgeEntry>& entries) {
  std::vector<std::string> blocks;
  blocks.reserve(entries.size());
  for (const auto& e : entries) blocks.push_back(fmt::format("Title: {}\nText: {}", one_line(e.title), one_line(e.text)));
  return text::join(blocks, "\n");
}

std::string scoring_text(const PersonaProfile& profile) {
  return profile.personality + " " + profile.hobbies + " " + profile.preferences;
}

}  // namespace socialsim
