#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socialsim/events.hpp"
#include "socialsim/llm.hpp"
#include "socialsim/persona.hpp"
#include "socialsim/planning.hpp"
#include "socialsim/platform.hpp"
#include "socialsim/retrieval.hpp"

namespace socialsim {

/// A parsed model decision plus the reason it was not a clean match, if any.
template <class T>
struct Decision {
  T value{};
  std::optional<std::string> anomaly;
};

Decision<bool> parse_like(std::string_view completion);
Decision<bool> parse_reblog(std::string_view completion);
Decision<std::optional<std::string>> parse_comment(std::string_view completion);

/// Numbered "N. topic" lines; '#' removed, capped at 15 words, at most `count`.
std::vector<std::string> parse_topics(std::string_view completion, std::size_t count);

struct ReflectionDecision {
  std::optional<AccountId> follow;
  std::optional<std::string> anomaly;
};

/// "do not follow" (any case) means no follow; otherwise the first user_N
/// token for which `registered` holds.
ReflectionDecision parse_reflection(std::string_view completion,
                                    const std::function<bool(AccountId)>& registered);

// ---------------------------------------------------------------------------
// Memory

struct ActionRecord {
  Turn turn = 0;
  PostId post;
  std::string post_body;
  AccountId poster;
  bool liked = false;
  bool reblogged = false;
  std::optional<std::string> comment;

  bool operator==(const ActionRecord&) const = default;
};

struct ShortTermMemory {
  std::vector<ActionRecord> records;
  std::vector<std::string> own_posts;
  /// records[reflected_upto..] have not been reflected on yet.
  std::size_t reflected_upto = 0;
};

/// Post summaries of at most 50 words, computed once per post.
class SummaryCache {
 public:
  std::optional<std::string> get(PostId id) const;
  void put(PostId id, std::string summary);
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<PostId, std::string>& entries() const noexcept { return entries_; }

 private:
  std::map<PostId, std::string> entries_;
};

inline constexpr std::size_t kSummaryWords = 50;

/// Events produced by agent operations are appended here.
using EventSink = std::function<void(Event)>;

std::string summarize_post(PostId id, std::string_view body, ChatBackend& backend, SummaryCache& cache);

// ---------------------------------------------------------------------------
// Decisions

/// `seed_key` identifies the call; anomalies are reported through `sink`.
bool decide_like(const RetrievedPersonaView& view, std::string_view post_body, ChatBackend& backend,
                 const std::string& seed_key, const EventSink& sink, Turn turn, std::string_view actor);
bool decide_reblog(const RetrievedPersonaView& view, std::string_view post_body, ChatBackend& backend,
                   const std::string& seed_key, const EventSink& sink, Turn turn, std::string_view actor);
std::optional<std::string> decide_comment(const RetrievedPersonaView& view, std::string_view post_body,
                                          ChatBackend& backend, const std::string& seed_key, const EventSink& sink,
                                          Turn turn, std::string_view actor);

inline constexpr int kGenerationAttempts = 3;

/// Throws BackendError or ValidationError when no topic can be obtained.
std::vector<std::string> generate_topics(const PersonaProfile& profile, std::size_t count, ChatBackend& backend,
                                         std::string_view key_prefix);

/// Picks the knowledge or plain post prompt, regenerates once when the draft
/// is over 500 characters and then truncates at a word boundary.
std::string compose_post(std::string_view topic, const RetrievedPersonaView& view,
                         const std::vector<KnowledgeEntry>& knowledge, ChatBackend& backend,
                         std::string_view key_prefix);

/// Index of the attempt to publish given each attempt's maximum similarity
/// to earlier posts: the first attempt at or under `t_p`, else the lowest
/// (earliest on ties) with `best_of_retries` set.
struct DedupChoice {
  std::size_t index = 0;
  bool best_of_retries = false;
};
DedupChoice choose_attempt(const std::vector<double>& max_similarities, double t_p);

double max_similarity(std::string_view draft, const std::vector<std::string>& priors);

inline constexpr double kDefaultDuplicationThreshold = 0.80;

// ---------------------------------------------------------------------------
// Agent

struct AgentState {
  AccountId id;
  std::string handle;
  Persona persona;
  double activity = 0.0;
  PlanSpec plan;
  ShortTermMemory memory;
  /// Posts published so far; used for seed keys.
  std::size_t posts_made = 0;
};

struct ActionSettings {
  double t_k = kDefaultKnowledgeThreshold;
  double t_p = kDefaultDuplicationThreshold;
  std::size_t retrieval_k = kDefaultRetrievalDepth;
  int session_size = 10;
};

struct AgentEnv {
  Platform& platform;
  ChatBackend& backend;
  const Retriever& retriever;
  SummaryCache& summaries;
  EventSink sink;
  ActionSettings settings;
};

/// Topic -> persona view -> gated knowledge -> compose -> dedup -> publish.
/// `phase` is copied into the post event payload.
PostId publish_on_topic(AgentState& agent, AgentEnv& env, std::string_view topic, Turn turn, std::string_view phase);

/// One browse session. Quotas cap applied engagements; positive decisions
/// past a cap are logged with suppressed=true.
std::vector<ActionRecord> browse_session(AgentState& agent, AgentEnv& env, const Platform::Visibility& visible,
                                         Turn turn);

/// Human-readable action list used in reflection entries.
std::string describe_action(const ActionRecord& record);

/// Reviews records since the last reflection and follows at most one poster.
ReflectionDecision reflect_follow(AgentState& agent, AgentEnv& env, Turn turn);

/// Rebuilds each agent's action records from a trace (decisions, including
/// suppressed ones), keyed by actor.
std::map<std::string, std::vector<ActionRecord>> replay_memory(const EventLog& log, const Platform& platform);

}  // namespace socialsim
