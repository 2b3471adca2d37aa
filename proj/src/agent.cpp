#include "socialsim/agent.hpp"

#include <algorithm>
#include <regex>

#include <fmt/format.h>

#include "socialsim/prompts.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;

namespace {

std::string post_ref(PostId id) { return fmt::format("post_{}", id.value); }

std::optional<PostId> parse_post_ref(std::string_view s) {
  if (!s.starts_with("post_")) return std::nullopt;
  std::uint32_t v = 0;
  for (char c : s.substr(5)) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::uint32_t>(c - '0');
  }
  if (v == 0) return std::nullopt;
  return PostId{v};
}

std::string clip(std::string_view s, std::size_t n = 200) {
  return s.size() <= n ? std::string(s) : text::truncate_at_word(s, n);
}

/// Trimmed, one pair of surrounding quotes removed.
std::string_view unquote(std::string_view s) {
  s = text::trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    s = text::trim(s.substr(1, s.size() - 2));
  return s;
}

Decision<bool> parse_token(std::string_view completion, std::string_view yes) {
  auto t = unquote(completion);
  if (text::iequals(t, yes)) return {true, std::nullopt};
  if (text::iequals(t, "no operation")) return {false, std::nullopt};
  return {false, fmt::format("expected \"{}\" or \"no operation\"", yes)};
}

void report_anomaly(const EventSink& sink, Turn turn, std::string_view actor, PromptTag tag, const std::string& key,
                    const std::string& reason, std::string_view completion) {
  if (!sink) return;
  sink(Event{turn, std::string(actor), std::string(event_kind::anomaly), std::string(to_string(tag)),
             json{{"key", key}, {"reason", reason}, {"completion", clip(completion)}}, false});
}

}  // namespace

Decision<bool> parse_like(std::string_view completion) { return parse_token(completion, "like"); }
Decision<bool> parse_reblog(std::string_view completion) { return parse_token(completion, "forward"); }

Decision<std::optional<std::string>> parse_comment(std::string_view completion) {
  static constexpr std::string_view kPrefix = "Comment content:";
  auto t = unquote(completion);
  if (t.empty()) return {std::nullopt, "empty completion"};
  auto bare = t;
  while (!bare.empty() && bare.back() == '.') bare.remove_suffix(1);
  if (text::iequals(bare, "no comment")) return {std::nullopt, std::nullopt};
  if (text::istarts_with(t, kPrefix)) {
    auto body = text::trim(t.substr(kPrefix.size()));
    if (body.empty()) return {std::nullopt, "comment prefix without content"};
    return {std::string(body), std::nullopt};
  }
  return {std::string(t), "comment accepted without the expected prefix"};
}

std::vector<std::string> parse_topics(std::string_view completion, std::size_t count) {
  static const std::regex numbered(R"(^\s*\d+\s*[.):]\s*(.*)$)");
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < completion.size() && out.size() < count) {
    auto end = completion.find('\n', pos);
    if (end == std::string_view::npos) end = completion.size();
    std::string line(completion.substr(pos, end - pos));
    pos = end + 1;
    std::smatch m;
    if (!std::regex_match(line, m, numbered)) continue;
    std::string topic = m[1].str();
    std::erase(topic, '#');
    std::erase(topic, '*');
    auto trimmed = unquote(topic);
    if (trimmed.empty()) continue;
    out.push_back(text::first_words(trimmed, 15));
  }
  return out;
}

ReflectionDecision parse_reflection(std::string_view completion, const std::function<bool(AccountId)>& registered) {
  auto t = unquote(completion);
  auto bare = t;
  while (!bare.empty() && (bare.back() == '.' || bare.back() == '!')) bare.remove_suffix(1);
  if (text::iequals(bare, "do not follow")) return {};
  static const std::regex id_re(R"(user_(\d+))", std::regex::icase);
  std::string s(t);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), id_re); it != std::sregex_iterator(); ++it) {
    auto id = parse_account_id(text::to_lower((*it)[0].str()));
    if (id && registered(*id)) return {id, std::nullopt};
  }
  return {std::nullopt, "no registered account id in reflection output"};
}

// ---------------------------------------------------------------------------

std::optional<std::string> SummaryCache::get(PostId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SummaryCache::put(PostId id, std::string summary) { entries_.insert_or_assign(id, std::move(summary)); }

std::string summarize_post(PostId id, std::string_view body, ChatBackend& backend, SummaryCache& cache) {
  if (auto hit = cache.get(id)) return *hit;
  std::string summary;
  try {
    auto completion =
        backend.complete(ChatRequest::make(PromptTag::summary, prompts::summary(body), post_ref(id) + ":summary"));
    summary = text::first_words(text::trim(completion), kSummaryWords);
  } catch (const BackendError&) {
  }
  if (summary.empty()) summary = text::first_words(text::trim(body), kSummaryWords);
  cache.put(id, summary);
  return summary;
}

// ---------------------------------------------------------------------------

namespace {

template <class Parse>
auto run_decision(PromptTag tag, const std::string& prompt, ChatBackend& backend, const std::string& key,
                  const EventSink& sink, Turn turn, std::string_view actor, Parse parse)
    -> decltype(parse(std::string_view{}).value) {
  std::string completion;
  try {
    completion = backend.complete(ChatRequest::make(tag, prompt, key));
  } catch (const BackendError& e) {
    report_anomaly(sink, turn, actor, tag, key, fmt::format("backend failure: {}", e.what()), "");
    return {};
  }
  auto d = parse(text::trim(completion));
  if (d.anomaly) report_anomaly(sink, turn, actor, tag, key, *d.anomaly, completion);
  return d.value;
}

}  // namespace

bool decide_like(const RetrievedPersonaView& view, std::string_view post_body, ChatBackend& backend,
                 const std::string& seed_key, const EventSink& sink, Turn turn, std::string_view actor) {
  return run_decision(PromptTag::like, prompts::like(post_body, view.render()), backend, seed_key, sink, turn, actor,
                      parse_like);
}

bool decide_reblog(const RetrievedPersonaView& view, std::string_view post_body, ChatBackend& backend,
                   const std::string& seed_key, const EventSink& sink, Turn turn, std::string_view actor) {
  return run_decision(PromptTag::reblog, prompts::reblog(post_body, view.render()), backend, seed_key, sink, turn,
                      actor, parse_reblog);
}

std::optional<std::string> decide_comment(const RetrievedPersonaView& view, std::string_view post_body,
                                          ChatBackend& backend, const std::string& seed_key, const EventSink& sink,
                                          Turn turn, std::string_view actor) {
  return run_decision(PromptTag::comment, prompts::comment(post_body, view.render()), backend, seed_key, sink, turn,
                      actor, parse_comment);
}

std::vector<std::string> generate_topics(const PersonaProfile& profile, std::size_t count, ChatBackend& backend,
                                         std::string_view key_prefix) {
  if (count == 0) return {};
  const std::string prompt = prompts::topics(count, full_view(profile).render());
  std::string last_error = "no numbered topic lines";
  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    try {
      auto completion = backend.complete(
          ChatRequest::make(PromptTag::topics, prompt, fmt::format("{}:topics:{}", key_prefix, attempt)));
      auto topics = parse_topics(completion, count);
      if (!topics.empty()) return topics;
    } catch (const BackendError& e) {
      if (attempt + 1 == kGenerationAttempts) throw;
      last_error = e.what();
    }
  }
  throw ValidationError(fmt::format("topic generation failed after {} attempts: {}", kGenerationAttempts, last_error));
}

std::string compose_post(std::string_view topic, const RetrievedPersonaView& view,
                         const std::vector<KnowledgeEntry>& knowledge, ChatBackend& backend,
                         std::string_view key_prefix) {
  if (text::trim(topic).empty()) throw ValidationError("post topic is empty");
  const std::string persona_json = view.to_json().dump();
  const std::string prompt = knowledge.empty()
                                 ? prompts::post(topic, persona_json)
                                 : prompts::post_with_knowledge(topic, persona_json, render_knowledge(knowledge));
  std::string draft;
  for (int call = 0; call < 2; ++call) {
    auto key = call == 0 ? std::string(key_prefix) : fmt::format("{}:regen", key_prefix);
    draft = std::string(text::trim(backend.complete(ChatRequest::make(PromptTag::post, prompt, key))));
    if (!draft.empty() && text::utf8_length(draft) <= kMaxPostChars) return draft;
  }
  if (draft.empty()) throw ValidationError(fmt::format("empty post generated for topic \"{}\"", topic));
  return text::truncate_at_word(draft, kMaxPostChars);
}

DedupChoice choose_attempt(const std::vector<double>& sims, double t_p) {
  if (sims.empty()) throw ValidationError("no post attempts to choose from");
  for (std::size_t i = 0; i < sims.size(); ++i)
    if (sims[i] <= t_p) return {i, false};
  auto it = std::min_element(sims.begin(), sims.end());
  return {static_cast<std::size_t>(it - sims.begin()), true};
}

double max_similarity(std::string_view draft, const std::vector<std::string>& priors) {
  double best = 0.0;
  for (const auto& p : priors) best = std::max(best, pairwise_similarity(draft, p));
  return best;
}

// ---------------------------------------------------------------------------

PostId publish_on_topic(AgentState& agent, AgentEnv& env, std::string_view topic, Turn turn, std::string_view phase) {
  const auto& s = env.settings;
  auto view = agent.persona.view_for(topic);
  auto knowledge = personalized_knowledge(topic, env.retriever, agent.persona.profile, s.retrieval_k, s.t_k);

  std::vector<std::string> drafts;
  std::vector<double> sims;
  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    auto prefix = fmt::format("{}:{}:post:{}:{}", agent.handle, turn, agent.posts_made, attempt);
    drafts.push_back(compose_post(topic, view, knowledge, env.backend, prefix));
    sims.push_back(max_similarity(drafts.back(), agent.memory.own_posts));
    if (sims.back() <= s.t_p) break;
  }
  auto choice = choose_attempt(sims, s.t_p);
  const std::string& body = drafts[choice.index];
  PostId id = env.platform.publish_post(agent.id, body, turn);
  agent.memory.own_posts.push_back(body);
  ++agent.posts_made;

  json titles = json::array();
  for (const auto& k : knowledge) titles.push_back(k.title);
  if (env.sink)
    env.sink(Event{turn, agent.handle, std::string(event_kind::post), post_ref(id),
                   json{{"author", to_string(agent.id)},
                        {"body", body},
                        {"topic", std::string(topic)},
                        {"phase", std::string(phase)},
                        {"attempts", drafts.size()},
                        {"regenerations", drafts.size() - 1},
                        {"max_similarities", sims},
                        {"chosen_attempt", choice.index},
                        {"best_of_retries", choice.best_of_retries},
                        {"knowledge", titles}},
                   false});
  return id;
}

std::vector<ActionRecord> browse_session(AgentState& agent, AgentEnv& env, const Platform::Visibility& visible,
                                         Turn turn) {
  const auto quota = quotas(agent.plan, env.settings.session_size);
  auto ids = env.platform.recommend(agent.id, visible, static_cast<std::size_t>(quota.session_size), turn);
  int likes = 0, reblogs = 0, comments = 0;
  std::vector<ActionRecord> session;
  auto emit = [&](std::string_view kind, PostId target, json payload, bool suppressed) {
    if (env.sink)
      env.sink(Event{turn, agent.handle, std::string(kind), post_ref(target), std::move(payload), suppressed});
  };

  for (PostId pid : ids) {
    const Post post = env.platform.post(pid);
    const Account& author = env.platform.account(post.author);
    emit(event_kind::browse, pid,
         json{{"author", to_string(author.id)}, {"author_kind", std::string(to_string(author.kind))}}, false);

    ActionRecord record{turn, pid, post.body, post.author, false, false, std::nullopt};
    try {
      auto view = agent.persona.view_for(post.body);
      auto key = [&](std::string_view tag) { return fmt::format("{}:{}:{}:{}", agent.handle, turn, tag, post_ref(pid)); };
      record.liked = decide_like(view, post.body, env.backend, key("like"), env.sink, turn, agent.handle);
      record.reblogged = decide_reblog(view, post.body, env.backend, key("reblog"), env.sink, turn, agent.handle);
      record.comment = decide_comment(view, post.body, env.backend, key("comment"), env.sink, turn, agent.handle);
    } catch (const Error& e) {
      report_anomaly(env.sink, turn, agent.handle, PromptTag::like, post_ref(pid),
                     fmt::format("decision failed: {}", e.what()), "");
      record = ActionRecord{turn, pid, post.body, post.author, false, false, std::nullopt};
    }

    try {
      if (record.liked) {
        bool allowed = likes < quota.max_likes;
        if (allowed) {
          env.platform.engage(agent.id, pid, EngagementKind::like, std::nullopt, turn);
          ++likes;
        }
        emit(event_kind::like, pid, json::object(), !allowed);
      }
      if (record.reblogged) {
        bool allowed = reblogs < quota.max_reblogs;
        json payload = json::object();
        if (allowed) {
          auto r = env.platform.engage(agent.id, pid, EngagementKind::reblog, std::nullopt, turn);
          ++reblogs;
          if (r.reblog) payload["reblog"] = post_ref(*r.reblog);
        }
        emit(event_kind::reblog, pid, std::move(payload), !allowed);
      }
      if (record.comment) {
        bool allowed = comments < quota.max_comments;
        json payload = {{"body", *record.comment}};
        if (allowed) {
          auto r = env.platform.engage(agent.id, pid, EngagementKind::comment, *record.comment, turn);
          ++comments;
          if (r.comment) payload["comment"] = fmt::format("comment_{}", r.comment->value);
        }
        emit(event_kind::comment, pid, std::move(payload), !allowed);
      }
    } catch (const Error& e) {
      report_anomaly(env.sink, turn, agent.handle, PromptTag::like, post_ref(pid),
                     fmt::format("engagement failed: {}", e.what()), "");
    }
    agent.memory.records.push_back(record);
    session.push_back(std::move(record));
  }
  return session;
}

std::string describe_action(const ActionRecord& r) {
  std::vector<std::string> parts;
  if (r.liked) parts.emplace_back("like");
  if (r.reblogged) parts.emplace_back("forward");
  if (r.comment) parts.emplace_back("comment");
  return parts.empty() ? "no operation" : text::join(parts, ", ");
}

ReflectionDecision reflect_follow(AgentState& agent, AgentEnv& env, Turn turn) {
  auto& memory = agent.memory;
  const std::size_t from = std::min(memory.reflected_upto, memory.records.size());
  const std::size_t window = memory.records.size() - from;
  memory.reflected_upto = memory.records.size();

  auto log_reflect = [&](const ReflectionDecision& d, json extra) {
    if (!env.sink) return;
    extra["window"] = window;
    extra["decision"] = d.follow ? "follow" : "do not follow";
    env.sink(Event{turn, agent.handle, std::string(event_kind::reflect), d.follow ? to_string(*d.follow) : "",
                   std::move(extra), false});
  };

  if (window == 0) {
    ReflectionDecision none;
    log_reflect(none, json::object());
    return none;
  }

  std::vector<std::string> entries;
  for (std::size_t i = from; i < memory.records.size(); ++i) {
    const auto& r = memory.records[i];
    auto summary = summarize_post(r.post, r.post_body, env.backend, env.summaries);
    while (!summary.empty() && summary.back() == '.') summary.pop_back();
    entries.push_back(prompts::reflect_entry(i - from + 1, to_string(r.poster), summary, describe_action(r)));
  }
  const std::string history = text::join(entries, "\n");
  const std::string prompt = prompts::reflect(agent.persona.view_for(history).render(), history);
  const std::string key = fmt::format("{}:{}:reflect", agent.handle, turn);

  std::string completion;
  try {
    completion = env.backend.complete(ChatRequest::make(PromptTag::reflect, prompt, key));
  } catch (const BackendError& e) {
    report_anomaly(env.sink, turn, agent.handle, PromptTag::reflect, key, fmt::format("backend failure: {}", e.what()),
                   "");
    ReflectionDecision none;
    log_reflect(none, json::object());
    return none;
  }

  auto decision = parse_reflection(completion, [&](AccountId id) { return env.platform.has_account(id); });
  if (decision.follow && *decision.follow == agent.id) {
    decision = {std::nullopt, "reflection chose the agent itself"};
  }
  if (decision.anomaly) report_anomaly(env.sink, turn, agent.handle, PromptTag::reflect, key, *decision.anomaly, completion);

  if (decision.follow) {
    bool added = env.platform.follow(agent.id, *decision.follow);
    log_reflect(decision, json{{"new_edge", added}});
    if (added && env.sink)
      env.sink(Event{turn, agent.handle, std::string(event_kind::follow), to_string(*decision.follow),
                     json::object(), false});
  } else {
    log_reflect(decision, json::object());
  }
  return decision;
}

std::map<std::string, std::vector<ActionRecord>> replay_memory(const EventLog& log, const Platform& platform) {
  std::map<std::string, std::vector<ActionRecord>> out;
  std::map<std::pair<std::string, PostId>, std::size_t> where;
  for (const auto& e : log.events()) {
    auto pid = parse_post_ref(e.target);
    if (!pid) continue;
    if (e.kind == event_kind::browse) {
      const auto& post = platform.post(*pid);
      auto& records = out[e.actor];
      where[{e.actor, *pid}] = records.size();
      records.push_back(ActionRecord{e.turn, *pid, post.body, post.author, false, false, std::nullopt});
      continue;
    }
    auto it = where.find({e.actor, *pid});
    if (it == where.end()) continue;
    auto& record = out[e.actor][it->second];
    if (e.kind == event_kind::like) record.liked = true;
    if (e.kind == event_kind::reblog) record.reblogged = true;
    if (e.kind == event_kind::comment) record.comment = e.payload.value("body", std::string{});
  }
  return out;
}

}  // namespace socialsim
