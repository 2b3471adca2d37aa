#include "socialsim/orchestrator.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "socialsim/planning.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Separate streams so enabling the shuffle never changes sampled activities.
constexpr std::uint64_t kOrderStream = 0x9e3779b97f4a7c15ULL;

}  // namespace

void SimConfig::validate() const {
  auto require = [](bool ok, std::string_view field, std::string_view what) {
    if (!ok) throw ConfigError(fmt::format("{}: {}", field, what));
  };
  require(n_initial >= 1, "n_initial", "must be at least 1");
  require(n_regular >= 1, "n_regular", "must be at least 1");
  require(posts_per_initial >= 1, "posts_per_initial", "must be at least 1");
  require(stage_hours >= 1, "stage_hours", "must be at least 1");
  require(session_size >= 1, "session_size", "must be at least 1");
  require(alpha > 0.0, "alpha", "must be positive");
  require(x_min > 0.0 && x_min <= 1.0, "x_min", "must lie in (0, 1]");
  require(t_k >= 0.0 && t_k <= 1.0, "t_k", "must lie in [0, 1]");
  require(t_p >= 0.0 && t_p <= 1.0, "t_p", "must lie in [0, 1]");
  require(retrieval_k >= 1, "retrieval_k", "must be at least 1");
  require(max_inflight >= 1, "max_inflight", "must be at least 1");
  require(max_attempts >= 1, "max_attempts", "must be at least 1");
  require(backend == "heuristic" || backend == "scripted" || backend == "remote", "backend",
          "must be heuristic, scripted or remote");
  require(backend != "scripted" || !fixtures.empty(), "fixtures", "is required by the scripted backend");
}

json SimConfig::to_json() const {
  return json{
      {"n_initial", n_initial},
      {"n_regular", n_regular},
      {"posts_per_initial", posts_per_initial},
      {"stage_hours", stage_hours},
      {"session_size", session_size},
      {"alpha", alpha},
      {"x_min", x_min},
      {"t_k", t_k},
      {"t_p", t_p},
      {"seed", seed},
      {"backend", backend},
      {"knowledge", knowledge.string()},
      {"persona_seeds", persona_seeds.string()},
      {"fixtures", fixtures.string()},
      {"record_fixtures", record_fixtures.string()},
      {"retrieval_k", retrieval_k},
      {"heuristic_like", heuristic.like},
      {"heuristic_reblog", heuristic.reblog},
      {"heuristic_comment", heuristic.comment},
      {"shuffle", shuffle},
      {"max_inflight", max_inflight},
      {"max_attempts", max_attempts},
  };
}

std::string_view to_string(StagePhase phase) {
  switch (phase) {
    case StagePhase::seeding:
      return "seeding";
    case StagePhase::stage1:
      return "stage1";
    case StagePhase::stage2:
      return "stage2";
    case StagePhase::done:
      return "done";
  }
  return "unknown";
}

BackendPtr make_backend(const SimConfig& config) {
  BackendPtr backend;
  if (config.backend == "heuristic") {
    backend = std::make_shared<HeuristicBackend>(config.heuristic);
  } else if (config.backend == "scripted") {
    backend = ScriptedBackend::from_file(config.fixtures);
  } else if (config.backend == "remote") {
    RetryPolicy policy;
    policy.max_attempts = config.max_attempts;
    backend = with_budget(std::make_shared<RemoteBackend>(RemoteConfig::from_env()),
                          static_cast<std::size_t>(config.max_inflight), policy);
  } else {
    throw ConfigError(fmt::format("backend: unknown backend \"{}\"", config.backend));
  }
  if (!config.record_fixtures.empty()) backend = std::make_shared<RecordingBackend>(backend);
  return backend;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(SimConfig config, BackendPtr backend, KnowledgeCorpus corpus, std::vector<PersonaSeed> seeds)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      retriever_(std::move(corpus)),
      seeds_(std::move(seeds)),
      activity_rng_(config_.seed),
      order_rng_(config_.seed ^ kOrderStream) {
  config_.validate();
  if (!backend_) throw ConfigError("backend: none configured");
  if (seeds_.empty()) throw ConfigError("persona_seeds: no persona seeds were provided");
}

AgentEnv Simulation::env() {
  ActionSettings settings;
  settings.t_k = config_.t_k;
  settings.t_p = config_.t_p;
  settings.retrieval_k = static_cast<std::size_t>(config_.retrieval_k);
  settings.session_size = config_.session_size;
  return AgentEnv{platform_, *backend_, retriever_, summaries_, [this](Event e) { log_.append(std::move(e)); },
                  settings};
}

void Simulation::setup() {
  if (setup_done_) throw ValidationError("setup already ran");
  auto make_agents = [&](int count, AccountKind kind, std::string_view prefix, std::size_t seed_offset,
                         std::vector<AgentState>& out) {
    for (int i = 0; i < count; ++i) {
      auto handle = fmt::format("{}_{:03}", prefix, i + 1);
      const auto& seed = seeds_[(seed_offset + static_cast<std::size_t>(i)) % seeds_.size()];
      PersonaProfile profile;
      try {
        profile = enrich_persona(seed, *backend_, handle + ":0");
      } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("enrichment of {} failed: {}", handle, e.what()));
      }
      AccountId id = platform_.create_account(handle, kind);
      out.push_back(AgentState{id, handle, Persona(std::move(profile)), 0.0, {}, {}, 0});
    }
  };
  make_agents(config_.n_initial, AccountKind::initial, "init", 0, initial_);
  make_agents(config_.n_regular, AccountKind::regular, "reg", static_cast<std::size_t>(config_.n_initial), regular_);
  setup_done_ = true;
}

void Simulation::seed_world() {
  if (!setup_done_ || phase_ != StagePhase::seeding) throw ValidationError("seed_world called out of order");
  auto e = env();
  const auto n = static_cast<std::size_t>(config_.posts_per_initial);
  for (auto& agent : initial_) {
    try {
      auto topics = generate_topics(agent.persona.profile, n, *backend_, agent.handle + ":0");
      for (std::size_t i = 0; i < n; ++i) publish_on_topic(agent, e, topics[i % topics.size()], 0, "seeding");
    } catch (const Error& err) {
      throw Error(err.kind(), fmt::format("seeding by {} failed: {}", agent.handle, err.what()));
    }
  }
}

void Simulation::plan_agents() {
  if (!setup_done_ || phase_ != StagePhase::seeding) throw ValidationError("plan_agents called out of order");
  for (auto& agent : regular_) agent.activity = sample_activity(activity_rng_, config_.alpha, config_.x_min);
  for (auto& agent : regular_) {
    auto result = generate_plan(agent.persona.profile, agent.activity, *backend_, agent.handle + ":0");
    agent.plan = result.plan;
    if (result.fallback)
      log_.append(Event{0, agent.handle, std::string(event_kind::anomaly), "plan",
                        json{{"reason", "fallback plan used"}, {"error", result.last_error}}, false});
  }
  phase_ = StagePhase::stage1;
}

std::pair<Turn, Turn> Simulation::stage_turns(StagePhase phase) const {
  const Turn h = config_.stage_hours;
  if (phase == StagePhase::stage1) return {1, h};
  if (phase == StagePhase::stage2) return {h + 1, 2 * h};
  return {0, 0};
}

void Simulation::agent_turn(AgentState& agent, Turn turn, const Platform::Visibility& visible) {
  auto e = env();
  if (is_browse_turn(agent.plan, turn)) browse_session(agent, e, visible, turn);
  for (int i = posts_at_turn(agent.plan, turn); i > 0; --i) {
    auto prefix = fmt::format("{}:{}:{}", agent.handle, turn, agent.posts_made);
    auto topics = generate_topics(agent.persona.profile, 1, *backend_, prefix);
    publish_on_topic(agent, e, topics.front(), turn, to_string(phase_));
  }
  if (turn > 0 && turn % kReflectionInterval == 0) reflect_follow(agent, e, turn);
}

void Simulation::run_stage(StagePhase phase) {
  if (phase != phase_ || (phase != StagePhase::stage1 && phase != StagePhase::stage2))
    throw ValidationError(fmt::format("run_stage({}) called during {}", to_string(phase), to_string(phase_)));
  const AccountKind audience = phase == StagePhase::stage1 ? AccountKind::initial : AccountKind::regular;
  const Platform::Visibility visible = [audience](const Account& a) { return a.kind == audience; };

  std::vector<std::size_t> order(regular_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto [first, last] = stage_turns(phase);
  for (Turn turn = first; turn <= last; ++turn) {
    if (config_.shuffle) std::shuffle(order.begin(), order.end(), order_rng_);
    for (std::size_t idx : order) {
      auto& agent = regular_[idx];
      try {
        agent_turn(agent, turn, visible);
      } catch (const Error& err) {
        log_.append(Event{turn, agent.handle, std::string(event_kind::anomaly), "turn",
                          json{{"reason", "agent quarantined for this turn"}, {"error", err.what()}}, false});
      }
    }
  }
  phase_ = phase == StagePhase::stage1 ? StagePhase::stage2 : StagePhase::done;
}

// ---------------------------------------------------------------------------

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

class RunWriter {
 public:
  explicit RunWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& rel, std::string_view contents) {
    text::write_file(dir_ / rel, contents);
    hashes_[rel] = text::sha256_hex(contents);
  }
  const json& hashes() const { return hashes_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  json hashes_ = json::object();
};

void write_agents(RunWriter& w, const Simulation& sim) {
  for (const auto* group : {&sim.initial_agents(), &sim.regular_agents()})
    for (const auto& a : *group) w.write("personas/" + a.handle + ".json", dump(a.persona.profile.to_json()));
}

void write_plans(RunWriter& w, const Simulation& sim) {
  for (const auto& a : sim.regular_agents()) {
    auto j = a.plan.to_json();
    j["activity"] = a.activity;
    j["account"] = to_string(a.id);
    w.write("plans/" + a.handle + ".json", dump(j));
  }
}

}  // namespace

RunResult run_experiment(const SimConfig& config, BackendPtr backend, const fs::path& out) {
  config.validate();
  RunWriter w(out);
  w.write("config.json", dump(config.to_json()));

  auto seeds = read_persona_seeds(config.persona_seeds);
  KnowledgeCorpus corpus = config.knowledge.empty() ? KnowledgeCorpus{} : ingest_knowledge(config.knowledge);
  Simulation sim(config, std::move(backend), std::move(corpus), std::move(seeds));

  bool planned = false;
  auto flush = [&](std::string_view status) {
    write_agents(w, sim);
    if (planned) write_plans(w, sim);
    w.write("events.jsonl", sim.log().to_jsonl());
    w.write("snapshot.json", dump(sim.platform().to_json()));
    json manifest = {
        {"status", std::string(status)},
        {"seed", config.seed},
        {"backend", config.backend},
        {"phase", std::string(to_string(sim.phase()))},
        {"counts",
         {{"accounts", sim.platform().accounts().size()},
          {"posts", sim.platform().posts().size()},
          {"comments", sim.platform().comments().size()},
          {"events", sim.log().size()}}},
        {"outputs", w.hashes()},
    };
    text::write_file(out / "manifest.json", dump(manifest));
    return manifest;
  };

  try {
    sim.setup();
    sim.seed_world();
    sim.plan_agents();
    planned = true;
    sim.run_stage(StagePhase::stage1);
    sim.run_stage(StagePhase::stage2);
  } catch (...) {
    try {
      flush("failed");
    } catch (...) {
    }
    throw;
  }
  auto manifest = flush("complete");
  return RunResult{out, sim.log().size(), sim.platform().posts().size(), std::move(manifest)};
}

RunResult run_experiment(const SimConfig& config, const fs::path& out) {
  config.validate();
  auto backend = make_backend(config);
  auto result = run_experiment(config, backend, out);
  if (auto recorder = std::dynamic_pointer_cast<RecordingBackend>(backend))
    write_fixtures(recorder->entries(), config.record_fixtures);
  return result;
}

}  // namespace socialsim
