#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "socialsim/agent.hpp"
#include "socialsim/events.hpp"
#include "socialsim/llm.hpp"
#include "socialsim/persona.hpp"
#include "socialsim/platform.hpp"
#include "socialsim/retrieval.hpp"

namespace socialsim {

inline constexpr Turn kReflectionInterval = 48;

struct SimConfig {
  int n_initial = 150;
  int n_regular = 300;
  int posts_per_initial = 7;
  int stage_hours = 168;
  int session_size = 10;
  double alpha = 2.0;
  double x_min = 0.1;
  double t_k = 0.25;
  double t_p = 0.80;
  std::uint64_t seed = 42;
  std::string backend = "heuristic";  // heuristic | scripted | remote
  std::filesystem::path knowledge;
  std::filesystem::path persona_seeds;
  std::filesystem::path fixtures;         // scripted backend table
  std::filesystem::path record_fixtures;  // when set, completions are recorded here
  int retrieval_k = 3;
  HeuristicThresholds heuristic;
  bool shuffle = false;
  int max_inflight = 4;
  int max_attempts = 3;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  nlohmann::json to_json() const;
};

enum class StagePhase { seeding, stage1, stage2, done };
std::string_view to_string(StagePhase phase);

/// Builds the backend the config asks for (wrapping remote ones in the
/// request budget and, if requested, a recorder).
BackendPtr make_backend(const SimConfig& config);

/// Drives one experiment. Each step must be called in order:
/// setup -> seed_world -> plan_agents -> run_stage(stage1) -> run_stage(stage2).
class Simulation {
 public:
  Simulation(SimConfig config, BackendPtr backend, KnowledgeCorpus corpus, std::vector<PersonaSeed> seeds);

  /// Registers accounts and enriches every persona.
  void setup();
  /// Initial agents publish their posts at turn 0.
  void seed_world();
  /// Samples activity levels and builds a plan for each regular agent.
  void plan_agents();
  /// Advances the clock through one stage.
  void run_stage(StagePhase phase);

  /// First and last turn (inclusive) of a stage.
  std::pair<Turn, Turn> stage_turns(StagePhase phase) const;

  StagePhase phase() const noexcept { return phase_; }
  const SimConfig& config() const noexcept { return config_; }
  const Platform& platform() const noexcept { return platform_; }
  const EventLog& log() const noexcept { return log_; }
  const std::vector<AgentState>& initial_agents() const noexcept { return initial_; }
  const std::vector<AgentState>& regular_agents() const noexcept { return regular_; }
  const SummaryCache& summaries() const noexcept { return summaries_; }

 private:
  AgentEnv env();
  void agent_turn(AgentState& agent, Turn turn, const Platform::Visibility& visible);

  SimConfig config_;
  BackendPtr backend_;
  TfidfRetriever retriever_;
  std::vector<PersonaSeed> seeds_;
  Platform platform_;
  EventLog log_;
  SummaryCache summaries_;
  std::vector<AgentState> initial_;
  std::vector<AgentState> regular_;
  std::mt19937_64 activity_rng_;
  std::mt19937_64 order_rng_;
  StagePhase phase_ = StagePhase::seeding;
  bool setup_done_ = false;
};

struct RunResult {
  std::filesystem::path dir;
  std::size_t events = 0;
  std::size_t posts = 0;
  nlohmann::json manifest;
};

/// Runs every step and writes config.json, personas/, plans/, events.jsonl,
/// snapshot.json and manifest.json under `out`. On failure whatever was
/// produced so far is still written before the error propagates.
RunResult run_experiment(const SimConfig& config, BackendPtr backend, const std::filesystem::path& out);

/// Convenience overload that builds the backend from the config.
RunResult run_experiment(const SimConfig& config, const std::filesystem::path& out);

}  // namespace socialsim
