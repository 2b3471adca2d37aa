#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "socialsim/events.hpp"
#include "socialsim/persona.hpp"
#include "socialsim/platform.hpp"

namespace socialsim {

/// Unique n-grams over total n-gram occurrences across all texts.
/// Throws MetricError when the texts contain no n-gram at all.
double distinct_n(const std::vector<std::string>& texts, std::size_t n);

enum class NliLabel { entailment, neutral, contradiction };
std::string_view to_string(NliLabel label);
NliLabel parse_nli_label(std::string_view s);

/// entailment -> 1, neutral -> 0, contradiction -> -1.
int cscore(NliLabel label);

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double similarity(std::string_view candidate, std::string_view reference) = 0;
  virtual NliLabel nli(std::string_view premise, std::string_view hypothesis) = 0;
  virtual std::string name() const = 0;
};

/// Lexical stand-in: TF-IDF similarity; entailment at similarity >= 0.3,
/// contradiction when the hypothesis negates a premise word, else neutral.
class MockScorer final : public Scorer {
 public:
  double similarity(std::string_view candidate, std::string_view reference) override;
  NliLabel nli(std::string_view premise, std::string_view hypothesis) override;
  std::string name() const override { return "mock"; }
};

/// Client for the scoring sidecar (POST /similarity, POST /nli, GET /health).
class SidecarScorer final : public Scorer {
 public:
  explicit SidecarScorer(std::string base_url);
  double similarity(std::string_view candidate, std::string_view reference) override;
  NliLabel nli(std::string_view premise, std::string_view hypothesis) override;
  std::string name() const override { return "sidecar"; }

  /// Parsed /health body; throws MetricError unless the sidecar answers 200.
  nlohmann::json health() const;

 private:
  std::string base_url_;
};

std::unique_ptr<Scorer> make_scorer(std::string_view kind, const std::string& sidecar_url);

// ---------------------------------------------------------------------------

enum class Action { like, reblog, comment, post };
std::string_view to_string(Action action);

struct EngagementPartition {
  Action action = Action::like;
  std::vector<PostId> engaged;
  std::vector<PostId> not_engaged;
};

/// Splits posts `agent` browsed in turns [first, last] by whether it decided
/// on `action`. Suppressed positives count as engaged.
EngagementPartition partition(const EventLog& log, std::string_view agent, Action action, Turn first = 0,
                              Turn last = std::numeric_limits<Turn>::max());

struct DeltaResult {
  double sim_engaged = 0.0;
  double sim_not_engaged = 0.0;
  double delta_bs = 0.0;
  double c_engaged = 0.0;
  double c_not_engaged = 0.0;
  double delta_c = 0.0;
};

/// Per-side means of similarity and consistency between each post and the
/// persona text. Throws MetricError when either side is empty.
DeltaResult delta_metrics(const std::vector<std::string>& engaged, const std::vector<std::string>& not_engaged,
                          std::string_view persona_text, Scorer& scorer);
DeltaResult delta_metrics(const EngagementPartition& part, const Platform& platform, std::string_view persona_text,
                          Scorer& scorer);

struct FollowerStats {
  std::map<std::uint32_t, std::size_t> histogram;  // follower count -> agents
  std::size_t agents = 0;
  std::size_t zero_followers = 0;
  std::uint64_t total_followers = 0;
  double top1_share = 0.0;
  double top2_share = 0.0;
};

FollowerStats follower_stats(const std::vector<std::uint32_t>& counts);
/// Over regular accounts only.
FollowerStats follower_stats(const Platform& snapshot);

// ---------------------------------------------------------------------------

/// Metric names, in report order.
inline constexpr std::string_view kMetricNames[] = {"sim_engaged",   "sim_not_engaged",    "delta_bs",
                                                    "cscore_engaged", "cscore_not_engaged", "delta_c",
                                                    "distinct_1",     "distinct_2"};
inline constexpr std::string_view kStageNames[] = {"stage1", "stage2"};
inline constexpr Action kActions[] = {Action::like, Action::reblog, Action::comment, Action::post};

/// Absent cells are metrics whose inputs were empty.
struct MetricReport {
  /// stage -> action -> metric -> value
  std::map<std::string, std::map<std::string, std::map<std::string, std::optional<double>>>> cells;
  FollowerStats followers;
  std::string scorer;

  std::optional<double> get(std::string_view stage, Action action, std::string_view metric) const;
  nlohmann::json to_json() const;
  static MetricReport from_json(const nlohmann::json& j);
};

/// Reads events.jsonl, snapshot.json, config.json and personas/ from a run
/// directory and computes the report. Throws IoError("missing: <file>").
MetricReport evaluate_run(const std::filesystem::path& run_dir, Scorer& scorer);

std::string render_csv(const MetricReport& report);
std::string render_markdown(const MetricReport& report);

/// Writes report.csv and report.md into `dir`.
void emit_report(const MetricReport& report, const std::filesystem::path& dir);

}  // namespace socialsim
