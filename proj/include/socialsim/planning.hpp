#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <json.hpp>

#include "socialsim/llm.hpp"
#include "socialsim/persona.hpp"
#include "socialsim/platform.hpp"

namespace socialsim {

/// Uniform draw in (0, 1) built from the top 53 bits of one engine output.
/// Zero is rejected, so the Pareto inverse CDF never divides by zero.
double uniform_open01(std::mt19937_64& rng);

/// Pareto inverse CDF: x_min / u^(1/alpha). Unclamped.
double pareto_quantile(double u, double alpha, double x_min);

/// One unclamped Pareto draw. Throws ConfigError on alpha <= 0 or x_min outside (0, 1].
double sample_activity_raw(std::mt19937_64& rng, double alpha, double x_min);

/// Activity level in [x_min, 1].
double sample_activity(std::mt19937_64& rng, double alpha = 2.0, double x_min = 0.1);

int hour_of_day(Turn turn);
/// 1..7; turn 0 is hour 0 of day 1.
int day_of_week(Turn turn);

struct PlanSpec {
  int browse_start = 0;  // [start, end) hours, daily
  int browse_end = 1;
  double p_like = 0.0;
  double p_reblog = 0.0;
  double p_comment = 0.0;
  int post_day = 1;      // 1..7
  int post_start = 0;    // [start, end) hours on post_day
  int post_end = 1;
  int posts_per_week = 1;

  nlohmann::json to_json() const;
  static PlanSpec from_json(const nlohmann::json& j);
  /// Throws ValidationError when a window or probability is out of range.
  void validate() const;

  bool operator==(const PlanSpec&) const = default;
};

/// Field names used in parse errors.
namespace plan_field {
inline constexpr std::string_view browse = "browsing time period";
inline constexpr std::string_view like = "probability of liking";
inline constexpr std::string_view reblog = "probability of forwarding";
inline constexpr std::string_view comment = "probability of commenting";
inline constexpr std::string_view post_window = "posting time period";
inline constexpr std::string_view frequency = "posting frequency";
}  // namespace plan_field

/// Reads the six plan lines in any order, case-insensitively. Minutes are
/// dropped. Throws ParseError whose field() names the offending line.
PlanSpec parse_plan(std::string_view text);

/// Prints a plan in the same six-line layout parse_plan reads.
std::string render_plan(const PlanSpec& plan);

/// Deterministic plan used when the model never produces a parseable one.
PlanSpec fallback_plan(double activity);

struct PlanResult {
  PlanSpec plan;
  bool fallback = false;
  int attempts = 0;
  std::string last_error;
};

inline constexpr int kPlanAttempts = 3;

PlanResult generate_plan(const PersonaProfile& profile, double activity, ChatBackend& backend,
                         std::string_view key_prefix);

struct SessionQuota {
  int session_size = 10;
  int max_likes = 0;
  int max_reblogs = 0;
  int max_comments = 0;
};

/// round(p * K), halves rounded up, capped at K.
int quota_for(double p, int session_size);
SessionQuota quotas(const PlanSpec& plan, int session_size);

bool is_browse_turn(const PlanSpec& plan, Turn turn);
bool is_post_turn(const PlanSpec& plan, Turn turn);
/// Posts due at this turn: one per window hour until posts_per_week are placed.
int posts_at_turn(const PlanSpec& plan, Turn turn);

}  // namespace socialsim
