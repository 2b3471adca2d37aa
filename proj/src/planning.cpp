#include "socialsim/planning.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <regex>

#include <fmt/format.h>

#include "socialsim/prompts.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;

double uniform_open01(std::mt19937_64& rng) {
  for (;;) {
    std::uint64_t bits = rng() >> 11;
    if (bits != 0) return static_cast<double>(bits) * 0x1.0p-53;
  }
}

double pareto_quantile(double u, double alpha, double x_min) { return x_min / std::pow(u, 1.0 / alpha); }

double sample_activity_raw(std::mt19937_64& rng, double alpha, double x_min) {
  if (!(alpha > 0.0)) throw ConfigError(fmt::format("alpha must be positive, got {}", alpha));
  if (!(x_min > 0.0 && x_min <= 1.0)) throw ConfigError(fmt::format("x_min must lie in (0, 1], got {}", x_min));
  return pareto_quantile(uniform_open01(rng), alpha, x_min);
}

double sample_activity(std::mt19937_64& rng, double alpha, double x_min) {
  return std::min(sample_activity_raw(rng, alpha, x_min), 1.0);
}

int hour_of_day(Turn turn) { return static_cast<int>(turn % 24); }
int day_of_week(Turn turn) { return static_cast<int>((turn / 24) % 7) + 1; }

// ---------------------------------------------------------------------------

json PlanSpec::to_json() const {
  return json{{"browse_start", browse_start}, {"browse_end", browse_end},   {"p_like", p_like},
              {"p_reblog", p_reblog},         {"p_comment", p_comment},     {"post_day", post_day},
              {"post_start", post_start},     {"post_end", post_end},       {"posts_per_week", posts_per_week}};
}

PlanSpec PlanSpec::from_json(const json& j) {
  try {
    PlanSpec p;
    p.browse_start = j.at("browse_start").get<int>();
    p.browse_end = j.at("browse_end").get<int>();
    p.p_like = j.at("p_like").get<double>();
    p.p_reblog = j.at("p_reblog").get<double>();
    p.p_comment = j.at("p_comment").get<double>();
    p.post_day = j.at("post_day").get<int>();
    p.post_start = j.at("post_start").get<int>();
    p.post_end = j.at("post_end").get<int>();
    p.posts_per_week = j.at("posts_per_week").get<int>();
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ParseError("plan", fmt::format("malformed plan document: {}", e.what()));
  }
}

void PlanSpec::validate() const {
  auto window = [](int s, int e, std::string_view what) {
    if (s < 0 || e > 24 || s >= e) throw ValidationError(fmt::format("{} [{}, {}) is not a valid window", what, s, e));
  };
  window(browse_start, browse_end, plan_field::browse);
  window(post_start, post_end, plan_field::post_window);
  for (double p : {p_like, p_reblog, p_comment})
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(fmt::format("probability {} outside [0, 1]", p));
  if (post_day < 1 || post_day > 7) throw ValidationError(fmt::format("post day {} outside 1..7", post_day));
  if (posts_per_week < 1) throw ValidationError("posts per week must be at least 1");
}

// ---------------------------------------------------------------------------

namespace {

using std::regex_constants::icase;

std::regex make_re(const char* pattern) { return std::regex(pattern, std::regex::ECMAScript | icase); }

constexpr const char* kLabelBrowse = R"(browsing\s+time\s+period\s*:)";
constexpr const char* kLabelLike = R"(probability\s+of\s+liking\s*:)";
constexpr const char* kLabelReblog = R"(probability\s+of\s+forwarding\s*:)";
constexpr const char* kLabelComment = R"(probability\s+of\s+commenting\s*:)";
constexpr const char* kLabelPost = R"(posting\s+time\s+period\s*:)";
constexpr const char* kLabelFrequency = R"(frequency\s+of\s+posting\s*:)";

constexpr const char* kWindowValue = R"(^\s*(\d{1,2}):(\d{2})\s*-\s*(\d{1,2}):(\d{2})\s*\.?\s*$)";
constexpr const char* kPercentValue = R"(^\s*(\d+(?:\.\d+)?)\s*%\s*\.?\s*$)";
constexpr const char* kPostValue = R"(^\s*day\s*(\d)\s*-\s*(\d{1,2}):(\d{2})\s*-\s*(\d{1,2}):(\d{2})\s*\.?\s*$)";
constexpr const char* kFrequencyValue = R"(^\s*(\d+)\s*times?\s+(?:per|a)\s+week\s*\.?\s*$)";

/// Value text after the label on the single line that carries it.
std::string field_value(const std::vector<std::string>& lines, const char* label, std::string_view field) {
  std::optional<std::string> found;
  const std::regex label_re = make_re((std::string("^\\s*(?:[-+]\\s*)?") + label).c_str());
  for (const auto& line : lines) {
    std::smatch m;
    if (!std::regex_search(line, m, label_re)) continue;
    if (found) throw ParseError(std::string(field), fmt::format("{} appears more than once", field));
    found = m.suffix().str();
  }
  if (!found) throw ParseError(std::string(field), fmt::format("{} is missing", field));
  return *found;
}

int to_int(const std::ssub_match& m) { return std::stoi(m.str()); }

void check_window(int s, int e, int s_min, int e_min, std::string_view field) {
  if (s > 23 || e > 24 || s_min > 59 || e_min > 59 || (e == 24 && e_min != 0) || s >= e)
    throw ParseError(std::string(field), fmt::format("{} is not a valid same-day window", field));
}

double percent(const std::vector<std::string>& lines, const char* label, std::string_view field) {
  static const std::regex percent_re = make_re(kPercentValue);
  auto value = field_value(lines, label, field);
  std::smatch m;
  if (!std::regex_match(value, m, percent_re))
    throw ParseError(std::string(field), fmt::format("{} is not a percentage", field));
  double pct = std::stod(m[1].str());
  if (pct > 100.0) throw ParseError(std::string(field), fmt::format("{} exceeds 100%", field));
  return pct / 100.0;
}

std::string render_percent(double p) {
  double pct = std::round(p * 100.0 * 1e4) / 1e4;
  return fmt::format("{}", pct);
}

}  // namespace

PlanSpec parse_plan(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    // Models often bold the labels.
    std::erase(line, '*');
    lines.push_back(std::move(line));
    pos = end + 1;
  }

  static const std::regex window_re = make_re(kWindowValue);
  static const std::regex post_re = make_re(kPostValue);
  static const std::regex frequency_re = make_re(kFrequencyValue);

  PlanSpec plan;
  {
    auto value = field_value(lines, kLabelBrowse, plan_field::browse);
    std::smatch m;
    if (!std::regex_match(value, m, window_re))
      throw ParseError(std::string(plan_field::browse), fmt::format("{} is not HH:MM-HH:MM", plan_field::browse));
    check_window(to_int(m[1]), to_int(m[3]), to_int(m[2]), to_int(m[4]), plan_field::browse);
    plan.browse_start = to_int(m[1]);
    plan.browse_end = to_int(m[3]);
  }
  plan.p_like = percent(lines, kLabelLike, plan_field::like);
  plan.p_reblog = percent(lines, kLabelReblog, plan_field::reblog);
  plan.p_comment = percent(lines, kLabelComment, plan_field::comment);
  {
    auto value = field_value(lines, kLabelPost, plan_field::post_window);
    std::smatch m;
    if (!std::regex_match(value, m, post_re))
      throw ParseError(std::string(plan_field::post_window), fmt::format("{} is not day D-HH:MM-HH:MM", plan_field::post_window));
    int day = to_int(m[1]);
    if (day < 1 || day > 7) throw ParseError(std::string(plan_field::post_window), fmt::format("{} day must be 1..7", plan_field::post_window));
    check_window(to_int(m[2]), to_int(m[4]), to_int(m[3]), to_int(m[5]), plan_field::post_window);
    plan.post_day = day;
    plan.post_start = to_int(m[2]);
    plan.post_end = to_int(m[4]);
  }
  {
    auto value = field_value(lines, kLabelFrequency, plan_field::frequency);
    std::smatch m;
    if (!std::regex_match(value, m, frequency_re))
      throw ParseError(std::string(plan_field::frequency), fmt::format("{} is not \"N times per week\"", plan_field::frequency));
    auto n = m[1].str();
    if (n.size() > 3 || std::stoi(n) < 1)
      throw ParseError(std::string(plan_field::frequency), fmt::format("{} must be between 1 and 999", plan_field::frequency));
    plan.posts_per_week = std::stoi(n);
  }
  return plan;
}

std::string render_plan(const PlanSpec& plan) {
  return fmt::format(
      "Browsing time period: {:02}:00-{:02}:00\n"
      "Probability of liking: {}%\n"
      "Probability of forwarding: {}%\n"
      "Probability of commenting: {}%\n"
      "Posting time period: day {}-{:02}:00-{:02}:00\n"
      "Frequency of posting: {} times per week",
      plan.browse_start, plan.browse_end, render_percent(plan.p_like), render_percent(plan.p_reblog),
      render_percent(plan.p_comment), plan.post_day, plan.post_start, plan.post_end, plan.posts_per_week);
}

PlanSpec fallback_plan(double activity) {
  PlanSpec p;
  p.browse_start = 19;
  p.browse_end = 21;
  p.p_like = 0.2 * activity;
  p.p_reblog = 0.1 * activity;
  p.p_comment = 0.1 * activity;
  p.post_day = 1;
  p.post_start = 20;
  p.post_end = 21;
  p.posts_per_week = 1;
  return p;
}

PlanResult generate_plan(const PersonaProfile& profile, double activity, ChatBackend& backend,
                         std::string_view key_prefix) {
  const std::string prompt = prompts::plan(activity, full_view(profile).render());
  PlanResult result;
  for (int attempt = 0; attempt < kPlanAttempts; ++attempt) {
    ++result.attempts;
    try {
      auto completion =
          backend.complete(ChatRequest::make(PromptTag::plan, prompt, fmt::format("{}:plan:{}", key_prefix, attempt)));
      result.plan = parse_plan(text::trim(completion));
      return result;
    } catch (const ParseError& e) {
      result.last_error = e.what();
    } catch (const BackendError& e) {
      result.last_error = e.what();
    }
  }
  result.plan = fallback_plan(activity);
  result.fallback = true;
  return result;
}

// ---------------------------------------------------------------------------

int quota_for(double p, int session_size) {
  double q = std::floor(p * session_size + 0.5 + 1e-9);
  return std::clamp(static_cast<int>(q), 0, session_size);
}

SessionQuota quotas(const PlanSpec& plan, int session_size) {
  if (session_size < 1) throw ConfigError("session size must be at least 1");
  return {session_size, quota_for(plan.p_like, session_size), quota_for(plan.p_reblog, session_size),
          quota_for(plan.p_comment, session_size)};
}

bool is_browse_turn(const PlanSpec& plan, Turn turn) {
  int h = hour_of_day(turn);
  return h >= plan.browse_start && h < plan.browse_end;
}

bool is_post_turn(const PlanSpec& plan, Turn turn) {
  int h = hour_of_day(turn);
  return day_of_week(turn) == plan.post_day && h >= plan.post_start && h < plan.post_end;
}

int posts_at_turn(const PlanSpec& plan, Turn turn) {
  if (!is_post_turn(plan, turn)) return 0;
  return hour_of_day(turn) - plan.post_start < plan.posts_per_week ? 1 : 0;
}

}  // namespace socialsim
