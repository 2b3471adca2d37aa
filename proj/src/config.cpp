#include "socialsim/config.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = {
      "n_initial",      "n_regular",        "posts_per_initial", "stage_hours",       "session_size",
      "alpha",          "x_min",            "t_k",               "t_p",               "seed",
      "backend",        "knowledge",        "persona_seeds",     "fixtures",          "record_fixtures",
      "retrieval_k",    "heuristic_like",   "heuristic_reblog",  "heuristic_comment", "shuffle",
      "max_inflight",   "max_attempts",
  };
  return keys;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::optional<std::string_view> suggest_key(std::string_view unknown) {
  std::optional<std::string_view> best;
  std::size_t best_d = 3;
  for (auto k : config_keys()) {
    auto d = edit_distance(text::to_lower(unknown), k);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

namespace {

template <class T>
T number(const json& v, std::string_view key) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(fmt::format("{}: expected true or false", key));
    return v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(fmt::format("{}: expected an integer", key));
    if constexpr (std::is_unsigned_v<T>)
      if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
        throw ConfigError(fmt::format("{}: expected a non-negative integer", key));
    return v.get<T>();
  } else {
    if (!v.is_number()) throw ConfigError(fmt::format("{}: expected a number", key));
    return v.get<T>();
  }
}

std::string string_value(const json& v, std::string_view key) {
  if (!v.is_string()) throw ConfigError(fmt::format("{}: expected a string", key));
  return v.get<std::string>();
}

fs::path path_value(const json& v, std::string_view key, const fs::path& base) {
  auto s = string_value(v, key);
  if (s.empty()) return {};
  fs::path p(s);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

}  // namespace

SimConfig config_from_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: the document must be a JSON object");
  SimConfig c;
  for (const auto& [key, v] : doc.items()) {
    if (key == "n_initial") c.n_initial = number<int>(v, key);
    else if (key == "n_regular") c.n_regular = number<int>(v, key);
    else if (key == "posts_per_initial") c.posts_per_initial = number<int>(v, key);
    else if (key == "stage_hours") c.stage_hours = number<int>(v, key);
    else if (key == "session_size") c.session_size = number<int>(v, key);
    else if (key == "alpha") c.alpha = number<double>(v, key);
    else if (key == "x_min") c.x_min = number<double>(v, key);
    else if (key == "t_k") c.t_k = number<double>(v, key);
    else if (key == "t_p") c.t_p = number<double>(v, key);
    else if (key == "seed") c.seed = number<std::uint64_t>(v, key);
    else if (key == "backend") c.backend = string_value(v, key);
    else if (key == "knowledge") c.knowledge = path_value(v, key, base_dir);
    else if (key == "persona_seeds") c.persona_seeds = path_value(v, key, base_dir);
    else if (key == "fixtures") c.fixtures = path_value(v, key, base_dir);
    else if (key == "record_fixtures") c.record_fixtures = path_value(v, key, base_dir);
    else if (key == "retrieval_k") c.retrieval_k = number<int>(v, key);
    else if (key == "heuristic_like") c.heuristic.like = number<double>(v, key);
    else if (key == "heuristic_reblog") c.heuristic.reblog = number<double>(v, key);
    else if (key == "heuristic_comment") c.heuristic.comment = number<double>(v, key);
    else if (key == "shuffle") c.shuffle = number<bool>(v, key);
    else if (key == "max_inflight") c.max_inflight = number<int>(v, key);
    else if (key == "max_attempts") c.max_attempts = number<int>(v, key);
    else if (key == "api_key" || key == "API_KEY")
      throw ConfigError(fmt::format("{}: secrets are read from the environment only", key));
    else if (auto s = suggest_key(key))
      throw ConfigError(fmt::format("{}: unknown key (did you mean \"{}\"?)", key, *s));
    else
      throw ConfigError(fmt::format("{}: unknown key", key));
  }
  return c;
}

void apply_overrides(SimConfig& c, const ConfigOverrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.backend) c.backend = *o.backend;
  if (o.t_k) c.t_k = *o.t_k;
  if (o.t_p) c.t_p = *o.t_p;
  if (o.n_initial) c.n_initial = *o.n_initial;
  if (o.n_regular) c.n_regular = *o.n_regular;
  if (o.stage_hours) c.stage_hours = *o.stage_hours;
  if (o.fixtures) c.fixtures = fs::absolute(*o.fixtures).lexically_normal();
  if (o.record_fixtures) c.record_fixtures = fs::absolute(*o.record_fixtures).lexically_normal();
  c.validate();
}

void check_paths(const SimConfig& c) {
  auto exists = [](const fs::path& p, std::string_view key) {
    if (!p.empty() && !fs::is_regular_file(p)) throw ConfigError(fmt::format("{}: file not found: {}", key, p.string()));
  };
  exists(c.knowledge, "knowledge");
  exists(c.persona_seeds, "persona_seeds");
  exists(c.fixtures, "fixtures");
}

SimConfig load_config(const fs::path& path, const ConfigOverrides& overrides) {
  if (!fs::is_regular_file(path)) throw ConfigError(fmt::format("config: file not found: {}", path.string()));
  const std::string data = text::read_file(path);
  json doc = json::object();
  if (!text::trim(data).empty()) {
    doc = json::parse(data, nullptr, false);
    if (doc.is_discarded()) throw ConfigError(fmt::format("config: {} is not valid JSON", path.string()));
  }
  auto base = fs::absolute(path).parent_path();
  SimConfig c = config_from_json(doc, base);
  apply_overrides(c, overrides);
  check_paths(c);
  return c;
}

}  // namespace socialsim
