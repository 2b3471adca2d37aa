#include "socialsim/evaluation.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "socialsim/http.hpp"
#include "socialsim/retrieval.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;
namespace fs = std::filesystem;

double distinct_n(const std::vector<std::string>& texts, std::size_t n) {
  if (n == 0) throw MetricError("distinct-n needs n >= 1");
  std::set<std::vector<std::string>> unique;
  std::size_t total = 0;
  for (const auto& t : texts) {
    auto tokens = tokenize(t);
    if (tokens.size() < n) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      unique.emplace(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                     tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
      ++total;
    }
  }
  if (total == 0) throw MetricError(fmt::format("distinct-{} is undefined: no {}-grams", n, n));
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

std::string_view to_string(NliLabel label) {
  switch (label) {
    case NliLabel::entailment:
      return "entailment";
    case NliLabel::neutral:
      return "neutral";
    case NliLabel::contradiction:
      return "contradiction";
  }
  return "neutral";
}

NliLabel parse_nli_label(std::string_view s) {
  auto t = text::to_lower(text::trim(s));
  if (t == "entailment") return NliLabel::entailment;
  if (t == "neutral") return NliLabel::neutral;
  if (t == "contradiction") return NliLabel::contradiction;
  throw MetricError(fmt::format("unknown NLI label \"{}\"", s));
}

int cscore(NliLabel label) {
  switch (label) {
    case NliLabel::entailment:
      return 1;
    case NliLabel::neutral:
      return 0;
    case NliLabel::contradiction:
      return -1;
  }
  return 0;
}

// ---------------------------------------------------------------------------

double MockScorer::similarity(std::string_view candidate, std::string_view reference) {
  return pairwise_similarity(candidate, reference);
}

namespace {

bool same_word(std::string_view a, std::string_view b) {
  // "loves" should meet "love": drop one trailing 's' on either side.
  auto stem = [](std::string_view w) { return w.size() > 3 && w.back() == 's' ? w.substr(0, w.size() - 1) : w; };
  return a == b || stem(a) == b || a == stem(b);
}

/// Words that directly follow "not" in the token stream.
std::vector<std::string> negated_words(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
    if (tokens[i] == "not") out.push_back(tokens[i + 1]);
  return out;
}

}  // namespace

NliLabel MockScorer::nli(std::string_view premise, std::string_view hypothesis) {
  const auto premise_tokens = tokenize(premise);
  const auto premise_negated = negated_words(premise_tokens);
  for (const auto& word : negated_words(tokenize(hypothesis))) {
    bool premise_negates_too =
        std::any_of(premise_negated.begin(), premise_negated.end(), [&](const auto& w) { return same_word(w, word); });
    if (premise_negates_too) continue;
    for (const auto& p : premise_tokens)
      if (p != "not" && same_word(p, word)) return NliLabel::contradiction;
  }
  return pairwise_similarity(hypothesis, premise) >= 0.3 ? NliLabel::entailment : NliLabel::neutral;
}

SidecarScorer::SidecarScorer(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw ConfigError("sidecar-url: required for the sidecar scorer");
}

namespace {

json sidecar_post(const std::string& url, const json& body) {
  auto r = http::post_json(url, body.dump(), {}, std::chrono::seconds(60));
  if (r.status != 200)
    throw MetricError(fmt::format("sidecar {} answered {}{}", url, r.status, r.error.empty() ? "" : ": " + r.error));
  auto j = json::parse(r.body, nullptr, false);
  if (j.is_discarded()) throw MetricError(fmt::format("sidecar {} returned invalid JSON", url));
  return j;
}

}  // namespace

double SidecarScorer::similarity(std::string_view candidate, std::string_view reference) {
  auto j = sidecar_post(base_url_ + "/similarity", {{"candidate", candidate}, {"reference", reference}});
  if (!j.contains("score") || !j["score"].is_number()) throw MetricError("sidecar similarity response lacks score");
  return std::clamp(j["score"].get<double>(), 0.0, 1.0);
}

NliLabel SidecarScorer::nli(std::string_view premise, std::string_view hypothesis) {
  auto j = sidecar_post(base_url_ + "/nli", {{"premise", premise}, {"hypothesis", hypothesis}});
  if (!j.contains("label") || !j["label"].is_string()) throw MetricError("sidecar nli response lacks label");
  return parse_nli_label(j["label"].get<std::string>());
}

json SidecarScorer::health() const {
  auto r = http::get(base_url_ + "/health", {}, std::chrono::seconds(10));
  if (r.status != 200) throw MetricError(fmt::format("sidecar health check answered {}", r.status));
  auto j = json::parse(r.body, nullptr, false);
  if (j.is_discarded()) throw MetricError("sidecar health returned invalid JSON");
  return j;
}

std::unique_ptr<Scorer> make_scorer(std::string_view kind, const std::string& sidecar_url) {
  if (kind == "mock") return std::make_unique<MockScorer>();
  if (kind == "sidecar") return std::make_unique<SidecarScorer>(sidecar_url);
  throw ConfigError(fmt::format("scorer: unknown scorer \"{}\" (expected mock or sidecar)", kind));
}

// ---------------------------------------------------------------------------

std::string_view to_string(Action action) {
  switch (action) {
    case Action::like:
      return "like";
    case Action::reblog:
      return "reblog";
    case Action::comment:
      return "comment";
    case Action::post:
      return "post";
  }
  return "like";
}

namespace {

std::optional<PostId> post_of(std::string_view target) {
  if (!target.starts_with("post_")) return std::nullopt;
  try {
    auto v = std::stoul(std::string(target.substr(5)));
    if (v == 0) return std::nullopt;
    return PostId{static_cast<std::uint32_t>(v)};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

EngagementPartition partition(const EventLog& log, std::string_view agent, Action action, Turn first, Turn last) {
  EngagementPartition part;
  part.action = action;
  const std::string_view kind = to_string(action);
  std::vector<PostId> browsed;
  std::set<PostId> engaged;
  for (const auto& e : log.events()) {
    if (e.actor != agent || e.turn < first || e.turn > last) continue;
    auto pid = post_of(e.target);
    if (!pid) continue;
    if (e.kind == event_kind::browse) browsed.push_back(*pid);
    else if (e.kind == kind) engaged.insert(*pid);
  }
  for (PostId p : browsed) (engaged.contains(p) ? part.engaged : part.not_engaged).push_back(p);
  return part;
}

namespace {

struct SideSums {
  double sim = 0.0;
  double c = 0.0;
  std::size_t n = 0;

  void add(Scorer& scorer, std::string_view post, std::string_view persona) {
    sim += scorer.similarity(post, persona);
    c += cscore(scorer.nli(persona, post));
    ++n;
  }
};

DeltaResult combine(const SideSums& e, const SideSums& ne) {
  if (e.n == 0 || ne.n == 0) throw MetricError("delta is undefined: one side of the partition is empty");
  DeltaResult r;
  r.sim_engaged = e.sim / static_cast<double>(e.n);
  r.sim_not_engaged = ne.sim / static_cast<double>(ne.n);
  r.delta_bs = r.sim_engaged - r.sim_not_engaged;
  r.c_engaged = e.c / static_cast<double>(e.n);
  r.c_not_engaged = ne.c / static_cast<double>(ne.n);
  r.delta_c = r.c_engaged - r.c_not_engaged;
  return r;
}

}  // namespace

DeltaResult delta_metrics(const std::vector<std::string>& engaged, const std::vector<std::string>& not_engaged,
                          std::string_view persona_text, Scorer& scorer) {
  SideSums e, ne;
  for (const auto& p : engaged) e.add(scorer, p, persona_text);
  for (const auto& p : not_engaged) ne.add(scorer, p, persona_text);
  return combine(e, ne);
}

DeltaResult delta_metrics(const EngagementPartition& part, const Platform& platform, std::string_view persona_text,
                          Scorer& scorer) {
  std::vector<std::string> e, ne;
  for (PostId p : part.engaged) e.push_back(platform.post(p).body);
  for (PostId p : part.not_engaged) ne.push_back(platform.post(p).body);
  return delta_metrics(e, ne, persona_text, scorer);
}

FollowerStats follower_stats(const std::vector<std::uint32_t>& counts) {
  FollowerStats s;
  s.agents = counts.size();
  for (auto c : counts) {
    ++s.histogram[c];
    if (c == 0) ++s.zero_followers;
    s.total_followers += c;
  }
  if (s.total_followers > 0) {
    auto sorted = counts;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double total = static_cast<double>(s.total_followers);
    s.top1_share = sorted[0] / total;
    s.top2_share = (sorted[0] + (sorted.size() > 1 ? sorted[1] : 0)) / total;
  }
  return s;
}

FollowerStats follower_stats(const Platform& snapshot) {
  std::vector<std::uint32_t> counts;
  for (const auto& a : snapshot.accounts())
    if (a.kind == AccountKind::regular) counts.push_back(static_cast<std::uint32_t>(a.followers.size()));
  return follower_stats(counts);
}

// ---------------------------------------------------------------------------

std::optional<double> MetricReport::get(std::string_view stage, Action action, std::string_view metric) const {
  auto s = cells.find(std::string(stage));
  if (s == cells.end()) return std::nullopt;
  auto a = s->second.find(std::string(to_string(action)));
  if (a == s->second.end()) return std::nullopt;
  auto m = a->second.find(std::string(metric));
  if (m == a->second.end()) return std::nullopt;
  return m->second;
}

json MetricReport::to_json() const {
  json c = json::object();
  for (const auto& [stage, actions] : cells)
    for (const auto& [action, metrics] : actions)
      for (const auto& [metric, value] : metrics) c[stage][action][metric] = value ? json(*value) : json(nullptr);
  json hist = json::object();
  for (const auto& [count, agents] : followers.histogram) hist[std::to_string(count)] = agents;
  return json{{"scorer", scorer},
              {"cells", c},
              {"followers",
               {{"histogram", hist},
                {"agents", followers.agents},
                {"zero_followers", followers.zero_followers},
                {"total_followers", followers.total_followers},
                {"top1_share", followers.top1_share},
                {"top2_share", followers.top2_share}}}};
}

MetricReport MetricReport::from_json(const json& j) {
  try {
    MetricReport r;
    r.scorer = j.at("scorer").get<std::string>();
    for (const auto& [stage, actions] : j.at("cells").items())
      for (const auto& [action, metrics] : actions.items())
        for (const auto& [metric, value] : metrics.items())
          r.cells[stage][action][metric] = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
    const auto& f = j.at("followers");
    for (const auto& [count, agents] : f.at("histogram").items())
      r.followers.histogram[static_cast<std::uint32_t>(std::stoul(count))] = agents.get<std::size_t>();
    r.followers.agents = f.at("agents").get<std::size_t>();
    r.followers.zero_followers = f.at("zero_followers").get<std::size_t>();
    r.followers.total_followers = f.at("total_followers").get<std::uint64_t>();
    r.followers.top1_share = f.at("top1_share").get<double>();
    r.followers.top2_share = f.at("top2_share").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError("report", fmt::format("malformed report.json: {}", e.what()));
  } catch (const std::logic_error& e) {
    throw ParseError("report", fmt::format("malformed report.json: {}", e.what()));
  }
}

namespace {

fs::path require_file(const fs::path& dir, std::string_view name) {
  auto p = dir / name;
  if (!fs::is_regular_file(p)) throw IoError(fmt::format("missing: {}", name));
  return p;
}

json read_json(const fs::path& p) {
  auto j = json::parse(text::read_file(p), nullptr, false);
  if (j.is_discarded()) throw ParseError(p.filename().string(), fmt::format("{} is not valid JSON", p.string()));
  return j;
}

using Cell = std::map<std::string, std::optional<double>>;

Cell empty_cell() {
  Cell c;
  for (auto m : kMetricNames) c[std::string(m)] = std::nullopt;
  return c;
}

std::optional<double> try_distinct(const std::vector<std::string>& texts, std::size_t n) {
  try {
    return distinct_n(texts, n);
  } catch (const MetricError&) {
    return std::nullopt;
  }
}

}  // namespace

MetricReport evaluate_run(const fs::path& run_dir, Scorer& scorer) {
  const auto events_path = require_file(run_dir, "events.jsonl");
  const auto snapshot_path = require_file(run_dir, "snapshot.json");
  const auto config_path = require_file(run_dir, "config.json");

  const auto log = EventLog::read(events_path);
  const auto platform = Platform::from_json(read_json(snapshot_path));
  const auto config = read_json(config_path);
  const Turn h = config.value("stage_hours", 168);

  std::map<std::string, std::string> persona_text;  // handle -> scoring text
  for (const auto& a : platform.accounts()) {
    if (a.kind != AccountKind::regular) continue;
    auto p = require_file(run_dir, "personas/" + a.handle + ".json");
    persona_text[a.handle] = scoring_text(PersonaProfile::from_json(read_json(p)));
  }

  MetricReport report;
  report.scorer = scorer.name();
  report.followers = follower_stats(platform);

  const std::pair<Turn, Turn> windows[] = {{1, h}, {h + 1, 2 * h}};
  for (std::size_t s = 0; s < 2; ++s) {
    const std::string stage(kStageNames[s]);
    const auto [first, last] = windows[s];
    for (Action action : kActions) report.cells[stage][std::string(to_string(action))] = empty_cell();

    for (Action action : {Action::like, Action::reblog, Action::comment}) {
      SideSums engaged, not_engaged;
      for (const auto& [handle, persona] : persona_text) {
        auto part = partition(log, handle, action, first, last);
        for (PostId p : part.engaged) engaged.add(scorer, platform.post(p).body, persona);
        for (PostId p : part.not_engaged) not_engaged.add(scorer, platform.post(p).body, persona);
      }
      auto& cell = report.cells[stage][std::string(to_string(action))];
      if (engaged.n > 0) {
        cell["sim_engaged"] = engaged.sim / static_cast<double>(engaged.n);
        cell["cscore_engaged"] = engaged.c / static_cast<double>(engaged.n);
      }
      if (not_engaged.n > 0) {
        cell["sim_not_engaged"] = not_engaged.sim / static_cast<double>(not_engaged.n);
        cell["cscore_not_engaged"] = not_engaged.c / static_cast<double>(not_engaged.n);
      }
      if (engaged.n > 0 && not_engaged.n > 0) {
        auto d = combine(engaged, not_engaged);
        cell["delta_bs"] = d.delta_bs;
        cell["delta_c"] = d.delta_c;
      }
    }

    std::vector<std::string> comments, posts;
    SideSums authored;
    for (const auto& e : log.events()) {
      if (e.turn < first || e.turn > last || !persona_text.contains(e.actor)) continue;
      if (e.kind == event_kind::comment) comments.push_back(e.payload.value("body", std::string{}));
      if (e.kind == event_kind::post) {
        auto body = e.payload.value("body", std::string{});
        posts.push_back(body);
        authored.add(scorer, body, persona_text[e.actor]);
      }
    }
    auto& comment_cell = report.cells[stage]["comment"];
    comment_cell["distinct_1"] = try_distinct(comments, 1);
    comment_cell["distinct_2"] = try_distinct(comments, 2);
    auto& post_cell = report.cells[stage]["post"];
    post_cell["distinct_1"] = try_distinct(posts, 1);
    post_cell["distinct_2"] = try_distinct(posts, 2);
    if (authored.n > 0) {
      post_cell["sim_engaged"] = authored.sim / static_cast<double>(authored.n);
      post_cell["cscore_engaged"] = authored.c / static_cast<double>(authored.n);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kAbsent = "n/a";

std::string cell_text(const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string(kAbsent); }

}  // namespace

std::string render_csv(const MetricReport& report) {
  std::string out = "stage,action,metric,value\n";
  for (auto stage : kStageNames)
    for (Action action : kActions)
      for (auto metric : kMetricNames)
        out += fmt::format("{},{},{},{}\n", stage, to_string(action), metric,
                           cell_text(report.get(stage, action, metric)));
  return out;
}

std::string render_markdown(const MetricReport& report) {
  std::string out = fmt::format("# Simulation report\n\nScorer: {}\n", report.scorer);
  for (auto stage : kStageNames) {
    out += fmt::format("\n## {}\n\n| action |", stage);
    for (auto metric : kMetricNames) out += fmt::format(" {} |", metric);
    out += "\n|---|";
    for (std::size_t i = 0; i < std::size(kMetricNames); ++i) out += "---:|";
    out += "\n";
    for (Action action : kActions) {
      out += fmt::format("| {} |", to_string(action));
      for (auto metric : kMetricNames) out += fmt::format(" {} |", cell_text(report.get(stage, action, metric)));
      out += "\n";
    }
  }

  const auto& f = report.followers;
  out += fmt::format(
      "\n## Followers of regular agents\n\nAgents: {}, zero followers: {}, total follows: {}, top-1 share: {:.6f}, "
      "top-2 share: {:.6f}\n\n```\n",
      f.agents, f.zero_followers, f.total_followers, f.top1_share, f.top2_share);
  std::size_t widest = 1;
  for (const auto& [count, agents] : f.histogram) widest = std::max(widest, agents);
  for (const auto& [count, agents] : f.histogram) {
    auto bar = std::string((agents * 40 + widest - 1) / widest, '#');
    out += fmt::format("{:>5} | {:<40} {}\n", count, bar, agents);
  }
  out += "```\n";
  return out;
}

void emit_report(const MetricReport& report, const fs::path& dir) {
  text::write_file(dir / "report.csv", render_csv(report));
  text::write_file(dir / "report.md", render_markdown(report));
}

}  // namespace socialsim
