#include "socialsim/cli.hpp"

#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "socialsim/config.hpp"
#include "socialsim/evaluation.hpp"
#include "socialsim/orchestrator.hpp"
#include "socialsim/persona.hpp"
#include "socialsim/retrieval.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

void error_line(std::ostream& err, std::string_view kind, std::string_view message) {
  err << fmt::format("error: kind={} message=\"{}\"\n", kind, escape(message));
}

struct EnrichArgs {
  std::string seeds, out, backend = "heuristic", fixtures;
};
struct IngestArgs {
  std::string hotpotqa, out;
};
struct RunArgs {
  std::string config, out, backend, fixtures, record_fixtures;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_k, t_p;
  std::optional<int> n_initial, n_regular, stage_hours;
};
struct EvaluateArgs {
  std::string run, scorer = "mock", sidecar_url;
};
struct ReportArgs {
  std::string run;
};

int do_enrich(const EnrichArgs& a, std::ostream& out) {
  SimConfig c;
  c.backend = a.backend;
  if (!a.fixtures.empty()) c.fixtures = a.fixtures;
  c.validate();
  auto backend = make_backend(c);
  auto seeds = read_persona_seeds(a.seeds);
  if (seeds.empty()) throw ValidationError(fmt::format("no persona seeds in {}", a.seeds));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    auto handle = fmt::format("persona_{:03}", i + 1);
    auto profile = enrich_persona(seeds[i], *backend, handle + ":0");
    text::write_file(fs::path(a.out) / (handle + ".json"), profile.to_json().dump(2) + "\n");
  }
  out << fmt::format("enriched {} personas into {}\n", seeds.size(), a.out);
  return kExitOk;
}

int do_ingest(const IngestArgs& a, std::ostream& out) {
  auto corpus = convert_hotpotqa(a.hotpotqa);
  write_knowledge(corpus, a.out);
  out << fmt::format("wrote {} knowledge entries to {}\n", corpus.size(), a.out);
  return kExitOk;
}

int do_run(const RunArgs& a, std::ostream& out) {
  ConfigOverrides o;
  o.seed = a.seed;
  if (!a.backend.empty()) o.backend = a.backend;
  o.t_k = a.t_k;
  o.t_p = a.t_p;
  o.n_initial = a.n_initial;
  o.n_regular = a.n_regular;
  o.stage_hours = a.stage_hours;
  if (!a.fixtures.empty()) o.fixtures = a.fixtures;
  if (!a.record_fixtures.empty()) o.record_fixtures = a.record_fixtures;
  auto config = load_config(a.config, o);
  if (config.persona_seeds.empty()) throw ConfigError("persona_seeds: required to run an experiment");
  auto result = run_experiment(config, a.out);
  out << fmt::format("run complete: {} posts, {} events in {}\n", result.posts, result.events, a.out);
  return kExitOk;
}

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  auto scorer = make_scorer(a.scorer, a.sidecar_url);
  auto report = evaluate_run(a.run, *scorer);
  text::write_file(fs::path(a.run) / "report.json", report.to_json().dump(2) + "\n");
  out << fmt::format("wrote {}\n", (fs::path(a.run) / "report.json").string());
  return kExitOk;
}

int do_report(const ReportArgs& a, std::ostream& out) {
  auto path = fs::path(a.run) / "report.json";
  if (!fs::is_regular_file(path)) throw IoError("missing: report.json");
  auto doc = json::parse(text::read_file(path), nullptr, false);
  if (doc.is_discarded()) throw ParseError("report", "report.json is not valid JSON");
  emit_report(MetricReport::from_json(doc), a.run);
  out << fmt::format("wrote report.csv and report.md in {}\n", a.run);
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Turn-based social media simulation with persona-grounded agents", "socialsim"};
  app.require_subcommand(1);

  EnrichArgs enrich;
  auto* c_enrich = app.add_subcommand("enrich", "Enrich persona seeds into persona documents");
  c_enrich->add_option("--seeds", enrich.seeds, "Seed file (blank-line separated blocks)")->required();
  c_enrich->add_option("--out", enrich.out, "Output directory")->required();
  c_enrich->add_option("--backend", enrich.backend, "heuristic | scripted | remote");
  c_enrich->add_option("--fixtures", enrich.fixtures, "Fixture table for the scripted backend");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Convert a HotpotQA dump into a knowledge file");
  c_ingest->add_option("--hotpotqa", ingest.hotpotqa, "HotpotQA JSON or JSON Lines")->required();
  c_ingest->add_option("--out", ingest.out, "Knowledge JSON Lines output")->required();

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Run a two-stage experiment");
  c_run->add_option("--config", run.config, "Config JSON")->required();
  c_run->add_option("--out", run.out, "Run directory")->required();
  c_run->add_option("--seed", run.seed, "Random seed");
  c_run->add_option("--backend", run.backend, "heuristic | scripted | remote");
  c_run->add_option("--t-k", run.t_k, "Knowledge adoption threshold");
  c_run->add_option("--t-p", run.t_p, "Post duplication threshold");
  c_run->add_option("--n-initial", run.n_initial, "Initial agents");
  c_run->add_option("--n-regular", run.n_regular, "Regular agents");
  c_run->add_option("--stage-hours", run.stage_hours, "Turns per stage");
  c_run->add_option("--fixtures", run.fixtures, "Fixture table for the scripted backend");
  c_run->add_option("--record-fixtures", run.record_fixtures, "Record every completion into this fixture file");

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Compute metrics for a run directory");
  c_eval->add_option("--run", evaluate.run, "Run directory")->required();
  c_eval->add_option("--scorer", evaluate.scorer, "mock | sidecar");
  c_eval->add_option("--sidecar-url", evaluate.sidecar_url, "Base URL of the scoring sidecar");

  ReportArgs report;
  auto* c_report = app.add_subcommand("report", "Write report.csv and report.md for an evaluated run");
  c_report->add_option("--run", report.run, "Run directory")->required();

  std::vector<std::string> argv_store{"socialsim"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_line(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (*c_enrich) return do_enrich(enrich, out);
    if (*c_ingest) return do_ingest(ingest, out);
    if (*c_run) return do_run(run, out);
    if (*c_eval) return do_evaluate(evaluate, out);
    if (*c_report) return do_report(report, out);
  } catch (const ConfigError& e) {
    error_line(err, e.kind(), e.what());
    return kExitUsage;
  } catch (const Error& e) {
    error_line(err, e.kind(), e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    error_line(err, "internal", e.what());
    return kExitRuntime;
  }
  error_line(err, "usage", "no subcommand given");
  return kExitUsage;
}

}  // namespace socialsim
