// innonet command-line front end.
//
//   innonet simulate --seed 7 --out corpus/
//   innonet analyze  --input corpus/events.csv --directory corpus/directory.csv --out report/
//
// Every subcommand accepts --config FILE with `key = value` lines using the
// long option names, either bare or under a `[subcommand]` section. Artifacts are staged in memory and renamed into place
// only after the whole run succeeds.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "innonet/innonet.hpp"

namespace fs = std::filesystem;
using namespace innonet;

namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string directory;
  std::string format = "auto";
  std::string out_dir;
  std::string window_start;
  std::string window_end;
  bool no_cross_boundary = false;
  bool no_cc = false;
  double horizon_days = 14.0;
  std::string percentile_scope = "cohort";
  bool symmetrize = false;
  bool pooled_ttest = false;
  std::vector<std::string> stats = {"logit", "ttest", "anova", "tukey", "score"};
  unsigned threads = 0;
  std::string config_file;
};

struct SimConfig {
  std::uint64_t seed = 1;
  int days = 91;
  bool null_profiles = false;
  std::string out_dir;
  std::string directory_out;
  std::string truth_out;
  std::size_t externals = 400;
  std::string config_file;
};

/// Collects artifact contents, then writes `<name>.tmp` files and renames
/// them all at once, so a failed run leaves no partial outputs.
class ArtifactSet {
 public:
  explicit ArtifactSet(fs::path dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, std::string content) { items_.emplace_back(name, std::move(content)); }
  void add_json(const std::string& name, const nlohmann::ordered_json& j) { add(name, j.dump(2) + "\n"); }

  void commit() {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (!fs::is_directory(dir_)) throw ConfigError("output directory is not writable: " + dir_.string());
    std::vector<fs::path> staged;
    try {
      for (const auto& [name, content] : items_) {
        const auto tmp = dir_ / (name + ".tmp");
        std::ofstream out(tmp, std::ios::binary);
        out << content;
        out.close();
        if (!out) throw ConfigError("cannot write " + tmp.string());
        staged.push_back(tmp);
      }
    } catch (...) {
      for (const auto& p : staged) fs::remove(p, ec);
      throw;
    }
    for (std::size_t i = 0; i < items_.size(); ++i) fs::rename(staged[i], dir_ / items_[i].first);
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> items_;
};

Timestamp parse_bound(const std::string& s, const char* what) {
  if (auto t = parse_iso8601(s)) return *t;
  if (auto t = parse_iso8601(s + "T00:00:00Z")) return *t;
  throw ConfigError(std::string("cannot parse ") + what + ": " + s);
}

std::string default_out_dir() {
  if (const char* env = std::getenv("INNONET_OUT_DIR"); env && *env) return env;
  return ".";
}

void validate(const RunConfig& c) {
  if (c.inputs.empty()) throw ConfigError("at least one --input is required");
  for (const auto& in : c.inputs)
    if (in != "-" && !fs::is_regular_file(in)) throw ConfigError("input not found: " + in);
  if (c.directory.empty()) throw ConfigError("--directory is required");
  if (!fs::is_regular_file(c.directory)) throw ConfigError("directory file not found: " + c.directory);
  if (!(c.horizon_days > 0)) throw ConfigError("--horizon-days must be positive");
  if (c.percentile_scope != "cohort" && c.percentile_scope != "all")
    throw ConfigError("--percentile-scope must be 'cohort' or 'all'");
  if (c.format != "auto" && c.format != "mbox" && c.format != "events")
    throw ConfigError("--format must be auto, mbox or events");
  for (const auto& s : c.stats)
    if (s != "logit" && s != "ttest" && s != "anova" && s != "tukey" && s != "score")
      throw ConfigError("unknown --stats entry: " + s);
}

bool wants(const RunConfig& c, const char* what) {
  return std::find(c.stats.begin(), c.stats.end(), what) != c.stats.end();
}

enum class Stage { Ingest, Frames, Metrics, Score, Stats, Analyze };

int run(Stage stage, const RunConfig& cfg) {
  // A producer piped into stdin may still be writing the directory file;
  // its first byte on stdin means that file is complete.
  if (std::find(cfg.inputs.begin(), cfg.inputs.end(), "-") != cfg.inputs.end()) std::cin.peek();
  validate(cfg);
  ActorDirectory dir;
  {
    std::ifstream in(cfg.directory);
    dir = read_directory(in);
  }
  IngestDiagnostics diag;
  const InputFormat fmt = cfg.format == "mbox" ? InputFormat::Mbox
                          : cfg.format == "events" ? InputFormat::EventLog
                                                   : InputFormat::Auto;
  auto parsed = parse_files(cfg.inputs, dir, diag, fmt);

  PipelineOptions opt;
  if (!cfg.window_start.empty()) opt.policy.start = parse_bound(cfg.window_start, "--window-start");
  if (!cfg.window_end.empty()) opt.policy.end = parse_bound(cfg.window_end, "--window-end");
  opt.policy.keep_cross_boundary_edges = !cfg.no_cross_boundary;
  opt.policy.cc_counts_as_recipient = !cfg.no_cc;
  opt.frames.horizon_days = cfg.horizon_days;
  opt.frames.threads = cfg.threads;
  opt.betweenness.symmetrize = cfg.symmetrize;
  opt.betweenness.threads = cfg.threads;
  opt.scope = cfg.percentile_scope == "all" ? PercentileScope::AllNodes : PercentileScope::Cohort;

  ArtifactSet art(cfg.out_dir.empty() ? default_out_dir() : cfg.out_dir);
  if (stage == Stage::Ingest) {
    auto cohort = apply_cohort(dedupe_and_normalize(std::move(parsed.events), &diag), dir, opt.policy, &diag);
    std::ostringstream ev, dr;
    write_event_log(ev, cohort.events, dir);
    write_directory(dr, dir);
    auto j = diag.to_json();
    j["cohort_size"] = cohort.cohort.size();
    art.add_json("diagnostics.json", j);
    art.add("events.csv", ev.str());
    art.add("directory_resolved.csv", dr.str());
    art.commit();
    return 0;
  }

  const auto result = run_pipeline(std::move(parsed.events), dir, opt, &diag);
  auto dj = diag.to_json();
  dj["cohort_size"] = result.cohort.size();
  art.add_json("diagnostics.json", dj);

  const bool all = stage == Stage::Analyze;
  if (all) {
    std::ostringstream ev, dr;
    write_event_log(ev, result.events, dir);
    write_directory(dr, dir);
    art.add("events.csv", ev.str());
    art.add("directory_resolved.csv", dr.str());
  }
  if (stage == Stage::Frames || all) {
    std::ostringstream fr;
    write_frames(fr, result.frames, dir);
    art.add("frames.csv", fr.str());
    art.add_json("frame_diagnostics.json", frame_diagnostics(result.frames, cfg.horizon_days));
  }
  if (stage == Stage::Metrics || all) {
    std::ostringstream mt, gr;
    write_metric_table(mt, result.rows, dir);
    write_graph(gr, result.graph, dir);
    art.add("metrics.csv", mt.str());
    art.add("graph.csv", gr.str());
  }
  if (stage == Stage::Score || ((stage == Stage::Stats || all) && wants(cfg, "score"))) {
    std::ostringstream sc;
    write_scores(sc, rank_by_admin_score(result.rows), dir);
    art.add("scores.csv", sc.str());
  }
  if (stage == Stage::Stats || all) {
    if (wants(cfg, "logit")) art.add_json("table2_logit.json", logit_report(result.rows));
    if (wants(cfg, "anova") || wants(cfg, "tukey")) {
      auto j = anova_report(result.rows);
      if (!wants(cfg, "tukey"))
        for (auto& m : j["metrics"]) m.erase("tukey");
      art.add_json("table3_anova.json", j);
    }
    if (wants(cfg, "ttest")) art.add_json("figure2_ttests.json", ttest_report(result.rows, cfg.pooled_ttest));
  }
  art.commit();
  return 0;
}

int simulate(const SimConfig& sc) {
  auto cfg = sc.null_profiles ? null_synth_config(sc.seed) : default_synth_config(sc.seed);
  if (sc.days < 1) throw ConfigError("--days must be at least 1");
  cfg.days = sc.days;
  cfg.external_actor_count = sc.externals;
  auto out = generate(cfg);
  auto events = dedupe_and_normalize(std::move(out.events));
  std::ostringstream ev, dr;
  write_event_log(ev, events, out.directory);
  write_directory(dr, out.directory);
  if (sc.out_dir.empty()) {
    if (sc.directory_out.empty()) throw ConfigError("simulate: give --out DIR, or --directory-out FILE to stream events");
    ArtifactSet side(fs::path(sc.directory_out).parent_path().empty() ? fs::path(".")
                                                                       : fs::path(sc.directory_out).parent_path());
    side.add(fs::path(sc.directory_out).filename().string(), dr.str());
    if (!sc.truth_out.empty()) side.add(fs::path(sc.truth_out).filename().string(), out.ground_truth.dump(2) + "\n");
    side.commit();
    std::cout << ev.str();
    std::cout.flush();
    return 0;
  }
  ArtifactSet art(sc.out_dir);
  art.add("events.csv", ev.str());
  art.add("directory.csv", dr.str());
  art.add_json("ground_truth.json", out.ground_truth);
  art.commit();
  return 0;
}

void add_run_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("-i,--input", c.inputs, "mbox or event-log files ('-' reads stdin)");
  cmd->add_option("-d,--directory", c.directory, "actor directory (address,internal,rank,label)");
  cmd->add_option("--format", c.format, "auto | mbox | events");
  cmd->add_option("-o,--out", c.out_dir, "output directory (default $INNONET_OUT_DIR or .)");
  cmd->add_option("--window-start", c.window_start, "observation window start (ISO-8601)");
  cmd->add_option("--window-end", c.window_end, "observation window end (ISO-8601)");
  cmd->add_flag("--no-cross-boundary", c.no_cross_boundary, "drop edges touching external actors");
  cmd->add_flag("--no-cc", c.no_cc, "do not count CC recipients");
  cmd->add_option("--horizon-days", c.horizon_days, "frame censoring horizon in days");
  cmd->add_option("--percentile-scope", c.percentile_scope, "cohort | all");
  cmd->add_flag("--symmetrize", c.symmetrize, "betweenness on the symmetrized graph");
  cmd->add_flag("--pooled-ttest", c.pooled_ttest, "pooled-variance t-tests instead of Welch");
  cmd->add_option("--stats", c.stats, "subset of logit,ttest,anova,tukey,score")->delimiter(',');
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  cmd->add_option("--config", c.config_file, "key = value configuration file");
}

/// Replaces `--config FILE` after the subcommand with the options the file
/// lists. They are spliced in right after the subcommand name, so anything
/// given explicitly on the command line is parsed later and wins. Keys may be
/// bare or sit in a section named after the subcommand.
std::vector<std::string> expand_config(std::vector<std::string> args, const std::vector<std::string>& subcommands) {
  const auto sub = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
    return std::find(subcommands.begin(), subcommands.end(), a) != subcommands.end();
  });
  if (sub == args.end()) return args;
  const std::size_t at = static_cast<std::size_t>(sub - args.begin());
  const std::string name = *sub;
  std::vector<std::string> injected;
  for (std::size_t i = at + 1; i < args.size();) {
    std::string file;
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
      continue;
    }
    if (!fs::is_regular_file(file)) throw ConfigError("config file not found: " + file);
    for (const auto& item : CLI::ConfigTOML().from_file(file)) {
      if (item.name == "++" || item.name == "--") continue;
      if (!item.parents.empty() && !(item.parents.size() == 1 && (item.parents[0] == name || item.parents[0] == "default")))
        continue;
      if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
        if (item.inputs[0] == "true") injected.push_back("--" + item.name);
        continue;
      }
      injected.push_back("--" + item.name);
      injected.insert(injected.end(), item.inputs.begin(), item.inputs.end());
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at) + 1, injected.begin(), injected.end());
  return args;
}

int emit_error(const std::string& kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["status"] = "error";
  j["kind"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  if (kind == "config_error") return 2;
  if (kind == "input_error") return 3;
  if (kind == "analysis_error") return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"innonet: email communication-network metrics and innovator statistics"};
  app.require_subcommand(1);
  RunConfig rc;
  SimConfig sim;
  struct Cmd {
    const char* name;
    const char* help;
    Stage stage;
  };
  const Cmd cmds[] = {
      {"ingest", "parse, deduplicate and filter events", Stage::Ingest},
      {"frames", "reconstruct conversation frames", Stage::Frames},
      {"metrics", "compute the per-actor metric table", Stage::Metrics},
      {"score", "rank cohort members by the administrator model", Stage::Score},
      {"stats", "logit, t-test, ANOVA and Tukey reports", Stage::Stats},
      {"analyze", "full pipeline, every artifact", Stage::Analyze},
  };
  std::vector<std::pair<CLI::App*, Stage>> stages;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_run_options(sub, rc);
    stages.emplace_back(sub, c.stage);
  }
  auto* simc = app.add_subcommand("simulate", "generate a synthetic corpus");
  simc->add_option("--seed", sim.seed, "RNG seed");
  simc->add_option("--days", sim.days, "observation days");
  simc->add_option("--externals", sim.externals, "external actor count");
  simc->add_flag("--null", sim.null_profiles, "every role behaves like NONE");
  simc->add_option("-o,--out", sim.out_dir, "output directory");
  simc->add_option("--directory-out", sim.directory_out, "directory file when streaming events to stdout");
  simc->add_option("--truth-out", sim.truth_out, "ground-truth file when streaming events to stdout");
  simc->add_option("--config", sim.config_file, "key = value configuration file");

  try {
    std::vector<std::string> names{"simulate"};
    for (const auto& c : cmds) names.emplace_back(c.name);
    auto args = expand_config(std::vector<std::string>(argv + 1, argv + argc), names);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const ConfigError& e) {
    return emit_error("config_error", e.what());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("config_error", e.what());
  }

  try {
    if (simc->parsed()) return simulate(sim);
    for (const auto& [sub, stage] : stages)
      if (sub->parsed()) return run(stage, rc);
  } catch (const Error& e) {
    return emit_error(e.kind(), e.what());
  } catch (const std::exception& e) {
    return emit_error("internal_error", e.what());
  }
  return 0;
}
