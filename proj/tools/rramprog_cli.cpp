#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rramprog/config.hpp"
#include "rramprog/output.hpp"

namespace fs = std::filesystem;
using namespace rramprog;
using nlohmann::ordered_json;

namespace {

constexpr const char *kOutRootEnv = "RRAMPROG_OUT_ROOT";

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string policy;
  std::optional<int> states;
  std::optional<int> replicas;
  std::optional<int> threads;
  int state = 0; // single-crossbar subcommands
};

void add_common(CLI::App *cmd, CommonOptions &o) {
  cmd->add_option("--config", o.config_path, "Key-value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Base seed (replaces experiment.seed and clears experiment.seeds)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--policy", o.policy, "Restrict to one policy")->check(CLI::IsMember({"naive", "relax-aware"}));
  cmd->add_option("--states", o.states, "Number of conductance states")->check(CLI::PositiveNumber);
  cmd->add_option("--replicas", o.replicas, "Number of seeds")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

RunConfig load(const CommonOptions &o) {
  RunConfig cfg = o.config_path.empty() ? parse_config_text("") : parse_config(o.config_path);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.seeds.clear();
  }
  if (o.replicas) {
    cfg.replicas = *o.replicas;
    cfg.seeds.clear();
  }
  if (o.states) cfg.interval_plan.n_states = *o.states;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.policy.empty()) cfg.policies = {parse_policy_variant(o.policy)};
  cfg.validate();
  return cfg;
}

fs::path output_dir(const CommonOptions &o, const RunConfig &cfg, const std::string &command) {
  if (!o.out.empty()) return o.out;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  const char *root = std::getenv(kOutRootEnv);
  return fs::path(root && *root ? root : "rramprog-out") / command;
}

std::string fixed(double v) { return format_fixed(v, 6); }

Crossbar formed_crossbar(const RunConfig &cfg) {
  CrossbarConfig cc = cfg.crossbar;
  cc.device.master_seed = crossbar_seed(cfg.seed_manifest().front(), 0);
  Crossbar cb(cc);
  cb.form_all();
  return cb;
}

Assignment assignment_for(const RunConfig &cfg, const Crossbar &cb, int state) {
  if (cfg.assignment_mode == AssignmentMode::Pattern) return cfg.pattern;
  return uniform_assignment(cb, state);
}

std::string single_traces_csv(const std::string &policy, const std::vector<ProgramTrace> &traces) {
  std::string out = "policy,replica,state,row,col,iteration,op,pulse_width_ns,cp,g_read_uS,waited\n";
  for (const auto &t : traces)
    for (const auto &r : t.records)
      out += policy + ",0," + std::to_string(t.target.n) + "," + std::to_string(t.cell.row) + "," +
             std::to_string(t.cell.col) + "," + std::to_string(r.iteration) + "," + std::string(to_string(r.op)) + "," +
             std::to_string(r.pulse_width_ns) + "," + std::to_string(r.cp_after) + "," +
             (r.op == TraceOp::Read ? fixed(r.g_read_us) : std::string()) + "," + (r.waited ? "1" : "0") + "\n";
  return out;
}

ordered_json outcomes_json(const std::vector<ProgramTrace> &traces) {
  ordered_json arr = ordered_json::array();
  for (const auto &t : traces)
    arr.push_back({{"row", t.cell.row},
                   {"col", t.cell.col},
                   {"state", t.target.n},
                   {"converged", t.converged()},
                   {"final_g_uS", t.outcome.final_g_us},
                   {"final_erase_width_ns", t.outcome.final_erase_width_ns},
                   {"iterations", t.outcome.n_iterations},
                   {"wait_branches", t.outcome.n_wait_branches},
                   {"failure_reason", t.outcome.failure_reason}});
  return arr;
}

ordered_json base_doc(const RunConfig &cfg) {
  ordered_json doc;
  doc["tool"] = "rramprog";
  doc["config_fingerprint"] = config_fingerprint(cfg);
  doc["config"] = ordered_json::parse(config_echo_json(cfg));
  doc["seed"] = cfg.seed_manifest().front();
  return doc;
}

int cmd_form_check(const CommonOptions &o) {
  const RunConfig cfg = load(o);
  const fs::path dir = output_dir(o, cfg, "form-check");
  Crossbar cb = formed_crossbar(cfg);
  std::string csv = "row,col,g_true_uS,g_read_uS\n";
  std::vector<double> reads;
  for (int r = 0; r < cb.rows(); ++r)
    for (int c = 0; c < cb.cols(); ++c) {
      const CellIndex cell{r, c};
      const double g_true = cb.true_conductance(cell);
      const double g_read = cb.read(cell).g_us;
      reads.push_back(g_read);
      csv += std::to_string(r) + "," + std::to_string(c) + "," + fixed(g_true) + "," + fixed(g_read) + "\n";
    }
  std::vector<double> sorted = reads;
  std::sort(sorted.begin(), sorted.end());
  double mean = 0.0;
  for (double g : reads) mean += g / static_cast<double>(reads.size());
  ordered_json doc = base_doc(cfg);
  doc["devices"] = reads.size();
  doc["g_min_uS"] = sorted.front();
  doc["g_median_uS"] = sorted[sorted.size() / 2];
  doc["g_mean_uS"] = mean;
  doc["g_max_uS"] = sorted.back();
  write_file_atomic(dir / "formed.csv", csv);
  write_file_atomic(dir / "form_check.json", doc.dump(2) + "\n");
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_program(const CommonOptions &o, bool retention) {
  const RunConfig cfg = load(o);
  const fs::path dir = output_dir(o, cfg, retention ? "retention" : "program");
  const auto intervals = cfg.intervals();
  if (o.state < 0 || o.state >= static_cast<int>(intervals.size()))
    throw Error(ErrorCode::ValidationError, "--state must be in [0, " + std::to_string(intervals.size()) + ")");
  const PolicyVariant variant = cfg.policies.front();
  Crossbar cb = formed_crossbar(cfg);
  const auto traces = program_array(cb, assignment_for(cfg, cb, o.state), intervals, cfg.policy(variant));

  ordered_json doc = base_doc(cfg);
  doc["policy"] = std::string(to_string(variant));
  doc["programming_end_s"] = cb.clock().seconds();
  doc["devices"] = outcomes_json(traces);
  write_file_atomic(dir / "traces.csv", single_traces_csv(std::string(to_string(variant)), traces));

  if (retention) {
    std::vector<CellIndex> cells;
    for (const auto &t : traces) cells.push_back(t.cell);
    const auto series = retention_curve(cb, cells, cfg.checkpoints_s);
    std::string csv = "row,col,state,t_s,g_uS\n";
    for (std::size_t i = 0; i < series.size(); ++i)
      for (const auto &p : series[i].points)
        csv += std::to_string(series[i].cell.row) + "," + std::to_string(series[i].cell.col) + "," +
               std::to_string(traces[i].target.n) + "," + fixed(p.t_s) + "," + fixed(p.g_us) + "\n";
    write_file_atomic(dir / "retention.csv", csv);
  }
  write_file_atomic(dir / (retention ? "retention.json" : "program.json"), doc.dump(2) + "\n");
  std::cout << dir.string() << "\n";
  return 0;
}

void write_report(const fs::path &dir, const RunConfig &cfg) {
  const ExperimentReport report = run_experiment(cfg.experiment());
  write_file_atomic(dir / "traces.csv", traces_csv(report, cfg));
  write_file_atomic(dir / "histograms.csv", histograms_csv(report, cfg));
  write_file_atomic(dir / "report.json", report_json(report, cfg));
}

int cmd_report(const CommonOptions &o) {
  const RunConfig cfg = load(o);
  const fs::path dir = output_dir(o, cfg, "report");
  write_report(dir, cfg);
  std::cout << dir.string() << "\n";
  return 0;
}

// Zero delay is the naive policy; any other delay runs the relax-aware policy.
RunConfig sweep_point(RunConfig cfg, double delta_t_s) {
  if (delta_t_s == 0.0) {
    cfg.policies = {PolicyVariant::Naive};
  } else {
    cfg.policies = {PolicyVariant::RelaxAware};
    cfg.delta_t = SimTime::from_seconds(delta_t_s);
  }
  cfg.validate();
  return cfg;
}

int cmd_sweep(const CommonOptions &o, std::vector<double> deltas) {
  const RunConfig base = load(o);
  const fs::path dir = output_dir(o, base, "sweep");
  std::sort(deltas.begin(), deltas.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  ordered_json index = ordered_json::array();
  for (double dt : deltas) {
    if (!(dt >= 0.0)) throw Error(ErrorCode::ValidationError, "sweep delays must be >= 0");
    const RunConfig cfg = sweep_point(base, dt);
    const std::string name = "dt_" + format_fixed(dt, 3) + "s";
    write_report(dir / name, cfg);
    index.push_back({{"delta_t_s", dt},
                     {"policy", std::string(to_string(cfg.policies.front()))},
                     {"config_fingerprint", config_fingerprint(cfg)},
                     {"report", name + "/report.json"}});
  }
  ordered_json doc;
  doc["tool"] = "rramprog";
  doc["sweep"] = index;
  write_file_atomic(dir / "sweep.json", doc.dump(2) + "\n");
  std::cout << dir.string() << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Closed-loop RRAM crossbar programming simulator"};
  app.require_subcommand(1);

  CommonOptions form_opts, program_opts, retention_opts, report_opts, sweep_opts;
  std::vector<double> deltas{0.0, 1.0, 5.0, 10.0};

  auto *form = app.add_subcommand("form-check", "Form a fresh array and read every device");
  add_common(form, form_opts);
  auto *program = app.add_subcommand("program", "Program one array to one state and write its traces");
  add_common(program, program_opts);
  program->add_option("--state", program_opts.state, "Target state index (uniform assignment)");
  auto *retention = app.add_subcommand("retention", "Program one array then read it at every checkpoint");
  add_common(retention, retention_opts);
  retention->add_option("--state", retention_opts.state, "Target state index (uniform assignment)");
  auto *report = app.add_subcommand("report", "Run the full experiment and write traces, report and histograms");
  report->alias("run");
  add_common(report, report_opts);
  auto *sweep = app.add_subcommand("sweep", "Run the experiment once per relaxation delay");
  add_common(sweep, sweep_opts);
  sweep->add_option("--delta-t", deltas, "Delays in seconds; 0 runs the naive policy")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (*form) return cmd_form_check(form_opts);
    if (*program) return cmd_program(program_opts, false);
    if (*retention) return cmd_program(retention_opts, true);
    if (*report) return cmd_report(report_opts);
    if (*sweep) return cmd_sweep(sweep_opts, deltas);
  } catch (const Error &e) {
    std::cerr << error_json(std::string(to_string(e.code())), e.what());
    return 2;
  } catch (const std::exception &e) {
    std::cerr << error_json("InternalError", e.what());
    return 3;
  }
  return 1;
}
