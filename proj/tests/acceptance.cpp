// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "flowchart_oracle.hpp"
#include "test_support.hpp"

#include "rramprog/config.hpp"
#include "rramprog/output.hpp"

using namespace rramprog;
using namespace rramprog::test;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int decimals = 3) { return format_fixed(v, decimals); }

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Verdict half_select() {
  const auto t0 = std::chrono::steady_clock::now();
  CrossbarConfig c;
  c.device.master_seed = 2024;
  Crossbar cb(c);
  cb.form_all();
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> idx(0, 7), kind(0, 2), cp(1, 40);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const CellIndex target{idx(gen), idx(gen)};
    const std::vector<DeviceState> before(cb.devices().begin(), cb.devices().end());
    switch (kind(gen)) {
    case 0: cb.apply(ArrayOp::write(), target); break;
    case 1: cb.apply(ArrayOp::erase(cp(gen)), target); break;
    default: (void)cb.read(target); break;
    }
    for (int r = 0; r < 8; ++r)
      for (int col = 0; col < 8; ++col)
        if (!(CellIndex{r, col} == target) && !(cb.device({r, col}) == before[static_cast<std::size_t>(r * 8 + col)]))
          ++violations;
  }
  const double t = elapsed_s(t0);
  return {violations == 0 && t < 1.0, "violations=" + std::to_string(violations) + " runtime_s=" + num(t)};
}

Verdict sense_round_trip() {
  const double bias = ProtocolTable::defaults().read_bias();
  SensePath ideal;
  ideal.quantize = false;
  SensePath adc;
  adc.r_sense_ohm = 10e3; // the 0.0977 uS LSB configuration
  const double lsb = adc.conductance_lsb_us(bias);
  double worst_rel = 0.0, worst_lsb = 0.0;
  for (int i = 1; i <= 4000; ++i) {
    const double g = 0.1 * i; // 0.1 .. 400 uS
    worst_rel = std::max(worst_rel, std::abs(sense_conductance(ideal, g, bias).g_us - g) / g);
    worst_lsb = std::max(worst_lsb, std::abs(sense_conductance(adc, g, bias).g_us - g) / lsb);
  }
  // Also through the crossbar read path with noise off.
  CrossbarConfig c = noiseless_crossbar();
  Crossbar cb(c);
  cb.form_all();
  for (int r = 0; r < 8; ++r) {
    const double g = cb.read({r, r}).g_us;
    const double truth = conductance_at(cb.device({r, r}), cb.clock(), c.device);
    worst_rel = std::max(worst_rel, std::abs(g - truth) / truth);
  }
  return {worst_rel <= 1e-12 && worst_lsb <= 0.5,
          "max_rel_err=" + std::to_string(worst_rel) + " max_err_lsb=" + num(worst_lsb, 4)};
}

Verdict protocol_fidelity() {
  const std::string text = emit_config(parse_config_text(""));
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  struct Row {
    const char *key;
    double wl, sl, bl;
  };
  const Row rows[] = {
      {"protocol.form.active", 1.55, 0.0, 4.8},   {"protocol.form.inactive", 0.0, 4.8, 2.4},
      {"protocol.write.active", 1.24, 0.0, 2.4},  {"protocol.write.inactive", 0.0, 2.4, 2.4},
      {"protocol.erase.active", 4.05, 1.07, 0.0}, {"protocol.erase.inactive", 0.0, 0.0, 2.4},
      {"protocol.read.active", 3.38, 2.1, 2.4},   {"protocol.read.inactive", 0.0, 2.4, 2.4},
      {"protocol.standby", 0.0, 2.4, 2.4},
  };
  int voltages = 0, mismatches = 0;
  auto same = [&](const std::string &key, double want) {
    const auto it = kv.find(key);
    if (it == kv.end() || std::stod(it->second) != want) ++mismatches;
  };
  for (const Row &r : rows) {
    same(std::string(r.key) + ".v_wl", r.wl);
    same(std::string(r.key) + ".v_sl", r.sl);
    same(std::string(r.key) + ".v_bl", r.bl);
    voltages += 3;
  }
  same("protocol.form.width_ns", 40'000);
  same("protocol.write.width_ns", 100);
  same("protocol.read.width_ns", 200'000);
  same("protocol.erase.width_ns", 10); // per CP unit
  const ProtocolTable t = parse_config_text(text).crossbar.protocol;
  for (int cp = 1; cp <= 50; ++cp)
    if (t.erase_width_ns(cp) != 10 * cp || make_pulse(t, PulseKind::Erase, cp).width_ns != 10 * cp) ++mismatches;
  return {mismatches == 0 && voltages == 27,
          "voltage_entries=" + std::to_string(voltages) + " widths=4 cp_rule=1..50 mismatches=" + std::to_string(mismatches)};
}

Verdict erase_monotonicity() {
  const auto t0 = std::chrono::steady_clock::now();
  const DeviceParams p;
  const ProtocolTable table = ProtocolTable::defaults();
  std::vector<double> widths, means;
  for (int cp = 1; cp <= 30; ++cp) {
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      DeviceState s = make_device(p, static_cast<std::uint64_t>(cp) * 1'000'003 + static_cast<std::uint64_t>(i));
      s = form(s, make_pulse(table, PulseKind::Form), p, {});
      s.g_anchor = 80.0;
      s.amp_short = s.amp_long = 0.0;
      sum += erase(s, make_pulse(table, PulseKind::Erase, cp), p, {}).g_anchor;
    }
    widths.push_back(10.0 * cp);
    means.push_back(sum / n);
  }
  const double rho = spearman(widths, means);
  const double t = elapsed_s(t0);
  return {rho <= -0.95 && t < 10.0, "spearman=" + num(rho) + " runtime_s=" + num(t)};
}

Verdict oracle_equivalence() {
  int matched = 0, total = 0;
  bool decrement = false;
  for (const auto &s : oracle_scenarios()) {
    CrossbarConfig c = noiseless_crossbar();
    c.device.tau_erase_median = s.tau_erase;
    Crossbar cb(c);
    cb.form_all();
    ProgramPolicy p;
    p.variant = s.variant;
    p.cp_floor = s.cp_floor;
    p.max_iterations = s.max_iterations;
    const double g0 = cb.true_conductance({3, 6});
    const ProgramTrace got = program_device(cb, {3, 6}, s.target, p);
    const ProgramTrace want = flowchart_oracle(g0, s.target, p, c.device, c.timing.read_pulse.ns());
    ++total;
    if (traces_match(got, want)) ++matched;
    decrement = decrement || (has_decrement_then_write(want) && traces_match(got, want));
  }
  return {matched == total && total >= 10 && decrement,
          "scenarios=" + std::to_string(total) + " matched=" + std::to_string(matched) +
              " decrement_then_write=" + (decrement ? "yes" : "no")};
}

struct Calibrated {
  RunConfig cfg;
  ExperimentReport report;
  double runtime_s = 0.0;
  const PolicyReport &policy(PolicyVariant v) const {
    for (const auto &p : report.policies)
      if (p.policy.variant == v) return p;
    throw std::runtime_error("policy missing from report");
  }
};

const Calibrated &calibrated() {
  static const Calibrated c = [] {
    Calibrated out;
    out.cfg = parse_config_text("");
    out.cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto t0 = std::chrono::steady_clock::now();
    out.report = run_experiment(out.cfg.experiment());
    out.runtime_s = elapsed_s(t0);
    return out;
  }();
  return c;
}

std::vector<double> state_axis(const PolicyReport &p) {
  std::vector<double> x;
  for (const auto &s : p.states) x.push_back(s.n);
  return x;
}

Verdict afepw_trend() {
  const auto &c = calibrated();
  std::string detail;
  bool pass = c.runtime_s < 120.0;
  for (auto v : {PolicyVariant::Naive, PolicyVariant::RelaxAware}) {
    const auto &p = c.policy(v);
    std::vector<double> afepw;
    for (const auto &s : p.states) afepw.push_back(s.afepw_ns);
    const double rho = spearman(state_axis(p), afepw);
    pass = pass && rho <= -0.9;
    detail += std::string(to_string(v)) + "_spearman=" + num(rho) + " ";
  }
  return {pass, detail + "devices=64 seeds=" + std::to_string(c.cfg.seed_manifest().size()) + " runtime_s=" + num(c.runtime_s)};
}

Verdict wait_trend() {
  const auto &p = calibrated().policy(PolicyVariant::RelaxAware);
  std::vector<double> waits;
  for (const auto &s : p.states) waits.push_back(s.mean_wait_branches);
  const double rho = spearman(state_axis(p), waits);
  return {rho >= 0.8, "relax-aware_spearman=" + num(rho) + " first=" + num(waits.front(), 2) + " last=" + num(waits.back(), 2)};
}

Verdict level_count() {
  const auto &c = calibrated();
  auto at_1ks = [&](PolicyVariant v) {
    for (const auto &s : c.policy(v).separability)
      if (s.t_s == 1000.0) return s.k_sigma;
    throw std::runtime_error("no 1000 s checkpoint");
  };
  const auto aware = at_1ks(PolicyVariant::RelaxAware);
  const auto naive = at_1ks(PolicyVariant::Naive);
  const double n = static_cast<double>(aware.size());
  const double aware_frac = static_cast<double>(std::count_if(aware.begin(), aware.end(), [](int k) { return k >= 4; })) / n;
  const double naive_frac = static_cast<double>(std::count_if(naive.begin(), naive.end(), [](int k) { return k == 3; })) / n;
  return {aware_frac >= 0.9 && naive_frac >= 0.8,
          "relax-aware_ge4=" + num(aware_frac, 2) + " naive_eq3=" + num(naive_frac, 2)};
}

Verdict iteration_plausibility() {
  const auto &c = calibrated();
  const auto &naive = c.policy(PolicyVariant::Naive);
  const auto &aware = c.policy(PolicyVariant::RelaxAware);
  bool in_range = true;
  int aware_ge = 0;
  double lo = 1e9, hi = 0.0;
  for (std::size_t s = 0; s < naive.states.size(); ++s) {
    for (double m : {naive.states[s].mean_iterations, aware.states[s].mean_iterations}) {
      in_range = in_range && m >= 2.0 && m <= 40.0;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    if (aware.states[s].mean_iterations >= naive.states[s].mean_iterations) ++aware_ge;
  }
  return {in_range && aware_ge >= 7,
          "mean_iterations_range=[" + num(lo, 2) + ", " + num(hi, 2) + "] relax-aware_ge_naive_states=" + std::to_string(aware_ge)};
}

Verdict timing_accounting() {
  const auto &c = calibrated();
  const CrossbarConfig &xb = c.cfg.crossbar;
  const SimTime overhead = xb.timing.iteration_overhead;
  const SimTime read = xb.timing.read_pulse + overhead;
  const std::int64_t devices = static_cast<std::int64_t>(xb.rows) * xb.cols;
  int mismatches = 0;
  SimTime total;
  for (const RunRecord &run : c.report.runs) {
    const ProgramPolicy &p = c.report.config.policies[static_cast<std::size_t>(run.policy)];
    SimTime t = devices * (xb.timing.form_pulse + overhead);
    for (const auto &trace : run.traces) {
      for (const auto &r : trace.records) t += SimTime::from_ns(r.pulse_width_ns) + overhead;
      t += static_cast<std::int64_t>(trace.outcome.n_wait_branches) * p.delta_t;
    }
    if (t != run.programming_end) ++mismatches;
    const SimTime end_of_programming = t;
    for (double ck : c.report.config.checkpoints_s) {
      const SimTime target = end_of_programming + SimTime::from_seconds(ck);
      if (t < target) t = target;
      t += devices * read;
    }
    if (t != run.wall_time) ++mismatches;
    total += t;
  }
  SimTime by_policy;
  for (const auto &p : c.report.policies) by_policy += p.wall_time;
  if (total != c.report.wall_time || by_policy != c.report.wall_time) ++mismatches;
  return {mismatches == 0, "runs=" + std::to_string(c.report.runs.size()) + " mismatches=" + std::to_string(mismatches) +
                               " simulated_wall_time_s=" + num(c.report.wall_time.seconds(), 3)};
}

Verdict determinism() {
  RunConfig a = parse_config_text("");
  a.threads = 1;
  RunConfig b = a;
  b.threads = 4;
  const auto ra1 = run_experiment(a.experiment());
  const auto ra2 = run_experiment(a.experiment());
  const auto rb = run_experiment(b.experiment());
  const std::string csv = traces_csv(ra1, a), json = report_json(ra1, a);
  const bool rerun = csv == traces_csv(ra2, a) && json == report_json(ra2, a);
  const bool threads = csv == traces_csv(rb, b) && json == report_json(rb, b);
  return {rerun && threads, std::string("rerun_identical=") + (rerun ? "yes" : "no") +
                                " threads_1_vs_4_identical=" + (threads ? "yes" : "no") +
                                " trace_bytes=" + std::to_string(csv.size())};
}

} // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria = {
      {"half-select safety", half_select},
      {"sense equation round trip", sense_round_trip},
      {"protocol table fidelity", protocol_fidelity},
      {"erase monotonicity", erase_monotonicity},
      {"flowchart oracle equivalence", oracle_equivalence},
      {"AFEPW trend", afepw_trend},
      {"wait-branch trend", wait_trend},
      {"level count at 1000 s", level_count},
      {"iteration-count plausibility", iteration_plausibility},
      {"timing accounting", timing_accounting},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception &e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("criterion %2zu %-30s %s  %s\n", i + 1, criteria[i].first, v.pass ? "PASS" : "FAIL", v.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
