#include "rramprog/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <system_error>

#include "json.hpp"

namespace rramprog {

namespace {

using nlohmann::ordered_json;

std::string to_text(std::uint64_t v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_preamble(const ExperimentReport &report, const RunConfig &config) {
  std::string out = "# config_fingerprint=" + config_fingerprint(config) + "\n# seeds=";
  for (std::size_t i = 0; i < report.config.seeds.size(); ++i) out += (i ? "," : "") + to_text(report.config.seeds[i]);
  return out + "\n";
}

// Null for NaN so the document stays valid JSON.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

// Canonical config without the keys that cannot change results.
std::string echoed_config_text(const RunConfig &config) {
  RunConfig c = config;
  c.threads = 1;
  c.output_dir.clear();
  return emit_config(c);
}

ordered_json config_object(const RunConfig &config) {
  ordered_json obj = ordered_json::object();
  const std::string text = echoed_config_text(config);
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    const std::string line = text.substr(start, end - start);
    const auto eq = line.find(" = ");
    obj[line.substr(0, eq)] = line.substr(eq + 3);
    start = end + 1;
  }
  return obj;
}

} // namespace

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  char buf[128];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  if (ec != std::errc()) return "nan";
  std::string s(buf, ptr);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string config_fingerprint(const RunConfig &config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : echoed_config_text(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char *digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xF];
  return out;
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string traces_csv(const ExperimentReport &report, const RunConfig &config) {
  std::string out = csv_preamble(report, config);
  out += "policy,replica,state,row,col,iteration,op,pulse_width_ns,cp,g_read_uS,waited\n";
  for (const RunRecord &run : report.runs) {
    const std::string policy(to_string(report.config.policies[static_cast<std::size_t>(run.policy)].variant));
    const std::string replica = std::to_string(run.replica);
    for (const ProgramTrace &trace : run.traces) {
      const std::string prefix = policy + "," + replica + "," + std::to_string(trace.target.n) + "," +
                                 std::to_string(trace.cell.row) + "," + std::to_string(trace.cell.col) + ",";
      for (const TraceRecord &r : trace.records) {
        out += prefix;
        out += std::to_string(r.iteration);
        out += ',';
        out += to_string(r.op);
        out += ',';
        out += std::to_string(r.pulse_width_ns);
        out += ',';
        out += std::to_string(r.cp_after);
        out += ',';
        if (r.op == TraceOp::Read) out += format_fixed(r.g_read_us, 6);
        out += ',';
        out += r.waited ? "1\n" : "0\n";
      }
    }
  }
  return out;
}

std::string histograms_csv(const ExperimentReport &report, const RunConfig &config) {
  constexpr double g_bin = 1.0; // uS
  const double w_bin = static_cast<double>(config.crossbar.protocol.erase.width_ns);
  const auto &checkpoints = report.config.checkpoints_s;

  // [policy][state] -> per-checkpoint conductances and final erase widths
  struct Bucket {
    std::vector<std::vector<double>> g;
    std::vector<double> widths;
  };
  std::map<std::pair<int, int>, Bucket> buckets;
  for (const RunRecord &run : report.runs) {
    for (std::size_t d = 0; d < run.traces.size(); ++d) {
      Bucket &b = buckets[{run.policy, run.traces[d].target.n}];
      b.g.resize(checkpoints.size());
      for (std::size_t c = 0; c < checkpoints.size(); ++c)
        if (std::isfinite(run.samples[c][d])) b.g[c].push_back(run.samples[c][d]);
      if (run.traces[d].converged()) b.widths.push_back(static_cast<double>(run.traces[d].outcome.final_erase_width_ns));
    }
  }

  std::string out = csv_preamble(report, config);
  out += "policy,state,quantity,checkpoint_s,bin_low,bin_high,count\n";
  auto emit = [&](const std::string &prefix, const std::vector<double> &values, double width, int decimals) {
    if (values.empty()) return;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const long first = static_cast<long>(std::floor(*lo_it / width));
    const long last = static_cast<long>(std::floor(*hi_it / width));
    std::vector<int> counts(static_cast<std::size_t>(last - first + 1), 0);
    for (double v : values) ++counts[static_cast<std::size_t>(static_cast<long>(std::floor(v / width)) - first)];
    for (long i = first; i <= last; ++i)
      out += prefix + format_fixed(static_cast<double>(i) * width, decimals) + "," +
             format_fixed(static_cast<double>(i + 1) * width, decimals) + "," +
             std::to_string(counts[static_cast<std::size_t>(i - first)]) + "\n";
  };
  for (const auto &[key, b] : buckets) {
    const std::string head = std::string(to_string(report.config.policies[static_cast<std::size_t>(key.first)].variant)) +
                             "," + std::to_string(key.second) + ",";
    for (std::size_t c = 0; c < checkpoints.size(); ++c)
      emit(head + "conductance_uS," + format_fixed(checkpoints[c], 3) + ",", b.g[c], g_bin, 3);
    emit(head + "final_erase_width_ns,,", b.widths, w_bin, 0);
  }
  return out;
}

std::string report_json(const ExperimentReport &report, const RunConfig &config) {
  ordered_json doc;
  doc["tool"] = "rramprog";
  doc["config_fingerprint"] = config_fingerprint(config);
  doc["config"] = config_object(config);

  ordered_json manifest = ordered_json::array();
  for (std::size_t r = 0; r < report.config.seeds.size(); ++r)
    manifest.push_back({{"replica", r}, {"seed", report.config.seeds[r]}});
  doc["seed_manifest"] = manifest;

  ordered_json intervals = ordered_json::array();
  for (const auto &t : report.config.intervals)
    intervals.push_back({{"state", t.n}, {"g_low_uS", t.g_low}, {"g_high_uS", t.g_high}});
  doc["intervals"] = intervals;
  doc["checkpoints_s"] = report.config.checkpoints_s;
  doc["wall_time_s"] = report.wall_time.seconds();

  ordered_json policies = ordered_json::array();
  for (const PolicyReport &p : report.policies) {
    ordered_json pj;
    pj["policy"] = std::string(to_string(p.policy.variant));
    pj["delta_t_s"] = p.policy.delta_t.seconds();
    pj["max_iterations"] = p.policy.max_iterations;
    pj["cp_floor"] = p.policy.cp_floor;
    pj["wall_time_s"] = p.wall_time.seconds();
    ordered_json states = ordered_json::array();
    for (const StateStats &s : p.states) {
      ordered_json sj{{"state", s.n},
                      {"episodes", s.episodes},
                      {"converged", s.converged},
                      {"mean_iterations", number(s.mean_iterations)},
                      {"mean_non_wait_iterations", number(s.mean_non_wait_iterations)},
                      {"afepw_ns", number(s.afepw_ns)},
                      {"mean_wait_branches", number(s.mean_wait_branches)},
                      {"g_mean_at_1ks_uS", number(s.g_mean_at_1ks)},
                      {"g_std_at_1ks_uS", number(s.g_std_at_1ks)},
                      {"in_interval_fraction_at_1ks", number(s.in_interval_fraction_at_1ks)}};
      ordered_json cps = ordered_json::array();
      for (const CheckpointStats &c : s.checkpoints)
        cps.push_back({{"t_s", c.t_s},
                       {"g_mean_uS", number(c.g_mean)},
                       {"g_std_uS", number(c.g_std)},
                       {"in_interval_fraction", number(c.in_interval_fraction)},
                       {"samples", c.samples}});
      sj["checkpoints"] = cps;
      states.push_back(sj);
    }
    pj["states"] = states;
    ordered_json sep = ordered_json::array();
    for (const CheckpointSeparability &c : p.separability)
      sep.push_back({{"t_s", c.t_s}, {"k_sigma_levels", c.k_sigma}, {"hard_gap_levels", c.hard_gap}});
    pj["separability"] = sep;
    policies.push_back(pj);
  }
  doc["policies"] = policies;

  ordered_json runs = ordered_json::array();
  for (const RunRecord &r : report.runs) {
    std::size_t converged = 0;
    for (const auto &t : r.traces) converged += t.converged() ? 1 : 0;
    runs.push_back({{"replica", r.replica},
                    {"seed", report.config.seeds[static_cast<std::size_t>(r.replica)]},
                    {"policy", std::string(to_string(report.config.policies[static_cast<std::size_t>(r.policy)].variant))},
                    {"run", r.run},
                    {"crossbar_seed", r.crossbar_seed},
                    {"converged_devices", converged},
                    {"programming_end_s", r.programming_end.seconds()},
                    {"wall_time_s", r.wall_time.seconds()}});
  }
  doc["runs"] = runs;
  return doc.dump(2) + "\n";
}

std::string config_echo_json(const RunConfig &config) { return config_object(config).dump(2); }

std::string error_json(const std::string &code, const std::string &message) {
  ordered_json doc;
  doc["error"] = {{"code", code}, {"message", message}};
  return doc.dump(2) + "\n";
}

} // namespace rramprog
