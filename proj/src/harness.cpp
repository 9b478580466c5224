#include "rramprog/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "rramprog/rng.hpp"

namespace rramprog {

namespace {

constexpr double kRetentionCheckS = 1000.0;

std::vector<CellIndex> all_cells(const Crossbar &cb) {
  std::vector<CellIndex> cells;
  for (int r = 0; r < cb.rows(); ++r)
    for (int c = 0; c < cb.cols(); ++c) cells.push_back({r, c});
  return cells;
}

RunRecord run_one(const ExperimentConfig &cfg, int replica, int policy, int run,
                  const Assignment &assignment) {
  RunRecord rec;
  rec.replica = replica;
  rec.policy = policy;
  rec.run = run;
  rec.crossbar_seed = crossbar_seed(cfg.seeds[static_cast<std::size_t>(replica)], run);
  rec.assignment = assignment;

  CrossbarConfig xcfg = cfg.crossbar;
  xcfg.device.master_seed = rec.crossbar_seed;
  Crossbar cb(xcfg);
  cb.set_logging(false);
  cb.form_all();
  rec.traces = program_array(cb, assignment, cfg.intervals, cfg.policies[static_cast<std::size_t>(policy)]);
  rec.programming_end = cb.clock();

  const std::vector<CellIndex> cells = all_cells(cb);
  rec.samples.assign(cfg.checkpoints_s.size(), std::vector<double>(cells.size()));
  rec.sample_t_s = rec.samples;
  for (std::size_t k = 0; k < cfg.checkpoints_s.size(); ++k) {
    const SimTime target = rec.programming_end + SimTime::from_seconds(cfg.checkpoints_s[k]);
    if (cb.clock() < target) {
      rec.checkpoint_advance += target - cb.clock();
      cb.advance_time(target - cb.clock());
    }
    for (std::size_t d = 0; d < cells.size(); ++d) {
      try {
        rec.samples[k][d] = cb.read(cells[d]).g_us;
      } catch (const Error &) {
        rec.samples[k][d] = std::numeric_limits<double>::quiet_NaN();
      }
      rec.sample_t_s[k][d] = (cb.clock() - rec.programming_end).seconds();
    }
  }
  rec.wall_time = cb.clock();
  return rec;
}

std::vector<Assignment> run_assignments(const ExperimentConfig &cfg) {
  const std::size_t cells =
      static_cast<std::size_t>(cfg.crossbar.rows) * static_cast<std::size_t>(cfg.crossbar.cols);
  if (cfg.assignment_mode == AssignmentMode::Pattern) return {cfg.pattern};
  std::vector<Assignment> out;
  for (std::size_t n = 0; n < cfg.intervals.size(); ++n) out.emplace_back(cells, static_cast<int>(n));
  return out;
}

double mean_of(const std::vector<double> &v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double> &v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

PolicyReport aggregate(const ExperimentConfig &cfg, const std::vector<RunRecord> &runs, int policy) {
  PolicyReport rep;
  rep.policy = cfg.policies[static_cast<std::size_t>(policy)];
  const std::size_t n_states = cfg.intervals.size();
  const std::size_t n_ckpt = cfg.checkpoints_s.size();
  const std::size_t at_1ks = cfg.checkpoint_index(kRetentionCheckS);

  // [state][checkpoint] samples pooled over replicas, and per replica.
  std::vector<std::vector<std::vector<double>>> pooled(n_states, std::vector<std::vector<double>>(n_ckpt));
  std::vector<std::vector<std::vector<int>>> inside(n_states, std::vector<std::vector<int>>(n_ckpt));
  std::vector<std::vector<std::vector<std::vector<double>>>> per_replica(
      cfg.seeds.size(),
      std::vector<std::vector<std::vector<double>>>(n_ckpt, std::vector<std::vector<double>>(n_states)));

  struct Acc {
    double iterations = 0, waits = 0, afepw = 0;
    int episodes = 0, converged = 0;
  };
  std::vector<Acc> acc(n_states);

  for (const RunRecord &r : runs) {
    if (r.policy != policy) continue;
    rep.wall_time += r.wall_time;
    for (std::size_t d = 0; d < r.traces.size(); ++d) {
      const auto state = static_cast<std::size_t>(r.assignment[d]);
      const ProgramTrace &t = r.traces[d];
      Acc &a = acc[state];
      ++a.episodes;
      a.iterations += t.outcome.n_iterations;
      a.waits += t.outcome.n_wait_branches;
      if (t.converged()) {
        ++a.converged;
        a.afepw += static_cast<double>(t.outcome.final_erase_width_ns);
      }
      for (std::size_t k = 0; k < n_ckpt; ++k) {
        const double g = r.samples[k][d];
        inside[state][k].push_back(t.converged() && cfg.intervals[state].contains(g) ? 1 : 0);
        if (std::isnan(g)) continue;
        pooled[state][k].push_back(g);
        per_replica[static_cast<std::size_t>(r.replica)][k][state].push_back(g);
      }
    }
  }

  for (std::size_t s = 0; s < n_states; ++s) {
    StateStats st;
    st.n = static_cast<int>(s);
    const Acc &a = acc[s];
    st.episodes = a.episodes;
    st.converged = a.converged;
    if (a.episodes > 0) {
      st.mean_iterations = a.iterations / a.episodes;
      st.mean_wait_branches = a.waits / a.episodes;
      st.mean_non_wait_iterations = (a.iterations - a.waits) / a.episodes;
    }
    if (a.converged > 0) st.afepw_ns = a.afepw / a.converged;
    for (std::size_t k = 0; k < n_ckpt; ++k) {
      CheckpointStats c;
      c.t_s = cfg.checkpoints_s[k];
      c.g_mean = mean_of(pooled[s][k]);
      c.g_std = std_of(pooled[s][k]);
      c.samples = static_cast<int>(pooled[s][k].size());
      const auto &in = inside[s][k];
      if (!in.empty())
        c.in_interval_fraction =
            static_cast<double>(std::count(in.begin(), in.end(), 1)) / static_cast<double>(in.size());
      st.checkpoints.push_back(c);
    }
    st.g_mean_at_1ks = st.checkpoints[at_1ks].g_mean;
    st.g_std_at_1ks = st.checkpoints[at_1ks].g_std;
    st.in_interval_fraction_at_1ks = st.checkpoints[at_1ks].in_interval_fraction;
    rep.states.push_back(std::move(st));
  }

  for (std::size_t k = 0; k < n_ckpt; ++k) {
    CheckpointSeparability sep;
    sep.t_s = cfg.checkpoints_s[k];
    for (std::size_t rep_i = 0; rep_i < cfg.seeds.size(); ++rep_i) {
      std::vector<std::vector<double>> usable;
      for (const auto &s : per_replica[rep_i][k])
        if (s.size() >= 8) usable.push_back(s);
      if (usable.size() < 2) {
        sep.k_sigma.push_back(0);
        sep.hard_gap.push_back(0);
        continue;
      }
      sep.k_sigma.push_back(separability(usable, {CriterionKind::KSigma, cfg.k_sigma}));
      sep.hard_gap.push_back(separability(usable, {CriterionKind::HardGap, 0.0}));
    }
    rep.separability.push_back(std::move(sep));
  }
  return rep;
}

} // namespace

std::vector<RetentionSeries> retention_curve(Crossbar &cb, std::span<const CellIndex> cells,
                                             std::span<const double> offsets_s) {
  for (std::size_t i = 0; i < offsets_s.size(); ++i) {
    if (offsets_s[i] < 0.0) throw Error(ErrorCode::NegativeDt, "retention offsets must be >= 0");
    if (i > 0 && offsets_s[i] < offsets_s[i - 1])
      throw Error(ErrorCode::InvalidConfig, "retention offsets must be ascending");
  }
  const SimTime start = cb.clock();
  std::vector<RetentionSeries> out;
  for (CellIndex c : cells) out.push_back({c, {}});
  for (double offset : offsets_s) {
    const SimTime target = start + SimTime::from_seconds(offset);
    if (cb.clock() < target) cb.advance_time(target - cb.clock());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double g = cb.read(cells[i]).g_us;
      out[i].points.push_back({(cb.clock() - start).seconds(), g});
    }
  }
  return out;
}

std::uint64_t crossbar_seed(std::uint64_t replica_seed, int run) {
  return mix_keys(replica_seed, 0x5eed0000ULL + static_cast<std::uint64_t>(run));
}

void ExperimentConfig::validate() const {
  crossbar.validate();
  validate_intervals(intervals);
  if (intervals.size() < 2) throw Error(ErrorCode::InvalidConfig, "experiment needs >= 2 intervals");
  if (policies.empty()) throw Error(ErrorCode::InvalidConfig, "experiment needs at least one policy");
  for (const auto &p : policies) p.validate();
  if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "experiment needs at least one replica seed");
  if (checkpoints_s.empty() || !std::is_sorted(checkpoints_s.begin(), checkpoints_s.end()) ||
      checkpoints_s.front() < 0.0)
    throw Error(ErrorCode::InvalidConfig, "checkpoints must be non-negative and ascending");
  if (std::find(checkpoints_s.begin(), checkpoints_s.end(), kRetentionCheckS) == checkpoints_s.end())
    throw Error(ErrorCode::InvalidConfig, "checkpoints must include the 1000 s retention check");
  if (threads < 1) throw Error(ErrorCode::InvalidConfig, "threads must be >= 1");
  if (!(k_sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "k_sigma must be > 0");
  if (assignment_mode == AssignmentMode::Pattern) {
    const std::size_t cells = static_cast<std::size_t>(crossbar.rows) * static_cast<std::size_t>(crossbar.cols);
    if (pattern.size() != cells) throw Error(ErrorCode::InvalidConfig, "pattern size must match the array");
    for (int s : pattern)
      if (s < 0 || s >= static_cast<int>(intervals.size()))
        throw Error(ErrorCode::InvalidConfig, "pattern refers to an unknown state");
  }
}

std::size_t ExperimentConfig::checkpoint_index(double t_s) const {
  const auto it = std::find(checkpoints_s.begin(), checkpoints_s.end(), t_s);
  if (it == checkpoints_s.end()) throw Error(ErrorCode::InvalidConfig, "no checkpoint at requested time");
  return static_cast<std::size_t>(it - checkpoints_s.begin());
}

ExperimentReport run_experiment(const ExperimentConfig &config) {
  config.validate();
  const std::vector<Assignment> assignments = run_assignments(config);
  const std::size_t n_rep = config.seeds.size();
  const std::size_t n_pol = config.policies.size();
  const std::size_t n_run = assignments.size();

  // One slot per (replica, policy, run); workers fill slots, order is fixed.
  std::vector<RunRecord> runs(n_rep * n_pol * n_run);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t job = next++; job < runs.size(); job = next++) {
      const auto rep = static_cast<int>(job / (n_pol * n_run));
      const auto pol = static_cast<int>((job / n_run) % n_pol);
      const auto run = static_cast<int>(job % n_run);
      try {
        runs[job] = run_one(config, rep, pol, run, assignments[static_cast<std::size_t>(run)]);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(config.threads), runs.size());
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentReport report;
  report.config = config;
  for (std::size_t p = 0; p < n_pol; ++p) {
    report.policies.push_back(aggregate(config, runs, static_cast<int>(p)));
    report.wall_time += report.policies.back().wall_time;
  }
  report.runs = std::move(runs);
  return report;
}

} // namespace rramprog
