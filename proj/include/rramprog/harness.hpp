#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rramprog/programmer.hpp"

namespace rramprog {

enum class CriterionKind { HardGap, KSigma };

struct SeparabilityCriterion {
  CriterionKind kind = CriterionKind::KSigma;
  double k = 1.0;
};

// Adjacent (lower, upper) sample sets are distinguishable.
bool distinguishable(std::span<const double> lower, std::span<const double> upper,
                     const SeparabilityCriterion &criterion);

/// Largest m such that m states, taken in index order, are pairwise distinguishable
/// between neighbours in the chosen subsequence. Needs >= 2 states with >= 8
/// samples each (InsufficientSamples).
int separability(const std::vector<std::vector<double>> &samples, const SeparabilityCriterion &criterion);

struct RetentionPoint {
  double t_s = 0.0; // seconds after the curve started
  double g_us = 0.0;
};

struct RetentionSeries {
  CellIndex cell;
  std::vector<RetentionPoint> points;
};

/// Reads the given cells at each offset (seconds, ascending) from the current
/// clock. Reads within one checkpoint are sequential, so a checkpoint that has
/// already passed is read immediately.
std::vector<RetentionSeries> retention_curve(Crossbar &cb, std::span<const CellIndex> cells,
                                             std::span<const double> offsets_s);

enum class AssignmentMode { UniformPerState, Pattern };

struct ExperimentConfig {
  CrossbarConfig crossbar;
  std::vector<TargetInterval> intervals;
  std::vector<ProgramPolicy> policies;
  std::vector<std::uint64_t> seeds; // one replica per seed
  std::vector<double> checkpoints_s{0.0, 5.0, 1000.0};
  AssignmentMode assignment_mode = AssignmentMode::UniformPerState;
  Assignment pattern; // Pattern mode only
  double k_sigma = 1.0;
  int threads = 1;

  void validate() const;
  std::size_t checkpoint_index(double t_s) const;
};

// Raw outcome of programming one crossbar with one policy.
struct RunRecord {
  int replica = 0;
  int policy = 0;
  int run = 0; // state index in uniform mode
  std::uint64_t crossbar_seed = 0;
  Assignment assignment;
  std::vector<ProgramTrace> traces;           // row-major
  std::vector<std::vector<double>> samples;   // [checkpoint][device], NaN if unreadable
  std::vector<std::vector<double>> sample_t_s; // [checkpoint][device], since programming end
  SimTime programming_end;
  SimTime checkpoint_advance; // total advance_time spent reaching checkpoints
  SimTime wall_time;          // crossbar clock at the end of the run
};

struct CheckpointStats {
  double t_s = 0.0;
  double g_mean = 0.0;
  double g_std = 0.0;
  double in_interval_fraction = 0.0;
  int samples = 0;
};

struct StateStats {
  int n = 0;
  int episodes = 0;
  int converged = 0;
  double mean_iterations = 0.0;
  double mean_non_wait_iterations = 0.0;
  double afepw_ns = 0.0; // mean final erase width over converged episodes
  double mean_wait_branches = 0.0;
  double g_mean_at_1ks = 0.0;
  double g_std_at_1ks = 0.0;
  double in_interval_fraction_at_1ks = 0.0;
  std::vector<CheckpointStats> checkpoints;
};

struct CheckpointSeparability {
  double t_s = 0.0;
  std::vector<int> k_sigma; // per replica
  std::vector<int> hard_gap;
};

struct PolicyReport {
  ProgramPolicy policy;
  std::vector<StateStats> states;
  std::vector<CheckpointSeparability> separability;
  SimTime wall_time; // summed over this policy's runs
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<PolicyReport> policies;
  std::vector<RunRecord> runs; // ordered by (replica, policy, run)
  SimTime wall_time;
};

// Deterministic for a given config regardless of `threads`.
ExperimentReport run_experiment(const ExperimentConfig &config);

// Seed of the crossbar used for one run; shared by every policy so that the
// policies see identical devices.
std::uint64_t crossbar_seed(std::uint64_t replica_seed, int run);

} // namespace rramprog
