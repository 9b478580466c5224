#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rramprog/crossbar.hpp"

namespace rramprog {

struct TargetInterval {
  int n = 0;          // state index, increasing conductance
  double g_low = 0.0; // uS
  double g_high = 0.0;

  bool contains(double g) const { return g >= g_low && g <= g_high; }
  friend bool operator==(const TargetInterval &, const TargetInterval &) = default;
};

enum class IntervalScheme { Linear, Sigma, Mixed };

struct IntervalPlan {
  IntervalScheme scheme = IntervalScheme::Mixed;
  int n_states = 8;
  double g_min = 22.0; // uS
  double g_max = 94.0;
  double gap_frac = 0.1;
  double linear_weight = 0.5;
  double sigma_weight = 0.5;
  double min_half_width = 0.0; // floor on every half-width, uS

  friend bool operator==(const IntervalPlan &, const IntervalPlan &) = default;
};

// Expected post-programming spread at a given conductance, uS -> uS.
using SigmaModel = std::function<double(double)>;

// Spread of short-term relaxation implied by the device model.
SigmaModel relaxation_sigma_model(const DeviceParams &params);

/// Splits [g_min, g_max] into n_states equal cells of pitch p with centers at the
/// cell midpoints. Half-widths are bounded so that adjacent intervals keep at
/// least gap_frac * p between them and the outer intervals stay gap_frac * p / 2
/// inside the range.
///  - Linear: half-width (1 - gap_frac) * p / 2 for every state.
///  - Sigma:  half-width k * sigma(center), k the largest value meeting the bound.
///  - Mixed:  max(w_lin * linear, w_sig * sigma), rescaled to meet the bound exactly.
/// Throws IntervalsOverlap when min_half_width makes the bound unsatisfiable.
std::vector<TargetInterval> assign_intervals(const IntervalPlan &plan, const SigmaModel &sigma);

// Checks the ordering and gap invariants; throws IntervalsOverlap.
void validate_intervals(const std::vector<TargetInterval> &intervals);

enum class PolicyVariant { Naive, RelaxAware };

std::string_view to_string(PolicyVariant variant);

struct ProgramPolicy {
  PolicyVariant variant = PolicyVariant::Naive;
  SimTime delta_t = SimTime::from_ms(5'000); // relax-aware wait before re-verifying
  int max_iterations = 200;
  int cp_floor = 0;

  void validate() const;
  friend bool operator==(const ProgramPolicy &, const ProgramPolicy &) = default;
};

enum class TraceOp { Read, Write, Erase };

std::string_view to_string(TraceOp op);

struct TraceRecord {
  int iteration = 0;
  TraceOp op = TraceOp::Read;
  std::int64_t pulse_width_ns = 0;
  int cp_after = 0;
  double g_read_us = 0.0; // reads only
  bool waited = false;    // read taken after the relax-aware wait

  friend bool operator==(const TraceRecord &, const TraceRecord &) = default;
};

enum class ProgramStatus { Converged, Failed };

struct ProgramOutcome {
  ProgramStatus status = ProgramStatus::Failed;
  double final_g_us = 0.0;
  std::int64_t final_erase_width_ns = 0; // width of the last erase, 0 if none
  int n_iterations = 0;
  int n_wait_branches = 0;
  std::string failure_reason;

  friend bool operator==(const ProgramOutcome &, const ProgramOutcome &) = default;
};

struct ProgramTrace {
  CellIndex cell;
  TargetInterval target;
  std::vector<TraceRecord> records;
  ProgramOutcome outcome;

  bool converged() const { return outcome.status == ProgramStatus::Converged; }
  friend bool operator==(const ProgramTrace &, const ProgramTrace &) = default;
};

/// Closed-loop erase-width programming of one device.
///
///   CP = 0
///   repeat:
///     read G
///     if G in [G_L, G_H]:
///       naive: done
///       relax-aware: wait delta_t, read G again; done if still inside,
///                    otherwise fall through with the new G
///     if G > G_H: CP += 1, erase for CP * 10 ns
///     if G < G_L: CP = max(cp_floor, CP - 1), full write (100 ns)
///
/// Stops with a Failed outcome after max_iterations loop passes. Throws NotFormed.
ProgramTrace program_device(Crossbar &cb, CellIndex cell, const TargetInterval &target,
                            const ProgramPolicy &policy);

// Grid of state indices, row-major, rows * cols entries.
using Assignment = std::vector<int>;

Assignment uniform_assignment(const Crossbar &cb, int state);
Assignment checkerboard_assignment(const Crossbar &cb, int state_a, int state_b);

// Programs every device in row-major order. A device that fails to converge is
// recorded in its trace and does not stop the others.
std::vector<ProgramTrace> program_array(Crossbar &cb, const Assignment &assignment,
                                        const std::vector<TargetInterval> &intervals,
                                        const ProgramPolicy &policy);

} // namespace rramprog
