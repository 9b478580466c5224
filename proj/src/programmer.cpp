#include "rramprog/programmer.hpp"

#include <algorithm>
#include <string>

namespace rramprog {

std::string_view to_string(PolicyVariant variant) {
  return variant == PolicyVariant::Naive ? "naive" : "relax-aware";
}

std::string_view to_string(TraceOp op) {
  switch (op) {
  case TraceOp::Read: return "Read";
  case TraceOp::Write: return "Write";
  case TraceOp::Erase: return "Erase";
  }
  return "Unknown";
}

void ProgramPolicy::validate() const {
  if (max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "policy.max_iterations must be >= 1");
  if (cp_floor < 0) throw Error(ErrorCode::InvalidConfig, "policy.cp_floor must be >= 0");
  if (variant == PolicyVariant::RelaxAware && !(delta_t > SimTime{}))
    throw Error(ErrorCode::InvalidConfig, "relax-aware policy requires delta_t > 0");
}

ProgramTrace program_device(Crossbar &cb, CellIndex cell, const TargetInterval &target,
                            const ProgramPolicy &policy) {
  policy.validate();
  if (!(target.g_low < target.g_high))
    throw Error(ErrorCode::InvalidConfig, "target interval must have g_low < g_high");
  if (cb.device(cell).phase != Phase::Formed)
    throw Error(ErrorCode::NotFormed, "cannot program an unformed device").at(cell);

  ProgramTrace trace;
  trace.cell = cell;
  trace.target = target;
  ProgramOutcome &out = trace.outcome;
  const std::int64_t read_width = cb.config().timing.read_pulse.ns();

  int cp = 0;
  auto take_read = [&](int iteration, bool waited) {
    const double g = cb.read(cell).g_us;
    trace.records.push_back({iteration, TraceOp::Read, read_width, cp, g, waited});
    out.final_g_us = g;
    return g;
  };

  for (int it = 1; it <= policy.max_iterations; ++it) {
    out.n_iterations = it;
    double g = take_read(it, false);
    if (target.contains(g)) {
      if (policy.variant == PolicyVariant::Naive) {
        out.status = ProgramStatus::Converged;
        return trace;
      }
      cb.advance_time(policy.delta_t);
      ++out.n_wait_branches;
      g = take_read(it, true);
      if (target.contains(g)) {
        out.status = ProgramStatus::Converged;
        return trace;
      }
    }
    if (g > target.g_high) {
      ++cp;
      const int effective = std::max(cp, 1);
      cb.apply(ArrayOp::erase(effective), cell);
      const std::int64_t width = cb.config().protocol.erase_width_ns(effective);
      trace.records.push_back({it, TraceOp::Erase, width, cp, 0.0, false});
      out.final_erase_width_ns = width;
    } else {
      cp = std::max(policy.cp_floor, cp - 1);
      cb.apply(ArrayOp::write(), cell);
      trace.records.push_back({it, TraceOp::Write, cb.config().protocol.write.width_ns, cp, 0.0, false});
    }
  }
  out.status = ProgramStatus::Failed;
  out.failure_reason = "no convergence within " + std::to_string(policy.max_iterations) + " iterations";
  return trace;
}

Assignment uniform_assignment(const Crossbar &cb, int state) {
  return Assignment(static_cast<std::size_t>(cb.rows()) * static_cast<std::size_t>(cb.cols()), state);
}

Assignment checkerboard_assignment(const Crossbar &cb, int state_a, int state_b) {
  Assignment a;
  for (int r = 0; r < cb.rows(); ++r)
    for (int c = 0; c < cb.cols(); ++c) a.push_back((r + c) % 2 == 0 ? state_a : state_b);
  return a;
}

std::vector<ProgramTrace> program_array(Crossbar &cb, const Assignment &assignment,
                                        const std::vector<TargetInterval> &intervals,
                                        const ProgramPolicy &policy) {
  const std::size_t cells = static_cast<std::size_t>(cb.rows()) * static_cast<std::size_t>(cb.cols());
  if (assignment.size() != cells)
    throw Error(ErrorCode::InvalidConfig, "assignment has " + std::to_string(assignment.size()) +
                                              " entries for " + std::to_string(cells) + " devices");
  for (int s : assignment)
    if (s < 0 || s >= static_cast<int>(intervals.size()))
      throw Error(ErrorCode::InvalidConfig, "assignment refers to state " + std::to_string(s) +
                                                " but only " + std::to_string(intervals.size()) +
                                                " intervals exist");
  std::vector<ProgramTrace> traces;
  traces.reserve(cells);
  for (int r = 0; r < cb.rows(); ++r)
    for (int c = 0; c < cb.cols(); ++c) {
      const int state = assignment[static_cast<std::size_t>(r) * cb.cols() + c];
      traces.push_back(program_device(cb, {r, c}, intervals[static_cast<std::size_t>(state)], policy));
    }
  return traces;
}

} // namespace rramprog
