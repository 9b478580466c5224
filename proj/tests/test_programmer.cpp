#include "doctest.h"
#include "flowchart_oracle.hpp"
#include "test_support.hpp"

using namespace rramprog;
using namespace rramprog::test;

namespace {

ProgramPolicy policy_of(PolicyVariant v, SimTime dt = SimTime::from_seconds(5.0)) {
  ProgramPolicy p;
  p.variant = v;
  p.delta_t = dt;
  return p;
}

Crossbar formed(CrossbarConfig c, std::uint64_t seed = 1) {
  c.device.master_seed = seed;
  Crossbar cb(c);
  cb.form_all();
  return cb;
}

// Decision read of each program op: the last read before it.
void check_loop_shape(const ProgramTrace &t, const ProgramPolicy &p) {
  double last_g = 0.0;
  bool have_read = false;
  for (const auto &r : t.records) {
    if (r.op == TraceOp::Read) {
      last_g = r.g_read_us;
      have_read = true;
      continue;
    }
    REQUIRE(have_read);
    if (r.op == TraceOp::Erase) {
      CHECK(last_g > t.target.g_high);
      CHECK(r.pulse_width_ns == 10 * std::max(r.cp_after, 1));
      CHECK(r.pulse_width_ns % 10 == 0);
    } else {
      CHECK(last_g < t.target.g_low);
      CHECK(r.pulse_width_ns == 100);
    }
    CHECK(r.cp_after >= p.cp_floor);
    have_read = false;
  }
  if (t.converged()) {
    REQUIRE_FALSE(t.records.empty());
    const auto &last = t.records.back();
    CHECK(last.op == TraceOp::Read);
    CHECK(t.target.contains(last.g_read_us));
    if (p.variant == PolicyVariant::RelaxAware) {
      CHECK(last.waited);
      CHECK(t.outcome.n_wait_branches >= 1);
    }
  }
  if (p.variant == PolicyVariant::Naive) CHECK(t.outcome.n_wait_branches == 0);
}

} // namespace

TEST_SUITE("programmer") {

TEST_CASE("immediate success needs no programming") {
  Crossbar cb = formed(noiseless_crossbar());
  const auto t = program_device(cb, {0, 0}, {0, 110.0, 130.0}, policy_of(PolicyVariant::Naive));
  CHECK(t.converged());
  CHECK(t.outcome.n_iterations == 1);
  CHECK(t.records.size() == 1);
  CHECK(t.outcome.final_erase_width_ns == 0);
}

TEST_CASE("traces match the hand-stepped flowchart") {
  bool saw_decrement = false;
  for (const auto &s : oracle_scenarios()) {
    CAPTURE(s.name);
    CrossbarConfig c = noiseless_crossbar();
    c.device.tau_erase_median = s.tau_erase;
    Crossbar cb = formed(c);
    ProgramPolicy p = policy_of(s.variant);
    p.cp_floor = s.cp_floor;
    p.max_iterations = s.max_iterations;
    const double g0 = cb.true_conductance({2, 2});
    const ProgramTrace got = program_device(cb, {2, 2}, s.target, p);
    const ProgramTrace want = flowchart_oracle(g0, s.target, p, c.device, 200'000);
    CHECK(traces_match(got, want));
    saw_decrement = saw_decrement || has_decrement_then_write(want);
  }
  CHECK(saw_decrement);
}

TEST_CASE("erase ladder widths grow by 10 ns per step") {
  CrossbarConfig c = noiseless_crossbar();
  c.device.tau_erase_median = 600;
  Crossbar cb = formed(c);
  const auto t = program_device(cb, {0, 0}, {1, 33.2, 38.08}, policy_of(PolicyVariant::Naive));
  std::int64_t expected = 10;
  for (const auto &r : t.records)
    if (r.op == TraceOp::Erase) {
      CHECK(r.pulse_width_ns == expected);
      expected += 10;
    }
  CHECK(t.converged());
}

TEST_CASE("calibrated devices show the decrement-then-write pattern") {
  Crossbar cb = formed(CrossbarConfig{}, 5);
  cb.set_logging(false);
  const TargetInterval fig5{1, 33.2, 38.08};
  int with_pattern = 0, converged = 0;
  for (int r = 0; r < 8; ++r)
    for (int col = 0; col < 8; ++col) {
      const auto t = program_device(cb, {r, col}, fig5, policy_of(PolicyVariant::Naive));
      converged += t.converged() ? 1 : 0;
      with_pattern += has_decrement_then_write(t) ? 1 : 0;
    }
  CHECK(converged == 64);
  CHECK(with_pattern > 0);
}

TEST_CASE("loop shape holds on noisy traces") {
  for (auto v : {PolicyVariant::Naive, PolicyVariant::RelaxAware}) {
    Crossbar cb = formed(CrossbarConfig{}, 9);
    cb.set_logging(false);
    const auto intervals = assign_intervals(IntervalPlan{}, relaxation_sigma_model(cb.config().device));
    ProgramPolicy p = policy_of(v);
    p.cp_floor = v == PolicyVariant::Naive ? 0 : 1;
    const auto traces = program_array(cb, checkerboard_assignment(cb, 0, 7), intervals, p);
    for (const auto &t : traces) check_loop_shape(t, p);
  }
}

TEST_CASE("relax-aware with a vanishing wait reduces to naive") {
  CrossbarConfig c;
  c.device.read_noise_frac = 0.0;
  c.device.relax_sigma_short = 0.0;
  c.device.relax_sigma_long = 0.0;
  const auto intervals = assign_intervals(IntervalPlan{}, relaxation_sigma_model(DeviceParams{}));
  for (int state : {0, 3, 7}) {
    Crossbar a = formed(c, 21), b = formed(c, 21);
    const auto naive = program_array(a, uniform_assignment(a, state), intervals, policy_of(PolicyVariant::Naive));
    const auto aware = program_array(b, uniform_assignment(b, state), intervals,
                                     policy_of(PolicyVariant::RelaxAware, SimTime::from_ns(1)));
    for (std::size_t i = 0; i < naive.size(); ++i) {
      ProgramTrace stripped = aware[i];
      std::erase_if(stripped.records, [](const TraceRecord &r) { return r.waited; });
      CHECK(stripped.records == naive[i].records);
      CHECK(aware[i].outcome.status == naive[i].outcome.status);
      CHECK(aware[i].outcome.n_iterations == naive[i].outcome.n_iterations);
    }
  }
}

TEST_CASE("program_array") {
  SUBCASE("uniform assignment gives one trace per device in row-major order") {
    Crossbar cb = formed(CrossbarConfig{});
    const auto intervals = assign_intervals(IntervalPlan{}, relaxation_sigma_model(DeviceParams{}));
    const auto traces = program_array(cb, uniform_assignment(cb, 2), intervals, policy_of(PolicyVariant::Naive));
    REQUIRE(traces.size() == 64);
    CHECK(traces[9].cell == CellIndex{1, 1});
    for (const auto &t : traces) CHECK(t.target == intervals[2]);
  }
  SUBCASE("devices already inside need no pulses") {
    Crossbar cb = formed(noiseless_crossbar());
    const std::vector<TargetInterval> one{{0, 100.0, 140.0}};
    const auto traces = program_array(cb, uniform_assignment(cb, 0), one, policy_of(PolicyVariant::Naive));
    for (const auto &t : traces) CHECK(t.records.size() == 1);
  }
  SUBCASE("same seed, same traces") {
    const auto intervals = assign_intervals(IntervalPlan{}, relaxation_sigma_model(DeviceParams{}));
    Crossbar a = formed(CrossbarConfig{}, 77), b = formed(CrossbarConfig{}, 77);
    const auto p = policy_of(PolicyVariant::RelaxAware);
    CHECK(program_array(a, uniform_assignment(a, 4), intervals, p) ==
          program_array(b, uniform_assignment(b, 4), intervals, p));
  }
  SUBCASE("bad assignments are rejected") {
    Crossbar cb = formed(CrossbarConfig{});
    const auto intervals = assign_intervals(IntervalPlan{}, relaxation_sigma_model(DeviceParams{}));
    CHECK_THROWS_AS(program_array(cb, Assignment(10, 0), intervals, policy_of(PolicyVariant::Naive)), Error);
    CHECK_THROWS_AS(program_array(cb, uniform_assignment(cb, 8), intervals, policy_of(PolicyVariant::Naive)), Error);
  }
}

TEST_CASE("failures are recorded, not thrown") {
  Crossbar cb = formed(noiseless_crossbar());
  ProgramPolicy p = policy_of(PolicyVariant::Naive);
  p.max_iterations = 2;
  const auto t = program_device(cb, {0, 0}, {0, 10.0, 11.0}, p);
  CHECK(t.outcome.status == ProgramStatus::Failed);
  CHECK(t.outcome.n_iterations == 2);
  CHECK_FALSE(t.outcome.failure_reason.empty());
}

TEST_CASE("preconditions") {
  Crossbar cb(CrossbarConfig{});
  CHECK_THROWS_AS(program_device(cb, {0, 0}, {0, 30.0, 40.0}, policy_of(PolicyVariant::Naive)), Error);
  cb.form_all();
  CHECK_THROWS_AS(program_device(cb, {0, 0}, {0, 40.0, 30.0}, policy_of(PolicyVariant::Naive)), Error);
  CHECK_THROWS_AS(program_device(cb, {0, 0}, {0, 30.0, 40.0}, policy_of(PolicyVariant::RelaxAware, SimTime{})), Error);
  ProgramPolicy p;
  p.max_iterations = 0;
  CHECK_THROWS_AS(program_device(cb, {0, 0}, {0, 30.0, 40.0}, p), Error);
}

} // TEST_SUITE
