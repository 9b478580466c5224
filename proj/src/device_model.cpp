#include "rramprog/device_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rramprog/error.hpp"

namespace rramprog {

namespace {

constexpr std::int64_t kWritePulseNs = 100;
constexpr std::int64_t kEraseQuantumNs = 10;

void require_kind(const PulseSpec &pulse, PulseKind expected) {
  if (pulse.kind != expected)
    throw Error(ErrorCode::WrongPulseKind, "expected a " + std::string(to_string(expected)) +
                                               " pulse, got " + std::string(to_string(pulse.kind)));
}

void require_formed(const DeviceState &state) {
  if (state.phase != Phase::Formed) throw Error(ErrorCode::NotFormed, "device is not formed");
}

// New anchor conductance; relaxation amplitudes are redrawn with magnitude
// proportional to the distance above the erased floor.
void reanchor(DeviceState &state, double g, const DeviceParams &params, SimTime now) {
  state.g_anchor = g;
  state.t_anchor = now;
  const double span = std::max(g - params.g_floor, 0.0);
  state.amp_short = span * state.rng.truncated_normal(params.relax_sigma_short);
  state.amp_long = span * state.rng.truncated_normal(params.relax_sigma_long);
}

} // namespace

std::string_view to_string(PulseKind kind) {
  switch (kind) {
  case PulseKind::Form: return "Form";
  case PulseKind::Write: return "Write";
  case PulseKind::Erase: return "Erase";
  case PulseKind::Read: return "Read";
  }
  return "Unknown";
}

void DeviceParams::validate() const {
  auto fail = [](const std::string &msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (!(g_floor > 0.0 && g_on_median > 0.0 && g_pristine > 0.0))
    fail("device conductances must be > 0");
  if (!(g_floor < g_on_median)) fail("device.g_floor must be below device.g_on_median");
  if (g_on_dispersion < 0.0 || g_on_d2d_sigma < 0.0 || tau_erase_d2d_sigma < 0.0 ||
      erase_noise_frac < 0.0 || relax_sigma_short < 0.0 || relax_sigma_long < 0.0 ||
      read_noise_frac < 0.0)
    fail("device sigmas must be >= 0");
  if (!(tau_erase_median > 0.0)) fail("device.tau_erase_median must be > 0");
  if (!(forming_factor > 0.0)) fail("device.forming_factor must be > 0");
  if (!(relax_tau_short > 0.0 && relax_tau_short <= 5.0))
    fail("device.relax_tau_short must be in (0, 5] s");
  if (!(relax_tau_long > 0.0)) fail("device.relax_tau_long must be > 0");
  if (relax_sigma_short < relax_sigma_long)
    fail("device.relax_sigma_short must not be smaller than device.relax_sigma_long");
  if (relax_sigma_short == relax_sigma_long && relax_sigma_short > 0.0)
    fail("short-term relaxation must be stronger than long-term retention loss");
}

DeviceState make_device(const DeviceParams &params, std::uint64_t stream_id) {
  DeviceState s;
  s.rng.key = mix_keys(params.master_seed, stream_id);
  s.eta_erase = std::exp(s.rng.truncated_normal(params.tau_erase_d2d_sigma));
  s.g_on_dev = params.g_on_median * std::exp(s.rng.truncated_normal(params.g_on_d2d_sigma));
  s.g_anchor = params.g_pristine;
  return s;
}

DeviceState form(DeviceState state, const PulseSpec &pulse, const DeviceParams &params,
                 SimTime now) {
  if (state.phase == Phase::Formed) throw Error(ErrorCode::AlreadyFormed, "device already formed");
  require_kind(pulse, PulseKind::Form);
  const double median = params.forming_factor * params.g_on_median;
  const double g = median * std::exp(state.rng.truncated_normal(params.g_on_dispersion));
  state.phase = Phase::Formed;
  reanchor(state, g, params, now);
  return state;
}

DeviceState write(DeviceState state, const PulseSpec &pulse, const DeviceParams &params,
                  SimTime now) {
  require_kind(pulse, PulseKind::Write);
  require_formed(state);
  if (pulse.width_ns != kWritePulseNs)
    throw Error(ErrorCode::BadPulseWidth,
                "write pulse must be 100 ns, got " + std::to_string(pulse.width_ns) + " ns");
  const double g = state.g_on_dev * std::exp(state.rng.truncated_normal(params.g_on_dispersion));
  reanchor(state, g, params, now);
  return state;
}

double erase_expectation(double g_us, std::int64_t width_ns, double eta_erase,
                         const DeviceParams &params) {
  const double decay =
      std::exp(-static_cast<double>(width_ns) * eta_erase / params.tau_erase_median);
  return params.g_floor + (g_us - params.g_floor) * decay;
}

DeviceState erase(DeviceState state, const PulseSpec &pulse, const DeviceParams &params,
                  SimTime now) {
  require_kind(pulse, PulseKind::Erase);
  require_formed(state);
  if (pulse.width_ns <= 0 || pulse.width_ns % kEraseQuantumNs != 0)
    throw Error(ErrorCode::BadPulseWidth, "erase pulse must be a positive multiple of 10 ns, got " +
                                              std::to_string(pulse.width_ns) + " ns");
  const double g_now = conductance_at(state, now, params);
  const double expected = erase_expectation(g_now, pulse.width_ns, state.eta_erase, params);
  const double eps = state.rng.truncated_normal(params.erase_noise_frac);
  const double g = std::max(expected * (1.0 + eps), 0.5 * params.g_floor);
  reanchor(state, g, params, now);
  return state;
}

double conductance_at(const DeviceState &state, SimTime t, const DeviceParams &params) {
  if (t < state.t_anchor)
    throw Error(ErrorCode::TimeBeforeAnchor, "conductance requested before the last programming op");
  const double dt = (t - state.t_anchor).seconds();
  const double g = state.g_anchor +
                   state.amp_short * (1.0 - std::exp(-dt / params.relax_tau_short)) +
                   state.amp_long * std::log10(1.0 + dt / params.relax_tau_long);
  return std::max(g, 0.0);
}

SenseReading sample_read(DeviceState &state, SimTime t, const DeviceParams &params,
                         const SensePath &sense, double read_bias) {
  require_formed(state);
  const double g_true = conductance_at(state, t, params);
  // A noiseless read leaves the stream untouched.
  const double nu = params.read_noise_frac > 0.0 ? state.rng.truncated_normal(params.read_noise_frac) : 0.0;
  return sense_conductance(sense, g_true * (1.0 + nu), read_bias);
}

} // namespace rramprog
