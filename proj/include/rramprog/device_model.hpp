#pragma once

#include <cstdint>
#include <string_view>

#include "rramprog/rng.hpp"
#include "rramprog/sense_path.hpp"
#include "rramprog/sim_time.hpp"

namespace rramprog {

enum class PulseKind { Form, Write, Erase, Read };

std::string_view to_string(PulseKind kind);

struct PulseSpec {
  PulseKind kind = PulseKind::Read;
  double v_wl = 0.0;
  double v_sl = 0.0;
  double v_bl = 0.0;
  std::int64_t width_ns = 0;
  double compliance_ua = 0.0; // 0 = no compliance limit
};

/// Constants of the phenomenological 1T1R model. Conductances in uS, erase time
/// constant in ns, relaxation time constants in s.
///
/// The defaults are a calibration: they place eight programming levels inside the
/// 3-100 uS window and reproduce the relaxation-aware vs. naive level counts.
struct DeviceParams {
  double g_floor = 3.0;           // erased asymptote
  double g_on_median = 100.0;     // post-write median
  double g_on_dispersion = 0.15;  // cycle-to-cycle lognormal sigma of a write
  double g_on_d2d_sigma = 0.10;   // device-to-device lognormal sigma of the write median
  double forming_factor = 1.2;    // formed median / g_on_median
  double tau_erase_median = 2400.0;
  double tau_erase_d2d_sigma = 0.25;
  double erase_noise_frac = 0.08;
  double relax_tau_short = 1.5;
  double relax_sigma_short = 0.16; // fraction of (G - g_floor)
  double relax_sigma_long = 0.05;
  double relax_tau_long = 10.0;
  double read_noise_frac = 0.01;
  double g_pristine = 0.1;
  std::uint64_t master_seed = 1;

  void validate() const;

  friend bool operator==(const DeviceParams &, const DeviceParams &) = default;
};

enum class Phase { Pristine, Formed };

/// Hidden state of one cell. Randomness is carried in `rng`, so two equal states
/// evolve identically under equal inputs.
struct DeviceState {
  Phase phase = Phase::Pristine;
  double g_anchor = 0.0;   // conductance set by the last form/write/erase
  SimTime t_anchor;        // clock at that operation
  double amp_short = 0.0;  // signed short-term relaxation amplitude
  double amp_long = 0.0;   // signed long-term retention amplitude
  double eta_erase = 1.0;  // per-device erase-rate factor
  double g_on_dev = 0.0;   // per-device write median
  CounterStream rng;

  friend bool operator==(const DeviceState &, const DeviceState &) = default;
};

// Draws the per-device factors from (params.master_seed, stream_id).
DeviceState make_device(const DeviceParams &params, std::uint64_t stream_id);

DeviceState form(DeviceState state, const PulseSpec &pulse, const DeviceParams &params,
                 SimTime now);
// Full write: the result does not depend on the prior conductance.
DeviceState write(DeviceState state, const PulseSpec &pulse, const DeviceParams &params,
                  SimTime now);
DeviceState erase(DeviceState state, const PulseSpec &pulse, const DeviceParams &params,
                  SimTime now);

// Expected erase output before cycle-to-cycle noise.
double erase_expectation(double g_us, std::int64_t width_ns, double eta_erase,
                         const DeviceParams &params);

// True conductance including relaxation since the last programming operation.
double conductance_at(const DeviceState &state, SimTime t, const DeviceParams &params);

// Noisy, digitized read. Only the rng cursor of `state` advances.
SenseReading sample_read(DeviceState &state, SimTime t, const DeviceParams &params,
                         const SensePath &sense, double read_bias);

} // namespace rramprog
