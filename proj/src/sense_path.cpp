#include "rramprog/sense_path.hpp"

#include <cmath>
#include <string>

#include "rramprog/error.hpp"

namespace rramprog {

void SensePath::validate() const {
  if (!(r_sense_ohm > 0.0)) throw Error(ErrorCode::InvalidConfig, "sense.r_sense_ohm must be > 0");
  if (adc_bits < 4 || adc_bits > 24)
    throw Error(ErrorCode::InvalidConfig, "sense.adc_bits must be in [4, 24], got " +
                                              std::to_string(adc_bits));
  if (!(adc_vref > 0.0)) throw Error(ErrorCode::InvalidConfig, "sense.adc_vref must be > 0");
  if (!opamp_ideal) throw Error(ErrorCode::InvalidConfig, "only an ideal sense opamp is modeled");
}

double SensePath::lsb_volts() const { return adc_vref / std::ldexp(1.0, adc_bits); }

double SensePath::conductance_lsb_us(double read_bias) const {
  return lsb_volts() / r_sense_ohm / read_bias * 1e6;
}

SenseReading sense_conductance(const SensePath &sense, double g_true_us, double read_bias) {
  const double i_r = g_true_us * 1e-6 * read_bias;
  double v_r = sense.r_sense_ohm * i_r;
  if (v_r > sense.adc_vref)
    throw Error(ErrorCode::SenseSaturated, "sense voltage " + std::to_string(v_r) +
                                               " V exceeds ADC reference " +
                                               std::to_string(sense.adc_vref) + " V");
  if (sense.quantize) {
    const double lsb = sense.lsb_volts();
    v_r = std::nearbyint(v_r / lsb) * lsb;
  }
  return {v_r / sense.r_sense_ohm / read_bias * 1e6, v_r};
}

} // namespace rramprog
