#pragma once

namespace rramprog {

// Behavioral read chain: device current through R_sense, the resulting voltage
// digitized by an ADC, then converted back to a conductance.
struct SensePath {
  double r_sense_ohm = 5e3;
  int adc_bits = 12;
  double adc_vref = 1.2;
  bool opamp_ideal = true; // always true here; kept for config echo
  bool quantize = true;

  void validate() const;

  double lsb_volts() const;
  // Conductance step of one ADC code at the given read bias (V_BL - V_SL).
  double conductance_lsb_us(double read_bias) const;

  friend bool operator==(const SensePath &, const SensePath &) = default;
};

struct SenseReading {
  double g_us = 0.0; // reported conductance
  double v_r = 0.0;  // digitized sense-resistor voltage
};

// Throws SenseSaturated when the sense voltage exceeds the ADC reference.
SenseReading sense_conductance(const SensePath &sense, double g_true_us, double read_bias);

} // namespace rramprog
