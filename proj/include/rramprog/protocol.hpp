#pragma once

#include <cstdint>

#include "rramprog/device_model.hpp"

namespace rramprog {

struct LineBias {
  double v_wl = 0.0;
  double v_sl = 0.0;
  double v_bl = 0.0;
  friend bool operator==(const LineBias &, const LineBias &) = default;
};

struct OperationProtocol {
  LineBias active;
  LineBias inactive; // voltages on every deselected line
  // Pulse width. For erase this is the per-CP unit: width = CP * width_ns.
  std::int64_t width_ns = 0;
  double compliance_ua = 0.0;
  friend bool operator==(const OperationProtocol &, const OperationProtocol &) = default;
};

/// Line voltages and pulse widths of each array operation, plus the stand-by
/// state used between operations. Volts, ns, uA.
struct ProtocolTable {
  OperationProtocol form;
  OperationProtocol write;
  OperationProtocol erase;
  OperationProtocol read;
  LineBias standby;
  double vdd = 0.0;

  // The fabricated-chip values.
  static ProtocolTable defaults();

  const OperationProtocol &get(PulseKind kind) const;
  // V_BL - V_SL during a read.
  double read_bias() const { return read.active.v_bl - read.active.v_sl; }
  std::int64_t erase_width_ns(int cp) const { return static_cast<std::int64_t>(cp) * erase.width_ns; }

  // Throws ValidationError.
  void validate() const;

  friend bool operator==(const ProtocolTable &, const ProtocolTable &) = default;
};

PulseSpec make_pulse(const ProtocolTable &table, PulseKind kind, int cp = 0);

} // namespace rramprog
