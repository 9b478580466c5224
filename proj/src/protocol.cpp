#include "rramprog/protocol.hpp"

#include <string>

#include "rramprog/error.hpp"

namespace rramprog {

ProtocolTable ProtocolTable::defaults() {
  ProtocolTable t;
  t.form = {{1.55, 0.0, 4.8}, {0.0, 4.8, 2.4}, 40'000, 600.0};
  t.write = {{1.24, 0.0, 2.4}, {0.0, 2.4, 2.4}, 100, 300.0};
  t.erase = {{4.05, 1.07, 0.0}, {0.0, 0.0, 2.4}, 10, 0.0};
  t.read = {{3.38, 2.1, 2.4}, {0.0, 2.4, 2.4}, 200'000, 0.0};
  t.standby = {0.0, 2.4, 2.4};
  t.vdd = 4.8;
  return t;
}

const OperationProtocol &ProtocolTable::get(PulseKind kind) const {
  switch (kind) {
  case PulseKind::Form: return form;
  case PulseKind::Write: return write;
  case PulseKind::Erase: return erase;
  case PulseKind::Read: return read;
  }
  return read;
}

void ProtocolTable::validate() const {
  auto fail = [](const std::string &msg) { throw Error(ErrorCode::ValidationError, msg); };
  if (!(vdd > 0.0)) fail("protocol.vdd must be > 0");
  auto check_bias = [&](const LineBias &b, const std::string &name) {
    for (double v : {b.v_wl, b.v_sl, b.v_bl})
      if (v < 0.0 || v > vdd) fail(name + " voltages must lie in [0, vdd]");
  };
  const std::pair<const OperationProtocol *, const char *> ops[] = {
      {&form, "form"}, {&write, "write"}, {&erase, "erase"}, {&read, "read"}};
  for (const auto &[op, name] : ops) {
    check_bias(op->active, std::string("protocol.") + name + ".active");
    check_bias(op->inactive, std::string("protocol.") + name + ".inactive");
    // Deselected gates stay at 0 V so no unselected selector conducts.
    if (op->inactive.v_wl != 0.0) fail(std::string("protocol.") + name + ".inactive.v_wl must be 0 V");
    if (op->width_ns <= 0) fail(std::string("protocol.") + name + ".width_ns must be > 0");
    if (op->compliance_ua < 0.0) fail(std::string("protocol.") + name + ".compliance_ua must be >= 0");
  }
  check_bias(standby, "protocol.standby");
  if (standby.v_wl != 0.0) fail("protocol.standby.v_wl must be 0 V");
  if (write.width_ns != 100)
    fail("protocol.write.width_ns is fixed at 100 ns (full write), got " +
         std::to_string(write.width_ns));
  if (erase.width_ns % 10 != 0)
    fail("protocol.erase.width_ns (CP unit) must be a multiple of 10 ns");
  if (!(read_bias() > 0.0)) fail("read requires V_BL > V_SL");
  if (!(write.active.v_bl > write.active.v_sl)) fail("write requires V_BL > V_SL");
  if (!(erase.active.v_sl > erase.active.v_bl)) fail("erase requires V_SL > V_BL");
}

PulseSpec make_pulse(const ProtocolTable &table, PulseKind kind, int cp) {
  const OperationProtocol &op = table.get(kind);
  const std::int64_t width = kind == PulseKind::Erase ? table.erase_width_ns(cp) : op.width_ns;
  return {kind, op.active.v_wl, op.active.v_sl, op.active.v_bl, width, op.compliance_ua};
}

} // namespace rramprog
