#include "rramprog/crossbar.hpp"

#include <cmath>
#include <string>

namespace rramprog {

void CrossbarConfig::validate() const {
  device.validate();
  protocol.validate();
  sense.validate();
  if (rows < 1 || cols < 1) throw Error(ErrorCode::InvalidConfig, "array must have at least one row and column");
  const SimTime zero;
  if (timing.iteration_overhead < zero || timing.read_pulse < zero || timing.form_pulse < zero ||
      timing.write_pulse < zero)
    throw Error(ErrorCode::InvalidConfig, "timing values must be >= 0");
  if (timing.read_pulse.ns() != protocol.read.width_ns ||
      timing.form_pulse.ns() != protocol.form.width_ns ||
      timing.write_pulse.ns() != protocol.write.width_ns)
    throw Error(ErrorCode::InvalidConfig, "timing pulse widths disagree with the protocol table");
  // Highest plausible conductance (formed, +4 sigma) must not saturate the sense path.
  const double g_max = device.forming_factor * device.g_on_median *
                       std::exp(4.0 * (device.g_on_dispersion + device.g_on_d2d_sigma));
  if (sense.r_sense_ohm * g_max * 1e-6 * protocol.read_bias() > sense.adc_vref)
    throw Error(ErrorCode::InvalidConfig, "sense path saturates below " + std::to_string(g_max) + " uS");
}

Crossbar::Crossbar(CrossbarConfig config) : config_(std::move(config)) {
  config_.validate();
  devices_.reserve(static_cast<std::size_t>(config_.rows) * static_cast<std::size_t>(config_.cols));
  for (int r = 0; r < config_.rows; ++r)
    for (int c = 0; c < config_.cols; ++c)
      devices_.push_back(make_device(config_.device, static_cast<std::uint64_t>(r) * config_.cols + c));
}

std::size_t Crossbar::index_of(CellIndex cell) const {
  if (cell.row < 0 || cell.row >= config_.rows || cell.col < 0 || cell.col >= config_.cols)
    throw Error(ErrorCode::IndexOutOfRange, "cell (" + std::to_string(cell.row) + ", " +
                                                std::to_string(cell.col) + ") outside " +
                                                std::to_string(config_.rows) + "x" +
                                                std::to_string(config_.cols) + " array");
  return static_cast<std::size_t>(cell.row) * config_.cols + cell.col;
}

const DeviceState &Crossbar::device(CellIndex cell) const { return devices_[index_of(cell)]; }

double Crossbar::true_conductance(CellIndex cell) const {
  return conductance_at(device(cell), clock_, config_.device);
}

void Crossbar::log(LogEvent event, PulseKind op, CellIndex cell, LineBias bias, std::int64_t width_ns) {
  if (logging_) op_log_.push_back({clock_, event, op, cell, bias, width_ns});
}

void Crossbar::begin(PulseKind op, CellIndex cell, std::int64_t width_ns) {
  end();
  const OperationProtocol &p = config_.protocol.get(op);
  mode_ = Active{op, cell};
  // SL and BL go active first, then the gate is pulsed.
  log(LogEvent::LineSetup, op, cell, {0.0, p.active.v_sl, p.active.v_bl}, 0);
  log(LogEvent::GatePulse, op, cell, p.active, width_ns);
}

void Crossbar::end() {
  mode_ = StandBy{};
  log(LogEvent::StandBy, PulseKind::Read, {}, config_.protocol.standby, 0);
}

SimTime Crossbar::pulse_duration(ArrayOp op) const {
  switch (op.kind) {
  case PulseKind::Form: return config_.timing.form_pulse;
  case PulseKind::Write: return config_.timing.write_pulse;
  case PulseKind::Erase: return SimTime::from_ns(config_.protocol.erase_width_ns(op.cp));
  case PulseKind::Read: return config_.timing.read_pulse;
  }
  return {};
}

void Crossbar::apply(ArrayOp op, CellIndex cell) {
  const std::size_t idx = index_of(cell);
  if (op.kind == PulseKind::Read)
    throw Error(ErrorCode::WrongPulseKind, "use read() for read operations");
  if (op.kind == PulseKind::Erase && op.cp < 1)
    throw Error(ErrorCode::BadPulseWidth, "erase requires CP >= 1").at(cell);

  const PulseSpec pulse = make_pulse(config_.protocol, op.kind, op.cp);
  const SimTime after = clock_ + config_.timing.iteration_overhead + pulse_duration(op);
  DeviceState next;
  try {
    switch (op.kind) {
    case PulseKind::Form: next = form(devices_[idx], pulse, config_.device, after); break;
    case PulseKind::Write: next = write(devices_[idx], pulse, config_.device, after); break;
    case PulseKind::Erase: next = erase(devices_[idx], pulse, config_.device, after); break;
    case PulseKind::Read: break;
    }
  } catch (const Error &e) {
    throw e.at(cell);
  }
  begin(op.kind, cell, pulse.width_ns);
  clock_ = after;
  devices_[idx] = next;
  end();
}

SenseReading Crossbar::read(CellIndex cell) {
  const std::size_t idx = index_of(cell);
  const SimTime after = clock_ + config_.timing.iteration_overhead + config_.timing.read_pulse;
  DeviceState next = devices_[idx];
  SenseReading reading;
  try {
    reading = sample_read(next, after, config_.device, config_.sense, config_.protocol.read_bias());
  } catch (const Error &e) {
    throw e.at(cell);
  }
  begin(PulseKind::Read, cell, config_.timing.read_pulse.ns());
  clock_ = after;
  devices_[idx] = next;
  end();
  return reading;
}

void Crossbar::form_all() {
  for (int r = 0; r < config_.rows; ++r)
    for (int c = 0; c < config_.cols; ++c)
      if (device({r, c}).phase != Phase::Pristine)
        throw Error(ErrorCode::AlreadyFormed, "crossbar already formed").at({r, c});
  for (int r = 0; r < config_.rows; ++r)
    for (int c = 0; c < config_.cols; ++c) apply(ArrayOp::form(), {r, c});
}

void Crossbar::advance_time(SimTime dt) {
  if (dt < SimTime{}) throw Error(ErrorCode::NegativeDt, "advance_time requires dt >= 0");
  clock_ += dt;
}

} // namespace rramprog
