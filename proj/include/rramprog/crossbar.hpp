#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "rramprog/device_model.hpp"
#include "rramprog/error.hpp"
#include "rramprog/protocol.hpp"
#include "rramprog/sense_path.hpp"
#include "rramprog/sim_time.hpp"

namespace rramprog {

struct TimingModel {
  SimTime iteration_overhead = SimTime::from_ms(120); // mode-change settling per operation
  SimTime read_pulse = SimTime::from_us(200);
  SimTime form_pulse = SimTime::from_us(40);
  SimTime write_pulse = SimTime::from_ns(100);

  friend bool operator==(const TimingModel &, const TimingModel &) = default;
};

struct CrossbarConfig {
  DeviceParams device;
  ProtocolTable protocol = ProtocolTable::defaults();
  SensePath sense;
  TimingModel timing;
  int rows = 8;
  int cols = 8;

  // Throws InvalidConfig (or ValidationError for protocol violations).
  void validate() const;

  friend bool operator==(const CrossbarConfig &, const CrossbarConfig &) = default;
};

struct ArrayOp {
  PulseKind kind = PulseKind::Write;
  int cp = 0; // erase only

  static constexpr ArrayOp form() { return {PulseKind::Form, 0}; }
  static constexpr ArrayOp write() { return {PulseKind::Write, 0}; }
  static constexpr ArrayOp erase(int cp) { return {PulseKind::Erase, cp}; }
};

struct StandBy {
  friend bool operator==(const StandBy &, const StandBy &) = default;
};
struct Active {
  PulseKind op;
  CellIndex cell;
  friend bool operator==(const Active &, const Active &) = default;
};
using LineMode = std::variant<StandBy, Active>;

enum class LogEvent { StandBy, LineSetup, GatePulse };

struct LogEntry {
  SimTime t;
  LogEvent event = LogEvent::StandBy;
  PulseKind op = PulseKind::Read; // meaningless for StandBy entries
  CellIndex cell;
  LineBias bias;
  std::int64_t width_ns = 0;
};

/// An array of 1T1R cells behind Active/Default line selectors. Every operation
/// goes StandBy -> SL/BL setup -> WL pulse -> StandBy and reaches exactly one
/// device. Copyable; a copy is a full snapshot including the clock.
class Crossbar {
public:
  explicit Crossbar(CrossbarConfig config);

  void apply(ArrayOp op, CellIndex cell);
  SenseReading read(CellIndex cell);
  // Forms every device in row-major order; AlreadyFormed if any device is formed.
  void form_all();
  void advance_time(SimTime dt);

  int rows() const { return config_.rows; }
  int cols() const { return config_.cols; }
  const CrossbarConfig &config() const { return config_; }
  SimTime clock() const { return clock_; }
  const LineMode &mode() const { return mode_; }
  const std::vector<LogEntry> &op_log() const { return op_log_; }
  std::span<const DeviceState> devices() const { return devices_; }
  const DeviceState &device(CellIndex cell) const;
  // Noise-free conductance at the current clock.
  double true_conductance(CellIndex cell) const;

  // Operation log retention; experiments with thousands of operations turn it off.
  void set_logging(bool enabled) { logging_ = enabled; }

private:
  std::size_t index_of(CellIndex cell) const;
  SimTime pulse_duration(ArrayOp op) const;
  void log(LogEvent event, PulseKind op, CellIndex cell, LineBias bias, std::int64_t width_ns);
  void begin(PulseKind op, CellIndex cell, std::int64_t width_ns);
  void end();

  CrossbarConfig config_;
  std::vector<DeviceState> devices_;
  SimTime clock_;
  LineMode mode_ = StandBy{};
  std::vector<LogEntry> op_log_;
  bool logging_ = true;
};

} // namespace rramprog
