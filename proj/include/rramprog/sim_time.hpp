#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace rramprog {

// Simulated time, kept as an integer nanosecond count so that clock sums are exact.
class SimTime {
public:
  constexpr SimTime() = default;

  static constexpr SimTime from_ns(std::int64_t ns) { return SimTime(ns); }
  static constexpr SimTime from_us(std::int64_t us) { return SimTime(us * 1'000); }
  static constexpr SimTime from_ms(std::int64_t ms) { return SimTime(ms * 1'000'000); }
  // Rounds to the nearest nanosecond.
  static SimTime from_seconds(double s) { return SimTime(std::llround(s * 1e9)); }

  constexpr std::int64_t ns() const { return ns_; }
  constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }

  constexpr SimTime &operator+=(SimTime o) {
    ns_ += o.ns_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.ns_ + b.ns_); }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime(a.ns_ - b.ns_); }
  friend constexpr SimTime operator*(std::int64_t k, SimTime a) { return SimTime(k * a.ns_); }
  friend constexpr auto operator<=>(SimTime, SimTime) = default;

private:
  constexpr explicit SimTime(std::int64_t ns) : ns_(ns) {}
  std::int64_t ns_ = 0;
};

} // namespace rramprog
