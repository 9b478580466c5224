#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rramprog {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

// Counter-based stream: draw i is a pure function of (key, i). The whole generator
// state is the cursor, so it can be stored inside value types and copied freely.
struct CounterStream {
  std::uint64_t key = 0;
  std::uint64_t cursor = 0;

  std::uint64_t next_u64() { return splitmix64(key ^ splitmix64(cursor++)); }

  // Uniform on (0, 1); never returns 0 so log() is safe.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Standard normal rejected outside [-clip, clip], scaled by sigma.
  double truncated_normal(double sigma, double clip = 4.0) {
    for (;;) {
      const double z = normal();
      if (std::abs(z) <= clip) return sigma * z;
    }
  }

  friend bool operator==(const CounterStream &, const CounterStream &) = default;
};

} // namespace rramprog
