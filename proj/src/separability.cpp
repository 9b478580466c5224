#include <algorithm>
#include <cmath>
#include <numeric>

#include "rramprog/harness.hpp"

namespace rramprog {

namespace {

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

} // namespace

bool distinguishable(std::span<const double> lower, std::span<const double> upper,
                     const SeparabilityCriterion &criterion) {
  if (criterion.kind == CriterionKind::HardGap)
    return *std::max_element(lower.begin(), lower.end()) < *std::min_element(upper.begin(), upper.end());
  return mean(upper) - mean(lower) > criterion.k * (sample_std(lower) + sample_std(upper));
}

int separability(const std::vector<std::vector<double>> &samples, const SeparabilityCriterion &criterion) {
  if (samples.size() < 2) throw Error(ErrorCode::InsufficientSamples, "separability needs >= 2 states");
  for (const auto &s : samples)
    if (s.size() < 8) throw Error(ErrorCode::InsufficientSamples, "separability needs >= 8 samples per state");

  // best[j]: longest distinguishable chain ending at state j.
  std::vector<int> best(samples.size(), 1);
  for (std::size_t j = 1; j < samples.size(); ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (best[i] + 1 > best[j] && distinguishable(samples[i], samples[j], criterion))
        best[j] = best[i] + 1;
  return *std::max_element(best.begin(), best.end());
}

} // namespace rramprog
