#include <cmath>
#include <algorithm>
#include <limits>
#include <string>

#include "rramprog/programmer.hpp"

namespace rramprog {

namespace {

// Largest factor f such that f * h satisfies the pair and edge bounds.
double fit_factor(const std::vector<double> &h, double budget) {
  double f = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < h.size(); ++i)
    if (h[i] + h[i + 1] > 0.0) f = std::min(f, budget / (h[i] + h[i + 1]));
  for (double edge : {h.front(), h.back()})
    if (edge > 0.0) f = std::min(f, 0.5 * budget / edge);
  return f;
}

} // namespace

SigmaModel relaxation_sigma_model(const DeviceParams &params) {
  return [floor = params.g_floor, s = params.relax_sigma_short](double g) {
    return s * std::max(g - floor, 0.0);
  };
}

std::vector<TargetInterval> assign_intervals(const IntervalPlan &plan, const SigmaModel &sigma) {
  if (plan.n_states < 2) throw Error(ErrorCode::InvalidConfig, "intervals.n_states must be >= 2");
  if (!(plan.g_min >= 0.0 && plan.g_min < plan.g_max))
    throw Error(ErrorCode::InvalidConfig, "intervals require 0 <= g_min < g_max");
  if (!(plan.gap_frac > 0.0 && plan.gap_frac < 1.0))
    throw Error(ErrorCode::InvalidConfig, "intervals.gap_frac must be in (0, 1)");
  if (plan.linear_weight < 0.0 || plan.sigma_weight < 0.0 ||
      plan.linear_weight + plan.sigma_weight <= 0.0)
    throw Error(ErrorCode::InvalidConfig, "interval mixing weights must be >= 0 and not both 0");
  if (plan.min_half_width < 0.0)
    throw Error(ErrorCode::InvalidConfig, "intervals.min_half_width must be >= 0");

  const auto n = static_cast<std::size_t>(plan.n_states);
  const double pitch = (plan.g_max - plan.g_min) / static_cast<double>(n);
  const double budget = (1.0 - plan.gap_frac) * pitch;

  std::vector<double> centers(n);
  for (std::size_t i = 0; i < n; ++i)
    centers[i] = plan.g_min + pitch * (static_cast<double>(i) + 0.5);

  const std::vector<double> linear(n, budget / 2.0);

  std::vector<double> sig(n);
  for (std::size_t i = 0; i < n; ++i) sig[i] = std::max(sigma ? sigma(centers[i]) : 0.0, 0.0);
  const double k = fit_factor(sig, budget);
  if (std::isfinite(k))
    for (double &s : sig) s *= k;

  std::vector<double> half;
  switch (plan.scheme) {
  case IntervalScheme::Linear: half = linear; break;
  case IntervalScheme::Sigma: half = sig; break;
  case IntervalScheme::Mixed: {
    half.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      half[i] = std::max(plan.linear_weight * linear[i], plan.sigma_weight * sig[i]);
    const double f = fit_factor(half, budget);
    if (std::isfinite(f))
      for (double &h : half) h *= f;
    break;
  }
  }
  for (double &h : half) h = std::max(h, plan.min_half_width);

  std::vector<TargetInterval> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = {static_cast<int>(i), centers[i] - half[i], centers[i] + half[i]};
  validate_intervals(out);
  return out;
}

void validate_intervals(const std::vector<TargetInterval> &intervals) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const TargetInterval &t = intervals[i];
    if (t.n != static_cast<int>(i))
      throw Error(ErrorCode::IntervalsOverlap, "interval indices must be 0..n-1 in order");
    if (!(t.g_low < t.g_high))
      throw Error(ErrorCode::IntervalsOverlap,
                  "interval " + std::to_string(i) + " has zero or negative width");
    if (i > 0 && !(intervals[i - 1].g_high < t.g_low))
      throw Error(ErrorCode::IntervalsOverlap, "intervals " + std::to_string(i - 1) + " and " +
                                                   std::to_string(i) + " leave no gap");
  }
}

} // namespace rramprog
