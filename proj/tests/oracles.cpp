#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

bool corridor_collides(const CorridorCase& c) {
  const double closing = (c.vH + c.vR) * c.T;
  if (c.initial_distance <= 0.0) return true;
  // Trigger: first k with d0 - k * closing < d_threshold.
  const long j = c.initial_distance < c.d_threshold
                     ? 0L
                     : static_cast<long>(std::floor((c.initial_distance - c.d_threshold) / closing)) + 1;
  const long effective = j + c.delay_steps;
  // Full closing speed up to the effective step, then (vH - vR) per step.
  const long contact_step = static_cast<long>(std::ceil(c.initial_distance / closing));
  if (contact_step <= std::min<long>(effective, c.horizon)) return true;
  if (c.vR >= c.vH || effective >= c.horizon) return false;
  const double at_effective = c.initial_distance - static_cast<double>(effective) * closing;
  const long more = static_cast<long>(std::ceil(at_effective / ((c.vH - c.vR) * c.T)));
  return effective + more <= c.horizon;
}

int corridor_cutoff_steps(double d_threshold, double vH, double vR, double T) {
  return static_cast<int>(std::ceil(d_threshold / ((vH + vR) * T)));
}

double quantile7(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<std::uint64_t> largest_remainder(std::uint64_t r, const std::vector<std::uint64_t>& numerators,
                                             std::uint64_t denominator) {
  std::vector<std::uint64_t> out(numerators.size());
  std::vector<std::uint64_t> rem(numerators.size());
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < numerators.size(); ++i) {
    out[i] = r * numerators[i] / denominator;
    rem[i] = r * numerators[i] % denominator;
    used += out[i];
  }
  std::vector<std::size_t> order(numerators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; used < r; ++k, ++used) ++out[order[k]];
  return out;
}

}  // namespace oracle
