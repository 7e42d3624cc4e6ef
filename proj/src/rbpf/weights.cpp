#include "gmslam/rbpf/weights.hpp"

#include <algorithm>
#include <cmath>

namespace gmslam::rbpf {

namespace {

// Weights relative to the largest one: r_i = exp(l_i - max), so max maps to 1.
std::vector<double> relative_weights(std::span<const double> log_weights, double& sum) {
  if (log_weights.empty()) throw FilterDivergence("no particles");
  double m = -INFINITY;
  for (const double l : log_weights) {
    if (std::isnan(l) || l == INFINITY) throw FilterDivergence("non-finite importance weight");
    m = std::max(m, l);
  }
  if (!std::isfinite(m)) throw FilterDivergence("all importance weights underflowed");
  std::vector<double> r(log_weights.size());
  sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = std::exp(log_weights[i] - m);
    sum += r[i];
  }
  return r;
}

}  // namespace

double log_sum_exp(std::span<const double> log_weights) {
  double sum = 0.0;
  relative_weights(log_weights, sum);
  const double m = *std::max_element(log_weights.begin(), log_weights.end());
  return m + std::log(sum);
}

void normalize_log_weights(std::span<double> log_weights) {
  const double lse = log_sum_exp(log_weights);
  for (double& l : log_weights) l -= lse;
}

double effective_sample_size(std::span<const double> log_weights) {
  double sum = 0.0;
  const std::vector<double> r = relative_weights(log_weights, sum);
  double squares = 0.0;
  for (const double v : r) squares += v * v;
  // (sum r)^2 / sum r^2 == 1 / sum w^2 for w = r / sum r.
  const double ess = sum * sum / squares;
  return std::clamp(ess, 1.0, static_cast<double>(log_weights.size()));
}

std::vector<std::size_t> systematic_resample(std::span<const double> log_weights, double u) {
  double total = 0.0;
  const std::vector<double> r = relative_weights(log_weights, total);
  const std::size_t m = r.size();
  const double spacing = total / static_cast<double>(m);

  std::vector<std::size_t> picks(m);
  std::size_t j = 0;
  double cumulative = r[0];
  for (std::size_t i = 0; i < m; ++i) {
    const double position = (u + static_cast<double>(i)) * spacing;
    while (position >= cumulative && j + 1 < m) {
      ++j;
      cumulative += r[j];
    }
    picks[i] = j;
  }
  return picks;
}

std::size_t best_index(std::span<const double> log_weights) {
  if (log_weights.empty()) throw std::invalid_argument("best_index of an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < log_weights.size(); ++i)
    if (log_weights[i] > log_weights[best]) best = i;
  return best;
}

}  // namespace gmslam::rbpf
