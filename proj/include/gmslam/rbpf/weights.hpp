#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace gmslam::rbpf {

/// All importance weights underflowed or became non-finite.
class FilterDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// log(sum(exp(log_weights))), computed stably.
/// Throws FilterDivergence if no weight is positive and finite.
double log_sum_exp(std::span<const double> log_weights);

/// Shifts log-weights so that sum(exp(w)) == 1.
void normalize_log_weights(std::span<double> log_weights);

/// 1 / sum(w^2) of the normalized weights.
double effective_sample_size(std::span<const double> log_weights);

/// Low-variance (systematic) resampling with the single draw `u` in [0, 1).
/// Returns, for each output slot, the index of the source particle; the
/// result is non-decreasing.
std::vector<std::size_t> systematic_resample(std::span<const double> log_weights, double u);

/// Index of the largest log-weight; ties go to the lowest index.
std::size_t best_index(std::span<const double> log_weights);

}  // namespace gmslam::rbpf
