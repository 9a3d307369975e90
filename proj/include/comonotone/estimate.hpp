#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace comonotone {

/// Sample mean with its unbiased variance and standard error.
struct MCEstimate {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t n_samples = 0;
  double std_error = 0.0;

  /// Requires at least two samples.
  static MCEstimate from_samples(std::span<const double> samples);
};

/// Pairwise (cascade) summation in a fixed order, so the result depends only
/// on the input sequence.
double pairwise_sum(std::span<const double> values);

/// Unbiased sample covariance of two equally long sequences.
double sample_covariance(std::span<const double> x, std::span<const double> y);

/// Copy of column `col` from a row-major table with `cols` columns.
std::vector<double> column(std::span<const double> table, std::size_t cols, std::size_t col);

}  // namespace comonotone
