#include "comonotone/estimate.hpp"

#include <cmath>

#include "comonotone/core.hpp"

namespace comonotone {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MCEstimate MCEstimate::from_samples(std::span<const double> samples) {
  if (samples.size() < 2) throw StructuralError("an MC estimate needs at least two samples");
  const double n = static_cast<double>(samples.size());
  MCEstimate est;
  est.n_samples = samples.size();
  est.mean = pairwise_sum(samples) / n;
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = samples[i] - est.mean;
    sq[i] = d * d;
  }
  est.variance = pairwise_sum(sq) / (n - 1.0);
  est.std_error = std::sqrt(est.variance / n);
  return est;
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw StructuralError("sample_covariance needs two sequences of equal length >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / n;
  const double my = pairwise_sum(y) / n;
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
  return pairwise_sum(prod) / (n - 1.0);
}

std::vector<double> column(std::span<const double> table, std::size_t cols, std::size_t col) {
  if (cols == 0 || table.size() % cols != 0 || col >= cols)
    throw StructuralError("column: table shape mismatch");
  const std::size_t rows = table.size() / cols;
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = table[i * cols + col];
  return out;
}

}  // namespace comonotone
