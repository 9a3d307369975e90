#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "comonotone/estimate.hpp"
#include "comonotone/functionals.hpp"
#include "comonotone/lab.hpp"
#include "comonotone/process.hpp"

namespace comonotone {

enum class PredictedSign { NonNegative, NonPositive, None };

const char* to_string(PredictedSign s);

/// Sign of Cov(F, G) implied by the declared monotonicities.
PredictedSign predicted_sign(Monotonicity f, Monotonicity g);

struct CovTestReport {
  std::string name;
  double cov_estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  PredictedSign predicted = PredictedSign::None;
  Verdict verdict = Verdict::Inconclusive;
  double z_threshold = 4.0;
  /// Kurtosis of the centered products (F - mean F)(G - mean G).
  double product_kurtosis = 0.0;
};

/// Products with a kurtosis above this make the CLT standard error unreliable.
inline constexpr double kKurtosisGuard = 100.0;

/// Covariance test from paired samples F_i = F(X_i), G_i = G(X_i).
///
/// The standard error is the sample standard deviation of the centered
/// products over sqrt(N). A verdict is "violation" iff the estimate lies
/// beyond z standard errors on the wrong side of the predicted sign; a
/// "consistent" verdict is downgraded to "inconclusive" when the product
/// kurtosis exceeds kKurtosisGuard.
CovTestReport cov_test(std::span<const double> f, std::span<const double> g, PredictedSign predicted,
                       double z, std::string name = {});

/// Row-major N x k table of functional values on shared paths: path i is
/// drawn from RngStream(seed, i). Throws SimulationError on a non-finite value.
std::vector<double> functional_table(const Process& process, std::span<const MonotoneFunctional> functionals,
                                     const RunOptions& options);

/// Requires n_paths >= 100.
CovTestReport estimate_cov(const Process& process, const MonotoneFunctional& f, const MonotoneFunctional& g,
                           const RunOptions& options);

/// Covariance tests for the given index pairs (all pairs i < j when empty),
/// every functional evaluated once per shared path.
std::vector<CovTestReport> cov_sweep(const Process& process, std::span<const MonotoneFunctional> functionals,
                                     const RunOptions& options,
                                     std::vector<std::pair<std::size_t, std::size_t>> pairs = {});

struct AntitheticReport {
  MCEstimate plain;       // F(X_i)
  MCEstimate antithetic;  // (F(X_i) + F(T X_i)) / 2 on the same driving noise
  double variance_ratio = 0.0;
  double ratio_ci_low = 0.0;  // bootstrap percentile interval
  double ratio_ci_high = 0.0;
  double ci_level = 0.99;
};

/// Functional antithetic estimator. Requires a process with a reflection
/// coupling. The ratio interval resamples the N noise draws `bootstrap`
/// times (replicate b uses a stream derived from the seed).
AntitheticReport antithetic_estimate(const Process& process, const MonotoneFunctional& f, const RunOptions& options,
                                     std::size_t bootstrap = 1000, double ci_level = 0.99);

struct ConditionalExtremum {
  double x = 0.0;
  std::size_t n_conditioning = 0;
  double probability = 0.0;
  double std_error = 0.0;
  bool inconclusive = false;  // no sampled path with X_T >= x
};

struct RunningExtremaReport {
  double y = 0.0;
  MCEstimate unconditional;  // P(sup X >= y)
  std::vector<ConditionalExtremum> conditional;
  double min_conditional = 0.0;
  double gap = 0.0;  // min_conditional - unconditional
  Verdict verdict = Verdict::Inconclusive;
};

/// P(sup X >= y | X_T >= x) for each x <= y, against P(sup X >= y). The
/// verdict is "violation" when some conditional estimate lies more than z
/// pooled standard errors below the unconditional one.
RunningExtremaReport running_extrema_conditional(const Process& process, double y, std::span<const double> x_list,
                                                 const RunOptions& options);

}  // namespace comonotone
