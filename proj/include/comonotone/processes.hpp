#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "comonotone/core.hpp"
#include "comonotone/rng.hpp"

namespace comonotone {

using RealFn = std::function<double(double)>;
using TimeStateFn = std::function<double(double, double)>;

// ---------------------------------------------------------------------------
// Brownian motion, its sine-series representation, Brownian bridge

Path simulate_bm(const TimeGrid& grid, RngStream& rng);

/// Truncated series sqrt(2T) sum_{n<=N} xi_n (1 - cos(pi n t / T)) / (pi n).
/// Every basis function is nonnegative on [0, T].
class BmSeriesSampler {
 public:
  BmSeriesSampler(TimeGrid grid, std::size_t n_terms);
  Path operator()(RngStream& rng) const;
  /// Basis function n (1-based) evaluated at time t.
  double basis(std::size_t n, double t) const;
  std::size_t n_terms() const { return n_terms_; }

 private:
  TimeGrid grid_;
  std::size_t n_terms_;
  Eigen::MatrixXd basis_;  // nodes x terms
};

Path simulate_bm_series(const TimeGrid& grid, std::size_t n_terms, RngStream& rng);

/// Covariance of the N-term series: 2T sum_{n<=N} (1-cos(pi n s/T))(1-cos(pi n t/T)) / (pi n)^2.
double bm_series_covariance(double s, double t, double horizon, std::size_t n_terms);

Path simulate_bridge(const TimeGrid& grid, RngStream& rng);
double bridge_covariance(double s, double t, double horizon);

// ---------------------------------------------------------------------------
// Fractional Brownian motion

/// C^H(s,t) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2. Throws DomainError for H outside (0, 1].
double fbm_covariance(double s, double t, double hurst);

/// Covariance matrix of the fBm on the grid nodes t_1..t_n (t_0 = 0 is deterministic).
Eigen::MatrixXd fbm_covariance_matrix(const TimeGrid& grid, double hurst);

/// Raised when a covariance matrix is numerically not PSD.
class FactorizationError : public SimulationError {
 public:
  FactorizationError(const std::string& what, double min_eigenvalue)
      : SimulationError(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Exact Gaussian sampling of fBm on the nodes through a dense factor of the
/// covariance matrix. Uses Cholesky, falling back to a symmetric square root
/// when the matrix is PSD but singular (H = 1).
class FbmCholeskySampler {
 public:
  FbmCholeskySampler(TimeGrid grid, double hurst);
  Path operator()(RngStream& rng) const;
  const Eigen::MatrixXd& factor() const { return factor_; }

 private:
  TimeGrid grid_;
  double hurst_;
  Eigen::MatrixXd factor_;
};

Path simulate_fbm_cholesky(const TimeGrid& grid, double hurst, RngStream& rng);

/// Normalizing constant making the Mandelbrot-Van Ness integral have
/// variance t^{2H}: (Gamma(H+1/2)^2 / (Gamma(2H+1) sin(pi H)))^{-1/2}.
double mandelbrot_van_ness_constant(double hurst);

/// Discretized Mandelbrot-Van Ness representation B^H = B^{H,1} + B^{H,2}
/// driven by two independent Brownian motions.
///
/// B^{H,1} uses `quad_steps` geometric cells on [0, tail_cutoff]; beyond the
/// cutoff the kernel is replaced by its first-order term (H-1/2) t s^{H-3/2},
/// which contributes an independent term proportional to t. B^{H,2} uses a
/// uniform sub-grid of [0, T] with at least `quad_steps` cells aligned on the
/// nodes. Both use exact cell averages of the kernels. Requires H in (0, 1).
class FbmMvnSampler {
 public:
  FbmMvnSampler(TimeGrid grid, double hurst, double tail_cutoff = 0.0, std::size_t quad_steps = 0);
  Path operator()(RngStream& rng) const;

 private:
  TimeGrid grid_;
  double hurst_;
  double scale_;
  std::vector<double> tail_cell_width_;
  Eigen::MatrixXd tail_weights_;      // nodes x tail cells
  std::size_t sub_per_step_;
  double sub_width_;
  std::vector<double> local_weights_;  // by lag
  double far_tail_sd_;                 // coefficient of t * Z beyond the cutoff
};

Path simulate_fbm_mvn(const TimeGrid& grid, double hurst, RngStream& rng, double tail_cutoff = 0.0,
                      std::size_t quad_steps = 0);

// ---------------------------------------------------------------------------
// Liouville processes and Wiener integrals depending on a parameter

/// X_t = int_0^t f(t-s) dW_s by a midpoint rule on a sub-grid with
/// `substeps` cells per grid step: X_{t_k} = sum_j f(t_k - s_j - d/2) dW_j.
/// With f = 1 the output is the cumulative sum of the increments.
class LiouvilleSampler {
 public:
  LiouvilleSampler(TimeGrid grid, RealFn kernel, std::size_t substeps = 1);
  Path operator()(RngStream& rng) const;
  /// True when every kernel evaluation used by the sampler is >= 0.
  bool kernel_nonnegative() const;

 private:
  TimeGrid grid_;
  std::size_t substeps_;
  std::vector<double> kernel_values_;  // f((m + 1/2) d), m = 0 .. n*substeps-1
};

Path simulate_liouville(const TimeGrid& grid, const RealFn& kernel, RngStream& rng,
                        std::size_t substeps = 1);

/// Cov(X_s, X_t) = int_0^{s wedge t} f(|t-s| + v) f(v) dv by tanh-sinh
/// quadrature (integrable singularities of f at 0 are allowed).
double liouville_covariance(const RealFn& kernel, double s, double t);

/// X_t = int_0^infinity f(t, s) dW_s by a midpoint rule on `quad_steps`
/// uniform cells of [0, T] (rounded up to a multiple of the grid steps) and,
/// when tail_cutoff > T, `quad_steps` geometric cells on [T, tail_cutoff].
/// The driving noise is shared across t.
class WienerParamSampler {
 public:
  WienerParamSampler(TimeGrid grid, TimeStateFn kernel, double tail_cutoff = 0.0,
                     std::size_t quad_steps = 0);
  Path operator()(RngStream& rng) const;

 private:
  TimeGrid grid_;
  std::vector<double> cell_width_;
  Eigen::MatrixXd weights_;  // nodes x cells
};

Path simulate_wiener_param(const TimeGrid& grid, const TimeStateFn& kernel, RngStream& rng,
                           double tail_cutoff = 0.0, std::size_t quad_steps = 0);

// ---------------------------------------------------------------------------
// Brownian diffusions (Euler scheme) and Black-Scholes

struct DiffusionSpec {
  TimeStateFn drift;  // b(t, x)
  TimeStateFn vol;    // sigma(t, x) >= 0
  double x0 = 0.0;
  /// Uniform Lipschitz constant of b in x, when known.
  std::optional<double> drift_lipschitz;
};

enum class MonotonyCheck { Satisfied, Violated, Unchecked };

/// Step condition h < 1/[b]_Lip under which x -> x + h b(t, x) is non-decreasing.
MonotonyCheck euler_monotony_check(const DiffusionSpec& spec, const TimeGrid& grid);

/// X_{k+1} = X_k + h b(t_k, X_k) + sigma(t_k, X_k) sqrt(h) Z_k.
Path simulate_euler(const DiffusionSpec& spec, const TimeGrid& grid, RngStream& rng);
/// Two coupled Euler paths driven by Z_k and -Z_k from the same stream.
std::pair<Path, Path> simulate_euler_antithetic(const DiffusionSpec& spec, const TimeGrid& grid,
                                                RngStream& rng);

struct GBMSpec {
  double s0 = 1.0;
  double rate = 0.0;
  double vol = 0.2;
  void validate() const;
};

/// S_t = s0 exp(sigma W_t + (r - sigma^2/2) t) on the nodes.
Path simulate_gbm_exact(const GBMSpec& spec, const TimeGrid& grid, RngStream& rng);
std::pair<Path, Path> simulate_gbm_antithetic(const GBMSpec& spec, const TimeGrid& grid,
                                              RngStream& rng);

// ---------------------------------------------------------------------------
// Processes with independent increments (finite-activity jumps)

/// Law of a jump size with its log-Laplace transform log E e^{uJ}.
class JumpLaw {
 public:
  enum class Kind { Constant, Normal, Exponential, Uniform };

  static JumpLaw constant(double value);
  static JumpLaw normal(double mean, double sd);
  static JumpLaw exponential(double rate);  // positive jumps with mean 1/rate
  static JumpLaw uniform(double lo, double hi);

  Kind kind() const { return kind_; }
  double sample(RngStream& rng) const;
  /// May be +infinity (Exponential with u >= rate).
  double log_laplace(double u) const;
  double mean() const;
  bool nonnegative() const;

 private:
  JumpLaw(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_;
  double b_;
};

struct FixedJump {
  double time;
  JumpLaw law;
};

/// X_t = b(t) + W_{c(t)} + compound Poisson(lambda, J) + sum_i U_i 1{t_i <= t}.
struct PIISpec {
  RealFn drift = [](double) { return 0.0; };        // b(t)
  RealFn time_change = [](double t) { return t; };  // c(t), non-decreasing, c(0) = 0
  double intensity = 0.0;                           // lambda
  JumpLaw jump = JumpLaw::constant(0.0);
  std::vector<FixedJump> fixed_jumps;

  /// Checks c(0) = 0, c non-decreasing on the grid, lambda >= 0, fixed times in [0, T].
  void validate(const TimeGrid& grid) const;
};

/// Cadlag path on the nodes; a jump at time tau is attached to the first node >= tau.
Path simulate_pii(const PIISpec& spec, const TimeGrid& grid, RngStream& rng);

/// Psi(u, t) = log E e^{u X_t}
///           = u b(t) + u^2 c(t) / 2 + lambda t (E e^{uJ} - 1) + sum_{t_i <= t} log E e^{u U_i}.
/// Throws DomainError when a component transform is not finite.
double log_laplace_pii(const PIISpec& spec, double u, double t);

/// E X_t = b(t) + lambda t E J + sum_{t_i <= t} E U_i.
double pii_mean(const PIISpec& spec, double t);

}  // namespace comonotone
