#pragma once

#include <span>
#include <string>
#include <vector>

#include "comonotone/estimate.hpp"
#include "comonotone/functionals.hpp"
#include "comonotone/lab.hpp"
#include "comonotone/process.hpp"

namespace comonotone {

/// Convex test function phi with its right derivative.
class ConvexTestFn {
 public:
  enum class Kind { CallPart, AbsDev, Square, SoftPlus, Linear };

  /// (x - K)_+
  static ConvexTestFn call_part(double strike);
  /// |x - K|
  static ConvexTestFn abs_dev(double center);
  /// x^2
  static ConvexTestFn square();
  /// eps log(1 + e^{(x - K)/eps}), a smoothed call
  static ConvexTestFn soft_plus(double strike, double eps);
  /// x (convex and concave; used for flat control curves)
  static ConvexTestFn linear();

  Kind kind() const { return kind_; }
  /// K for CallPart, AbsDev and SoftPlus.
  double strike() const { return k_; }
  double operator()(double x) const;
  double right_derivative(double x) const;
  std::string name() const;

 private:
  ConvexTestFn(Kind kind, double k, double eps) : kind_(kind), k_(k), eps_(eps) {}
  Kind kind_;
  double k_;
  double eps_;
};

/// Expectations along a parameter grid computed with common random numbers,
/// plus the paired consecutive differences point[k+1] - point[k].
struct PeacockCurve {
  std::string name;
  std::vector<double> parameters;
  std::vector<MCEstimate> points;
  std::vector<MCEstimate> differences;
  std::string notes;

  /// Every consecutive difference is >= -z * its standard error.
  bool monotone(double z) const;
  /// Smallest difference in units of its standard error (+inf when all
  /// differences have zero error and are >= 0).
  double min_difference_z() const;
  /// Every point lies within z standard errors of `value`.
  bool flat(double value, double z) const;
};

/// Builds a curve from a row-major n_paths x parameters.size() table of
/// per-path values.
PeacockCurve curve_from_table(std::string name, std::vector<double> parameters, std::span<const double> table);

/// sigma -> E phi( int_0^T e^{sigma X_t - Psi(sigma, t)} mu(dt) ) for a PII X;
/// one path per stream reused for every sigma.
PeacockCurve exp_pii_peacock(const PIISpec& spec, const WeightMeasure& mu, const ConvexTestFn& phi,
                             std::span<const double> sigma_grid, const RunOptions& options);

/// t -> E phi( int_[0,t] (X_s - E X_s) mu(ds) ). Times in t_grid must be grid
/// nodes. E X_s comes from the process closed form when available, else from
/// a pre-pass with 10x the path budget on independent streams (noted in the
/// curve notes with its largest standard error).
PeacockCurve centered_antiderivative_peacock(const Process& process, const WeightMeasure& mu,
                                             const ConvexTestFn& phi, std::span<const double> t_grid,
                                             const RunOptions& options);

/// sigma -> e^{-rT} E phi( (1/T) int_0^T S^sigma_s ds ) in the Black-Scholes
/// model (left-point rule on the grid), one Brownian path reused for every sigma.
PeacockCurve asian_vega_curve(const GBMSpec& base, const TimeGrid& grid, std::span<const double> sigma_grid,
                              const ConvexTestFn& phi, const RunOptions& options);

/// t -> E phi( (1/t) int_0^t e^{B_s - s/2} ds ) for t in t_grid (grid nodes > 0).
PeacockCurve carr_maturity_curve(const TimeGrid& grid, std::span<const double> t_grid, const ConvexTestFn& phi,
                                 const RunOptions& options);

struct VegaIdentityReport {
  double sigma = 0.0;
  MCEstimate finite_difference;  // central difference with step 1e-3
  MCEstimate cameron_martin;     // E phi'_r(e^{sigma Z + sigma^2/2}) Z
  double pooled_std_error = 0.0;
  bool agree(double z) const;
};

/// f(sigma) = E phi(e^{sigma Z - sigma^2/2}); both estimators of f'(sigma)
/// use the same normal samples.
VegaIdentityReport scalar_vega_identity(const ConvexTestFn& phi, double sigma, const RunOptions& options);

/// Black-Scholes vega at zero rate, unit spot and maturity: pdf(d1).
double black_scholes_vega(double strike, double sigma);

}  // namespace comonotone
