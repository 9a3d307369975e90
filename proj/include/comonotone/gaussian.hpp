#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "comonotone/process.hpp"
#include "comonotone/rng.hpp"

namespace comonotone {

/// Symmetric positive-semidefinite covariance matrix. Construction checks
/// exact symmetry and min eigenvalue >= -1e-10 * max eigenvalue.
class CovMatrix {
 public:
  explicit CovMatrix(Eigen::MatrixXd entries);

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// Eigenvalues in increasing order.
  Eigen::VectorXd eigenvalues() const;
  Eigen::VectorXd singular_values() const;

 private:
  Eigen::MatrixXd entries_;
};

/// Pitt's criterion: all covariance entries are >= 0 (exact comparison).
bool pitt_check(const CovMatrix& cov);

/// The 5x5 nonnegative rank-4 matrix that admits no factorization A A^T with A >= 0.
CovMatrix horn_matrix();

struct NonnegFactorizationOptions {
  double tol = 1e-8;
  std::size_t max_iter = 20000;
  std::size_t restarts = 20;
  std::uint64_t seed = 0;
};

/// Outcome of the heuristic search for A >= 0 with Sigma = A A^T.
///
/// Failure means "no witness found" within the budget; it is numerical
/// evidence only, never a proof that no factorization exists.
struct NonnegFactorization {
  bool found = false;
  Eigen::MatrixXd factor;       // best factor seen (d x r)
  double residual = 0.0;        // Frobenius norm of Sigma - A A^T for the best factor
  std::size_t rank = 0;
  std::size_t restarts_used = 0;
};

/// Symmetric multiplicative-update NMF, A <- A .* (1/2 + (Sigma A) ./ (2 A A^T A)),
/// from `restarts` random nonnegative starts (restart i uses RngStream(seed, i)).
NonnegFactorization nonneg_factorization(const CovMatrix& cov, std::size_t rank,
                                         const NonnegFactorizationOptions& options = {});

/// Sweeps the inner dimension r = d .. 2d and stops at the first success;
/// on failure returns the best residual over the sweep.
NonnegFactorization find_nonneg_factorization(const CovMatrix& cov,
                                              const NonnegFactorizationOptions& options = {});

/// Centered Gaussian sampling through the symmetric eigen-decomposition,
/// so singular (semidefinite) matrices are handled.
class GaussianSampler {
 public:
  explicit GaussianSampler(const CovMatrix& cov);
  Eigen::VectorXd operator()(RngStream& rng) const;

 private:
  Eigen::MatrixXd root_;
};

Eigen::VectorXd gaussian_sample(const CovMatrix& cov, RngStream& rng);

/// Gaussian vector exposed as a path on the grid {0, 1/(d-1), ..., 1}
/// (coordinate k at node k), for use with the labs.
Process make_gaussian_vector(const CovMatrix& cov);

}  // namespace comonotone
