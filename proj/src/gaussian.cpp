#include "comonotone/gaussian.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace comonotone {

namespace {

void check_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmin < -1e-10 * std::max(lmax, 0.0)) {
    std::ostringstream msg;
    msg << "covariance matrix is not positive semidefinite (min eigenvalue " << lmin << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

CovMatrix::CovMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
    throw StructuralError("covariance matrix must be square and non-empty");
  if (!entries_.allFinite()) throw DomainError("covariance matrix has non-finite entries");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (entries_(i, j) != entries_(j, i)) throw DomainError("covariance matrix is not symmetric");
  check_psd(entries_);
}

Eigen::VectorXd CovMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(entries_, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

Eigen::VectorXd CovMatrix::singular_values() const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(entries_);
  return svd.singularValues();
}

bool pitt_check(const CovMatrix& cov) { return (cov.entries().array() >= 0.0).all(); }

CovMatrix horn_matrix() {
  Eigen::MatrixXd m(5, 5);
  m << 1.0, 0.0, 0.0, 0.5, 0.5,
       0.0, 1.0, 0.75, 0.0, 0.5,
       0.0, 0.75, 1.0, 0.5, 0.0,
       0.5, 0.0, 0.5, 1.0, 0.0,
       0.5, 0.5, 0.0, 0.0, 1.0;
  return CovMatrix(std::move(m));
}

namespace {

double residual_of(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& a) {
  return (sigma - a * a.transpose()).norm();
}

}  // namespace

NonnegFactorization nonneg_factorization(const CovMatrix& cov, std::size_t rank,
                                         const NonnegFactorizationOptions& options) {
  if (rank == 0) throw DomainError("factorization rank must be >= 1");
  const Eigen::MatrixXd& sigma = cov.entries();
  const Eigen::Index d = sigma.rows();
  const auto r = static_cast<Eigen::Index>(rank);
  // initial entries of the order of the typical factor magnitude
  const double scale = std::sqrt(std::max(sigma.cwiseMax(0.0).mean(), 1e-300) / static_cast<double>(rank));

  NonnegFactorization best;
  best.rank = rank;
  best.residual = std::numeric_limits<double>::infinity();
  constexpr double kTiny = 1e-300;
  for (std::size_t restart = 0; restart < std::max<std::size_t>(options.restarts, 1); ++restart) {
    RngStream rng(options.seed, restart);
    Eigen::MatrixXd a(d, r);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < r; ++j) a(i, j) = scale * (0.1 + 2.0 * rng.uniform());
    double res = residual_of(sigma, a);
    for (std::size_t it = 0; it < options.max_iter && res > options.tol; ++it) {
      const Eigen::MatrixXd num = sigma.cwiseMax(0.0) * a;
      const Eigen::MatrixXd den = a * (a.transpose() * a);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < r; ++j) a(i, j) *= 0.5 + 0.5 * num(i, j) / (den(i, j) + kTiny);
      if (it % 16 == 15) res = residual_of(sigma, a);
    }
    res = residual_of(sigma, a);
    best.restarts_used = restart + 1;
    if (res < best.residual) {
      best.residual = res;
      best.factor = a;
    }
    if (res <= options.tol) {
      best.found = true;
      break;
    }
  }
  return best;
}

NonnegFactorization find_nonneg_factorization(const CovMatrix& cov, const NonnegFactorizationOptions& options) {
  const auto d = static_cast<std::size_t>(cov.dim());
  NonnegFactorization best;
  best.residual = std::numeric_limits<double>::infinity();
  for (std::size_t r = d; r <= 2 * d; ++r) {
    NonnegFactorization attempt = nonneg_factorization(cov, r, options);
    if (attempt.found) return attempt;
    if (attempt.residual < best.residual) best = std::move(attempt);
  }
  return best;
}

GaussianSampler::GaussianSampler(const CovMatrix& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov.entries());
  root_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Eigen::VectorXd GaussianSampler::operator()(RngStream& rng) const {
  Eigen::VectorXd z(root_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return root_ * z;
}

Eigen::VectorXd gaussian_sample(const CovMatrix& cov, RngStream& rng) { return GaussianSampler(cov)(rng); }

Process make_gaussian_vector(const CovMatrix& cov) {
  const auto d = static_cast<std::size_t>(cov.dim());
  if (d < 2) throw StructuralError("a Gaussian-vector path needs dimension >= 2");
  const TimeGrid grid(1.0, d - 1);
  auto sampler = std::make_shared<const GaussianSampler>(cov);
  return Process("gaussian_vector", grid, [sampler, grid](RngStream& rng) {
    const Eigen::VectorXd x = (*sampler)(rng);
    return Path(grid, std::vector<double>(x.data(), x.data() + x.size()));
  }, {}, [](double) { return 0.0; });
}

}  // namespace comonotone
