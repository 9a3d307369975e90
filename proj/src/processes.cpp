#include "comonotone/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace comonotone {

namespace {

void check_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst <= 1.0)) {
    std::ostringstream msg;
    msg << "Hurst index " << hurst << " outside (0, 1]";
    throw DomainError(msg.str());
  }
}

Path path_from(const TimeGrid& grid, const Eigen::VectorXd& v, Interpretation kind) {
  return Path(grid, std::vector<double>(v.data(), v.data() + v.size()), kind);
}

}  // namespace

Path simulate_bm(const TimeGrid& grid, RngStream& rng) {
  const double sqrt_h = std::sqrt(grid.step());
  std::vector<double> w(grid.size());
  w[0] = 0.0;
  for (std::size_t k = 0; k < grid.n_steps(); ++k) w[k + 1] = w[k] + sqrt_h * rng.normal();
  return Path(grid, std::move(w));
}

BmSeriesSampler::BmSeriesSampler(TimeGrid grid, std::size_t n_terms)
    : grid_(grid), n_terms_(n_terms), basis_(grid.size(), n_terms) {
  if (n_terms == 0) throw DomainError("series needs at least one term");
  for (std::size_t k = 0; k < grid_.size(); ++k)
    for (std::size_t n = 1; n <= n_terms_; ++n) basis_(k, n - 1) = basis(n, grid_.point(k));
}

double BmSeriesSampler::basis(std::size_t n, double t) const {
  const double horizon = grid_.horizon();
  const double freq = std::numbers::pi * static_cast<double>(n);
  return std::sqrt(2.0 * horizon) * (1.0 - std::cos(freq * t / horizon)) / freq;
}

Path BmSeriesSampler::operator()(RngStream& rng) const {
  Eigen::VectorXd xi(n_terms_);
  for (std::size_t n = 0; n < n_terms_; ++n) xi[n] = rng.normal();
  return path_from(grid_, basis_ * xi, Interpretation::Continuous);
}

Path simulate_bm_series(const TimeGrid& grid, std::size_t n_terms, RngStream& rng) {
  return BmSeriesSampler(grid, n_terms)(rng);
}

double bm_series_covariance(double s, double t, double horizon, std::size_t n_terms) {
  double acc = 0.0;
  for (std::size_t n = 1; n <= n_terms; ++n) {
    const double freq = std::numbers::pi * static_cast<double>(n);
    acc += (1.0 - std::cos(freq * s / horizon)) * (1.0 - std::cos(freq * t / horizon)) / (freq * freq);
  }
  return 2.0 * horizon * acc;
}

Path simulate_bridge(const TimeGrid& grid, RngStream& rng) {
  const Path w = simulate_bm(grid, rng);
  const double horizon = grid.horizon();
  const double w_end = w.back();
  std::vector<double> x(grid.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = w[k] - (grid.point(k) / horizon) * w_end;
  x.front() = 0.0;
  x.back() = 0.0;
  return Path(grid, std::move(x));
}

double bridge_covariance(double s, double t, double horizon) {
  return std::min(s, t) - s * t / horizon;
}

double fbm_covariance(double s, double t, double hurst) {
  check_hurst(hurst);
  const double two_h = 2.0 * hurst;
  return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

Eigen::MatrixXd fbm_covariance_matrix(const TimeGrid& grid, double hurst) {
  const std::size_t n = grid.n_steps();
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      cov(i, j) = cov(j, i) = fbm_covariance(grid.point(i + 1), grid.point(j + 1), hurst);
  return cov;
}

FbmCholeskySampler::FbmCholeskySampler(TimeGrid grid, double hurst) : grid_(grid), hurst_(hurst) {
  check_hurst(hurst);
  const Eigen::MatrixXd cov = fbm_covariance_matrix(grid_, hurst_);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double lmin = lambda.minCoeff();
  const double lmax = lambda.maxCoeff();
  if (lmin < -1e-10 * std::max(lmax, 1.0)) {
    std::ostringstream msg;
    msg << "fBm covariance matrix is not positive semidefinite (min eigenvalue " << lmin << ")";
    throw FactorizationError(msg.str(), lmin);
  }
  factor_ = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Path FbmCholeskySampler::operator()(RngStream& rng) const {
  const auto n = static_cast<Eigen::Index>(grid_.n_steps());
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  Eigen::VectorXd out(n + 1);
  out[0] = 0.0;
  out.tail(n).noalias() = factor_ * z;
  return path_from(grid_, out, Interpretation::Continuous);
}

Path simulate_fbm_cholesky(const TimeGrid& grid, double hurst, RngStream& rng) {
  return FbmCholeskySampler(grid, hurst)(rng);
}

double mandelbrot_van_ness_constant(double hurst) {
  check_hurst(hurst);
  if (hurst == 1.0) throw DomainError("Mandelbrot-Van Ness representation needs H < 1");
  const double g = std::tgamma(hurst + 0.5);
  const double v = g * g / (std::tgamma(2.0 * hurst + 1.0) * std::sin(std::numbers::pi * hurst));
  return 1.0 / std::sqrt(v);
}

FbmMvnSampler::FbmMvnSampler(TimeGrid grid, double hurst, double tail_cutoff, std::size_t quad_steps)
    : grid_(grid), hurst_(hurst), scale_(mandelbrot_van_ness_constant(hurst)) {
  const double horizon = grid_.horizon();
  const std::size_t n = grid_.n_steps();
  if (tail_cutoff == 0.0) tail_cutoff = 50.0 * horizon;
  if (quad_steps == 0) quad_steps = 64 * n;
  if (!(tail_cutoff > 0.0)) throw DomainError("tail_cutoff must be positive");
  if (quad_steps < n) throw DomainError("quad_steps must be at least the number of grid steps");

  const double p = hurst_ + 0.5;
  const bool brownian = hurst_ == 0.5;

  // B^{H,1}: geometric cells [0, s_1], [s_1, s_1 rho], ..., ending at the cutoff
  const std::size_t cells = quad_steps;
  std::vector<double> edges(cells + 1);
  edges[0] = 0.0;
  const double first = std::min(1e-6 * horizon, tail_cutoff / static_cast<double>(cells));
  const double ratio = cells > 1 ? std::pow(tail_cutoff / first, 1.0 / static_cast<double>(cells - 1)) : 1.0;
  for (std::size_t j = 1; j <= cells; ++j) edges[j] = first * std::pow(ratio, static_cast<double>(j - 1));
  edges[cells] = tail_cutoff;
  tail_cell_width_.resize(cells);
  tail_weights_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid_.size()), static_cast<Eigen::Index>(cells));
  for (std::size_t j = 0; j < cells; ++j) {
    const double a = edges[j];
    const double b = edges[j + 1];
    tail_cell_width_[j] = b - a;
    if (brownian) continue;
    for (std::size_t k = 1; k < grid_.size(); ++k) {
      const double t = grid_.point(k);
      // exact cell average of (t+s)^{H-1/2} - s^{H-1/2}
      const double integral = (std::pow(t + b, p) - std::pow(t + a, p)) - (std::pow(b, p) - std::pow(a, p));
      tail_weights_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = integral / (p * (b - a));
    }
  }
  far_tail_sd_ = brownian ? 0.0
                          : (hurst_ - 0.5) * std::pow(tail_cutoff, hurst_ - 1.0) / std::sqrt(2.0 - 2.0 * hurst_);

  // B^{H,2}: uniform sub-grid aligned with the nodes
  sub_per_step_ = (quad_steps + n - 1) / n;
  sub_width_ = grid_.step() / static_cast<double>(sub_per_step_);
  const std::size_t total = sub_per_step_ * n;
  local_weights_.resize(total);
  for (std::size_t m = 0; m < total; ++m) {
    // average of u^{H-1/2} over [m d, (m+1) d]
    const double md = static_cast<double>(m);
    local_weights_[m] = brownian ? 1.0
                                 : std::pow(sub_width_, hurst_ - 0.5) *
                                       (std::pow(md + 1.0, p) - std::pow(md, p)) / p;
  }
}

Path FbmMvnSampler::operator()(RngStream& rng) const {
  const std::size_t n = grid_.n_steps();
  const std::size_t cells = tail_cell_width_.size();
  Eigen::VectorXd dw1(static_cast<Eigen::Index>(cells));
  for (std::size_t j = 0; j < cells; ++j) dw1[static_cast<Eigen::Index>(j)] = std::sqrt(tail_cell_width_[j]) * rng.normal();
  const double far = rng.normal();
  const std::size_t total = sub_per_step_ * n;
  std::vector<double> dw2(total);
  const double sqrt_d = std::sqrt(sub_width_);
  for (auto& x : dw2) x = sqrt_d * rng.normal();

  Eigen::VectorXd first = tail_weights_ * dw1;
  std::vector<double> out(grid_.size(), 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t upto = k * sub_per_step_;
    double acc = 0.0;
    for (std::size_t j = 0; j < upto; ++j) acc += local_weights_[upto - 1 - j] * dw2[j];
    const double t = grid_.point(k);
    out[k] = scale_ * (first[static_cast<Eigen::Index>(k)] + far_tail_sd_ * t * far + acc);
  }
  return Path(grid_, std::move(out));
}

Path simulate_fbm_mvn(const TimeGrid& grid, double hurst, RngStream& rng, double tail_cutoff,
                      std::size_t quad_steps) {
  return FbmMvnSampler(grid, hurst, tail_cutoff, quad_steps)(rng);
}

LiouvilleSampler::LiouvilleSampler(TimeGrid grid, RealFn kernel, std::size_t substeps)
    : grid_(grid), substeps_(substeps) {
  if (substeps == 0) throw DomainError("Liouville sampler needs substeps >= 1");
  const std::size_t total = grid_.n_steps() * substeps_;
  const double d = grid_.step() / static_cast<double>(substeps_);
  kernel_values_.resize(total);
  for (std::size_t m = 0; m < total; ++m) {
    const double u = (static_cast<double>(m) + 0.5) * d;
    const double v = kernel(u);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "Liouville kernel is not finite at u = " << u;
      throw DomainError(msg.str());
    }
    kernel_values_[m] = v;
  }
}

bool LiouvilleSampler::kernel_nonnegative() const {
  return std::all_of(kernel_values_.begin(), kernel_values_.end(), [](double v) { return v >= 0.0; });
}

Path LiouvilleSampler::operator()(RngStream& rng) const {
  const std::size_t total = kernel_values_.size();
  const double sqrt_d = std::sqrt(grid_.step() / static_cast<double>(substeps_));
  std::vector<double> dw(total);
  for (auto& x : dw) x = sqrt_d * rng.normal();
  std::vector<double> out(grid_.size(), 0.0);
  for (std::size_t k = 1; k < grid_.size(); ++k) {
    const std::size_t upto = k * substeps_;
    double acc = 0.0;
    for (std::size_t j = 0; j < upto; ++j) acc += kernel_values_[upto - 1 - j] * dw[j];
    out[k] = acc;
  }
  return Path(grid_, std::move(out));
}

Path simulate_liouville(const TimeGrid& grid, const RealFn& kernel, RngStream& rng, std::size_t substeps) {
  return LiouvilleSampler(grid, kernel, substeps)(rng);
}

WienerParamSampler::WienerParamSampler(TimeGrid grid, TimeStateFn kernel, double tail_cutoff,
                                       std::size_t quad_steps)
    : grid_(grid) {
  const std::size_t n = grid_.n_steps();
  const double horizon = grid_.horizon();
  if (tail_cutoff == 0.0) tail_cutoff = 50.0 * horizon;
  if (quad_steps == 0) quad_steps = 64 * n;
  if (quad_steps < n) throw DomainError("quad_steps must be at least the number of grid steps");
  const std::size_t per_step = (quad_steps + n - 1) / n;
  std::vector<double> edges;
  edges.reserve(per_step * n + quad_steps + 1);
  const double d = grid_.step() / static_cast<double>(per_step);
  for (std::size_t j = 0; j < per_step * n; ++j) edges.push_back(static_cast<double>(j) * d);
  edges.push_back(horizon);
  if (tail_cutoff > horizon) {
    const double ratio = std::pow(tail_cutoff / horizon, 1.0 / static_cast<double>(quad_steps));
    for (std::size_t j = 1; j <= quad_steps; ++j) edges.push_back(horizon * std::pow(ratio, static_cast<double>(j)));
    edges.back() = tail_cutoff;
  }
  const std::size_t cells = edges.size() - 1;
  cell_width_.resize(cells);
  weights_.resize(static_cast<Eigen::Index>(grid_.size()), static_cast<Eigen::Index>(cells));
  for (std::size_t j = 0; j < cells; ++j) {
    cell_width_[j] = edges[j + 1] - edges[j];
    const double mid = 0.5 * (edges[j] + edges[j + 1]);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const double v = kernel(grid_.point(k), mid);
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "Wiener-integral kernel is not finite at (t, s) = (" << grid_.point(k) << ", " << mid << ")";
        throw DomainError(msg.str());
      }
      weights_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = v;
    }
  }
}

Path WienerParamSampler::operator()(RngStream& rng) const {
  Eigen::VectorXd dw(static_cast<Eigen::Index>(cell_width_.size()));
  for (std::size_t j = 0; j < cell_width_.size(); ++j)
    dw[static_cast<Eigen::Index>(j)] = std::sqrt(cell_width_[j]) * rng.normal();
  return path_from(grid_, weights_ * dw, Interpretation::Continuous);
}

Path simulate_wiener_param(const TimeGrid& grid, const TimeStateFn& kernel, RngStream& rng,
                           double tail_cutoff, std::size_t quad_steps) {
  return WienerParamSampler(grid, kernel, tail_cutoff, quad_steps)(rng);
}

MonotonyCheck euler_monotony_check(const DiffusionSpec& spec, const TimeGrid& grid) {
  if (!spec.drift_lipschitz) return MonotonyCheck::Unchecked;
  const double lip = *spec.drift_lipschitz;
  if (lip <= 0.0) return MonotonyCheck::Satisfied;
  return grid.step() < 1.0 / lip ? MonotonyCheck::Satisfied : MonotonyCheck::Violated;
}

namespace {

double euler_step(const DiffusionSpec& spec, double t, double x, double h, double sqrt_h, double z,
                  std::size_t k) {
  const double next = x + h * spec.drift(t, x) + spec.vol(t, x) * sqrt_h * z;
  if (!std::isfinite(next)) {
    std::ostringstream msg;
    msg << "Euler scheme produced a non-finite state at step " << k << " (t = " << t << ")";
    throw SimulationError(msg.str());
  }
  return next;
}

}  // namespace

Path simulate_euler(const DiffusionSpec& spec, const TimeGrid& grid, RngStream& rng) {
  const double h = grid.step();
  const double sqrt_h = std::sqrt(h);
  std::vector<double> x(grid.size());
  x[0] = spec.x0;
  for (std::size_t k = 0; k < grid.n_steps(); ++k)
    x[k + 1] = euler_step(spec, grid.point(k), x[k], h, sqrt_h, rng.normal(), k);
  return Path(grid, std::move(x));
}

std::pair<Path, Path> simulate_euler_antithetic(const DiffusionSpec& spec, const TimeGrid& grid,
                                                RngStream& rng) {
  const double h = grid.step();
  const double sqrt_h = std::sqrt(h);
  std::vector<double> x(grid.size());
  std::vector<double> y(grid.size());
  x[0] = y[0] = spec.x0;
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const double z = rng.normal();
    const double t = grid.point(k);
    x[k + 1] = euler_step(spec, t, x[k], h, sqrt_h, z, k);
    y[k + 1] = euler_step(spec, t, y[k], h, sqrt_h, -z, k);
  }
  return {Path(grid, std::move(x)), Path(grid, std::move(y))};
}

void GBMSpec::validate() const {
  if (!(s0 > 0.0)) throw DomainError("GBM needs s0 > 0");
  if (!(vol > 0.0)) throw DomainError("GBM needs sigma > 0");
  if (!std::isfinite(rate)) throw DomainError("GBM rate must be finite");
}

namespace {

Path gbm_from_bm(const GBMSpec& spec, const TimeGrid& grid, const std::vector<double>& w) {
  std::vector<double> s(grid.size());
  const double drift = spec.rate - 0.5 * spec.vol * spec.vol;
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = spec.s0 * std::exp(spec.vol * w[k] + drift * grid.point(k));
  return Path(grid, std::move(s));
}

}  // namespace

Path simulate_gbm_exact(const GBMSpec& spec, const TimeGrid& grid, RngStream& rng) {
  spec.validate();
  const Path w = simulate_bm(grid, rng);
  return gbm_from_bm(spec, grid, std::vector<double>(w.values().begin(), w.values().end()));
}

std::pair<Path, Path> simulate_gbm_antithetic(const GBMSpec& spec, const TimeGrid& grid, RngStream& rng) {
  spec.validate();
  const Path w = simulate_bm(grid, rng);
  std::vector<double> up(w.values().begin(), w.values().end());
  std::vector<double> down(up.size());
  for (std::size_t k = 0; k < up.size(); ++k) down[k] = -up[k];
  return {gbm_from_bm(spec, grid, up), gbm_from_bm(spec, grid, down)};
}

JumpLaw JumpLaw::constant(double value) { return JumpLaw(Kind::Constant, value, 0.0); }

JumpLaw JumpLaw::normal(double mean, double sd) {
  if (!(sd >= 0.0)) throw DomainError("normal jump law needs sd >= 0");
  return JumpLaw(Kind::Normal, mean, sd);
}

JumpLaw JumpLaw::exponential(double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential jump law needs rate > 0");
  return JumpLaw(Kind::Exponential, rate, 0.0);
}

JumpLaw JumpLaw::uniform(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("uniform jump law needs lo < hi");
  return JumpLaw(Kind::Uniform, lo, hi);
}

double JumpLaw::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::Constant: return a_;
    case Kind::Normal: return a_ + b_ * rng.normal();
    case Kind::Exponential: return rng.exponential(a_);
    case Kind::Uniform: return a_ + (b_ - a_) * rng.uniform();
  }
  return 0.0;
}

double JumpLaw::log_laplace(double u) const {
  switch (kind_) {
    case Kind::Constant: return u * a_;
    case Kind::Normal: return u * a_ + 0.5 * u * u * b_ * b_;
    case Kind::Exponential:
      if (u >= a_) return std::numeric_limits<double>::infinity();
      return std::log(a_ / (a_ - u));
    case Kind::Uniform: {
      if (u == 0.0) return 0.0;
      // log((e^{ub} - e^{ua}) / (u (b - a))), written to avoid overflow
      const double hi = std::max(u * a_, u * b_);
      const double lo = std::min(u * a_, u * b_);
      return hi + std::log(-std::expm1(lo - hi)) - std::log(std::abs(u) * (b_ - a_));
    }
  }
  return 0.0;
}

double JumpLaw::mean() const {
  switch (kind_) {
    case Kind::Constant: return a_;
    case Kind::Normal: return a_;
    case Kind::Exponential: return 1.0 / a_;
    case Kind::Uniform: return 0.5 * (a_ + b_);
  }
  return 0.0;
}

bool JumpLaw::nonnegative() const {
  switch (kind_) {
    case Kind::Constant: return a_ >= 0.0;
    case Kind::Normal: return a_ >= 0.0 && b_ == 0.0;
    case Kind::Exponential: return true;
    case Kind::Uniform: return a_ >= 0.0;
  }
  return false;
}

void PIISpec::validate(const TimeGrid& grid) const {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw DomainError("PII jump intensity must be >= 0");
  if (time_change(0.0) != 0.0) throw DomainError("PII time change must satisfy c(0) = 0");
  double prev = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double c = time_change(grid.point(k));
    if (!(c >= prev)) {
      std::ostringstream msg;
      msg << "PII time change decreases at t = " << grid.point(k);
      throw DomainError(msg.str());
    }
    prev = c;
  }
  for (const auto& fj : fixed_jumps) {
    if (!(fj.time >= 0.0 && fj.time <= grid.horizon())) {
      std::ostringstream msg;
      msg << "fixed jump time " << fj.time << " outside [0, " << grid.horizon() << "]";
      throw DomainError(msg.str());
    }
  }
}

namespace {

// First node index k with t_k >= tau.
std::size_t attach_node(const TimeGrid& grid, double tau) {
  auto k = static_cast<std::size_t>(std::ceil(tau / grid.step()));
  k = std::min(k, grid.n_steps());
  while (k > 0 && grid.point(k - 1) >= tau) --k;
  while (k < grid.n_steps() && grid.point(k) < tau) ++k;
  return k;
}

}  // namespace

Path simulate_pii(const PIISpec& spec, const TimeGrid& grid, RngStream& rng) {
  const std::size_t n = grid.n_steps();
  const double horizon = grid.horizon();
  std::vector<double> jumps(grid.size(), 0.0);
  std::vector<double> x(grid.size());

  double w = 0.0;
  double c_prev = spec.time_change(0.0);
  std::vector<double> brownian(grid.size(), 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double c = spec.time_change(grid.point(k));
    w += std::sqrt(std::max(c - c_prev, 0.0)) * rng.normal();
    brownian[k] = w;
    c_prev = c;
  }
  if (spec.intensity > 0.0) {
    double tau = rng.exponential(spec.intensity);
    while (tau <= horizon) {
      jumps[attach_node(grid, tau)] += spec.jump.sample(rng);
      tau += rng.exponential(spec.intensity);
    }
  }
  for (const auto& fj : spec.fixed_jumps) jumps[attach_node(grid, fj.time)] += fj.law.sample(rng);

  double cumulative = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    cumulative += jumps[k];
    x[k] = spec.drift(grid.point(k)) + brownian[k] + cumulative;
  }
  return Path(grid, std::move(x), Interpretation::Cadlag);
}

double log_laplace_pii(const PIISpec& spec, double u, double t) {
  auto require_finite = [&](double v, const char* what) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "log-Laplace transform of the " << what << " is not finite at u = " << u;
      throw DomainError(msg.str());
    }
    return v;
  };
  double psi = u * spec.drift(t) + 0.5 * u * u * spec.time_change(t);
  if (spec.intensity > 0.0) {
    const double lj = require_finite(spec.jump.log_laplace(u), "jump law");
    psi += spec.intensity * t * std::expm1(lj);
  }
  for (const auto& fj : spec.fixed_jumps)
    if (fj.time <= t) psi += require_finite(fj.law.log_laplace(u), "fixed jump law");
  return require_finite(psi, "process");
}

double pii_mean(const PIISpec& spec, double t) {
  double m = spec.drift(t) + spec.intensity * t * spec.jump.mean();
  for (const auto& fj : spec.fixed_jumps)
    if (fj.time <= t) m += fj.law.mean();
  return m;
}

double liouville_covariance(const RealFn& kernel, double s, double t) {
  if (!(s >= 0.0 && t >= 0.0)) throw DomainError("liouville_covariance needs s, t >= 0");
  const double lo = std::min(s, t);
  if (lo == 0.0) return 0.0;
  const double lag = std::abs(t - s);
  auto integrand = [&](double v) { return kernel(lag + v) * kernel(v); };
  // tanh-sinh copes with the integrable endpoint singularity of kernels like u^{H-1/2}, H < 1/2
  boost::math::quadrature::tanh_sinh<double> quad;
  return quad.integrate(integrand, 0.0, lo);
}

}  // namespace comonotone
