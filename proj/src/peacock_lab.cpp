#include "comonotone/peacock_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "comonotone/parallel.hpp"

namespace comonotone {

ConvexTestFn ConvexTestFn::call_part(double strike) { return {Kind::CallPart, strike, 0.0}; }
ConvexTestFn ConvexTestFn::abs_dev(double center) { return {Kind::AbsDev, center, 0.0}; }
ConvexTestFn ConvexTestFn::square() { return {Kind::Square, 0.0, 0.0}; }
ConvexTestFn ConvexTestFn::soft_plus(double strike, double eps) {
  if (!(eps > 0.0)) throw DomainError("soft_plus needs eps > 0");
  return {Kind::SoftPlus, strike, eps};
}
ConvexTestFn ConvexTestFn::linear() { return {Kind::Linear, 0.0, 0.0}; }

double ConvexTestFn::operator()(double x) const {
  switch (kind_) {
    case Kind::CallPart: return std::max(x - k_, 0.0);
    case Kind::AbsDev: return std::abs(x - k_);
    case Kind::Square: return x * x;
    case Kind::SoftPlus: {
      const double u = (x - k_) / eps_;
      return eps_ * (std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))));
    }
    case Kind::Linear: return x;
  }
  return 0.0;
}

double ConvexTestFn::right_derivative(double x) const {
  switch (kind_) {
    case Kind::CallPart: return x >= k_ ? 1.0 : 0.0;
    case Kind::AbsDev: return x >= k_ ? 1.0 : -1.0;
    case Kind::Square: return 2.0 * x;
    case Kind::SoftPlus: return 1.0 / (1.0 + std::exp(-(x - k_) / eps_));
    case Kind::Linear: return 1.0;
  }
  return 0.0;
}

std::string ConvexTestFn::name() const {
  std::ostringstream s;
  switch (kind_) {
    case Kind::CallPart: s << "call_part(K=" << k_ << ")"; break;
    case Kind::AbsDev: s << "abs_dev(K=" << k_ << ")"; break;
    case Kind::Square: s << "square"; break;
    case Kind::SoftPlus: s << "soft_plus(K=" << k_ << ",eps=" << eps_ << ")"; break;
    case Kind::Linear: s << "linear"; break;
  }
  return s.str();
}

bool PeacockCurve::monotone(double z) const {
  return std::all_of(differences.begin(), differences.end(),
                     [z](const MCEstimate& d) { return d.mean >= -z * d.std_error; });
}

double PeacockCurve::min_difference_z() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& d : differences) {
    if (d.std_error > 0.0)
      worst = std::min(worst, d.mean / d.std_error);
    else if (d.mean < 0.0)
      worst = -std::numeric_limits<double>::infinity();
  }
  return worst;
}

bool PeacockCurve::flat(double value, double z) const {
  return std::all_of(points.begin(), points.end(),
                     [&](const MCEstimate& p) { return std::abs(p.mean - value) <= z * p.std_error; });
}

PeacockCurve curve_from_table(std::string name, std::vector<double> parameters, std::span<const double> table) {
  const std::size_t k = parameters.size();
  if (k == 0) throw StructuralError("curve needs at least one parameter value");
  PeacockCurve c;
  c.name = std::move(name);
  c.parameters = std::move(parameters);
  std::vector<std::vector<double>> cols(k);
  for (std::size_t j = 0; j < k; ++j) {
    cols[j] = column(table, k, j);
    c.points.push_back(MCEstimate::from_samples(cols[j]));
  }
  for (std::size_t j = 0; j + 1 < k; ++j) {
    std::vector<double> d(cols[j].size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = cols[j + 1][i] - cols[j][i];
    c.differences.push_back(MCEstimate::from_samples(d));
  }
  return c;
}

namespace {

std::size_t node_index(const TimeGrid& grid, double t) {
  const double pos = t / grid.step();
  const double k = std::round(pos);
  if (!(t >= 0.0 && t <= grid.horizon()) || std::abs(pos - k) > 1e-9 * static_cast<double>(grid.n_steps()))
    throw DomainError("curve time is not a grid node");
  return static_cast<std::size_t>(k);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw SimulationError(std::string(what) + " produced a non-finite value");
}

constexpr std::uint64_t kMeanPrepassSalt = 0x6d65616e70726570ULL;

}  // namespace

PeacockCurve exp_pii_peacock(const PIISpec& spec, const WeightMeasure& mu, const ConvexTestFn& phi,
                             std::span<const double> sigma_grid, const RunOptions& options) {
  const TimeGrid& grid = mu.grid();
  spec.validate(grid);
  const std::size_t k = sigma_grid.size();
  const std::size_t nodes = grid.size();
  // Psi(sigma, t) at every node and at every atom time
  std::vector<double> psi_nodes(k * nodes);
  std::vector<double> psi_atoms(k * mu.atoms().size());
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t m = 0; m < nodes; ++m) psi_nodes[j * nodes + m] = log_laplace_pii(spec, sigma_grid[j], grid.point(m));
    for (std::size_t a = 0; a < mu.atoms().size(); ++a)
      psi_atoms[j * mu.atoms().size() + a] = log_laplace_pii(spec, sigma_grid[j], mu.atoms()[a].time);
  }
  const auto table = map_paths(options.n_paths, k, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 const Path x = simulate_pii(spec, grid, rng);
                                 for (std::size_t j = 0; j < k; ++j) {
                                   const double s = sigma_grid[j];
                                   const double* pn = &psi_nodes[j * nodes];
                                   std::size_t a = 0;
                                   const double y = mu.integrate_with(
                                       [&](std::size_t m) { return std::exp(s * x[m] - pn[m]); },
                                       [&](double t) {
                                         return std::exp(s * x.at(t) - psi_atoms[j * mu.atoms().size() + a++]);
                                       });
                                   row[j] = phi(y);
                                   require_finite(row[j], "exp_pii_peacock");
                                 }
                               });
  return curve_from_table("exp_pii_peacock:" + phi.name(), {sigma_grid.begin(), sigma_grid.end()}, table);
}

PeacockCurve centered_antiderivative_peacock(const Process& process, const WeightMeasure& mu,
                                             const ConvexTestFn& phi, std::span<const double> t_grid,
                                             const RunOptions& options) {
  const TimeGrid& grid = process.grid();
  if (!(mu.grid() == grid)) throw StructuralError("measure and process live on different grids");
  std::vector<std::size_t> idx;
  for (double t : t_grid) idx.push_back(node_index(grid, t));
  const std::size_t n = grid.n_steps();

  // E X at the nodes and at the atom times
  std::vector<double> mean_nodes(grid.size());
  std::vector<double> mean_atoms(mu.atoms().size());
  std::string notes;
  if (process.has_mean()) {
    for (std::size_t m = 0; m < grid.size(); ++m) mean_nodes[m] = process.mean(grid.point(m));
    for (std::size_t a = 0; a < mean_atoms.size(); ++a) mean_atoms[a] = process.mean(mu.atoms()[a].time);
    notes = "mean: closed form";
  } else {
    RunOptions pre = options;
    pre.n_paths = 10 * options.n_paths;
    pre.seed = splitmix64(options.seed ^ kMeanPrepassSalt);
    const std::size_t cols = grid.size() + mean_atoms.size();
    const auto table = map_paths(pre.n_paths, cols, pre.seed, pre.workers,
                                 [&](std::size_t, RngStream& rng, std::span<double> row) {
                                   const Path x = process.sample(rng);
                                   for (std::size_t m = 0; m < grid.size(); ++m) row[m] = x[m];
                                   for (std::size_t a = 0; a < mean_atoms.size(); ++a)
                                     row[grid.size() + a] = x.at(mu.atoms()[a].time);
                                 });
    double worst_se = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const auto est = MCEstimate::from_samples(column(table, cols, c));
      (c < grid.size() ? mean_nodes[c] : mean_atoms[c - grid.size()]) = est.mean;
      worst_se = std::max(worst_se, est.std_error);
    }
    std::ostringstream s;
    s << "mean: pre-pass with " << pre.n_paths << " paths, max stderr " << worst_se;
    notes = s.str();
  }

  const auto& w = mu.cell_weights();
  const auto& atoms = mu.atoms();
  const std::size_t k = idx.size();
  const auto table = map_paths(options.n_paths, k, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 const Path x = process.sample(rng);
                                 // running left-point integral Y at every node
                                 std::vector<double> y(n + 1, 0.0);
                                 for (std::size_t m = 0; m < n; ++m) y[m + 1] = y[m] + w[m] * (x[m] - mean_nodes[m]);
                                 for (std::size_t j = 0; j < k; ++j) {
                                   const double t = grid.point(idx[j]);
                                   double v = y[idx[j]];
                                   for (std::size_t a = 0; a < atoms.size(); ++a)
                                     if (atoms[a].time <= t) v += atoms[a].weight * (x.at(atoms[a].time) - mean_atoms[a]);
                                   row[j] = phi(v);
                                   require_finite(row[j], "centered_antiderivative_peacock");
                                 }
                               });
  auto curve = curve_from_table("centered_antiderivative:" + process.name() + ":" + phi.name(),
                                {t_grid.begin(), t_grid.end()}, table);
  curve.notes = std::move(notes);
  return curve;
}

PeacockCurve asian_vega_curve(const GBMSpec& base, const TimeGrid& grid, std::span<const double> sigma_grid,
                              const ConvexTestFn& phi, const RunOptions& options) {
  for (double s : sigma_grid)
    if (!(s > 0.0)) throw DomainError("asian_vega_curve needs positive volatilities");
  if (!(base.s0 > 0.0)) throw DomainError("asian_vega_curve needs s0 > 0");
  const std::size_t n = grid.n_steps();
  const double h = grid.step();
  const double sqrt_h = std::sqrt(h);
  const double T = grid.horizon();
  const double discount = std::exp(-base.rate * T);
  const std::size_t k = sigma_grid.size();
  const auto table = map_paths(options.n_paths, k, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 std::vector<double> w(n);  // W at nodes 0..n-1
                                 double acc = 0.0;
                                 for (std::size_t m = 0; m < n; ++m) {
                                   w[m] = acc;
                                   acc += sqrt_h * rng.normal();
                                 }
                                 for (std::size_t j = 0; j < k; ++j) {
                                   const double s = sigma_grid[j];
                                   const double drift = base.rate - 0.5 * s * s;
                                   double sum = 0.0;
                                   for (std::size_t m = 0; m < n; ++m)
                                     sum += base.s0 * std::exp(s * w[m] + drift * grid.point(m));
                                   row[j] = discount * phi(sum * h / T);
                                   require_finite(row[j], "asian_vega_curve");
                                 }
                               });
  return curve_from_table("asian_vega:" + phi.name(), {sigma_grid.begin(), sigma_grid.end()}, table);
}

PeacockCurve carr_maturity_curve(const TimeGrid& grid, std::span<const double> t_grid, const ConvexTestFn& phi,
                                 const RunOptions& options) {
  std::vector<std::size_t> idx;
  for (double t : t_grid) {
    idx.push_back(node_index(grid, t));
    if (idx.back() == 0) throw DomainError("carr_maturity_curve needs times > 0");
  }
  const std::size_t n = grid.n_steps();
  const double h = grid.step();
  const double sqrt_h = std::sqrt(h);
  const std::size_t k = idx.size();
  const auto table = map_paths(options.n_paths, k, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 // left-point integral of e^{B_s - s/2} up to every node
                                 std::vector<double> integral(n + 1, 0.0);
                                 double b = 0.0;
                                 for (std::size_t m = 0; m < n; ++m) {
                                   integral[m + 1] = integral[m] + h * std::exp(b - 0.5 * grid.point(m));
                                   b += sqrt_h * rng.normal();
                                 }
                                 for (std::size_t j = 0; j < k; ++j) {
                                   row[j] = phi(integral[idx[j]] / grid.point(idx[j]));
                                   require_finite(row[j], "carr_maturity_curve");
                                 }
                               });
  return curve_from_table("carr_maturity:" + phi.name(), {t_grid.begin(), t_grid.end()}, table);
}

bool VegaIdentityReport::agree(double z) const {
  return std::abs(finite_difference.mean - cameron_martin.mean) <= z * pooled_std_error;
}

VegaIdentityReport scalar_vega_identity(const ConvexTestFn& phi, double sigma, const RunOptions& options) {
  if (!(sigma > 0.0)) throw DomainError("scalar_vega_identity needs sigma > 0");
  constexpr double delta = 1e-3;
  const double up = sigma + delta;
  const double dn = sigma - delta;
  const auto table = map_paths(options.n_paths, 2, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 const double z = rng.normal();
                                 const double fu = phi(std::exp(up * z - 0.5 * up * up));
                                 const double fd = phi(std::exp(dn * z - 0.5 * dn * dn));
                                 row[0] = (fu - fd) / (2.0 * delta);
                                 row[1] = phi.right_derivative(std::exp(sigma * z + 0.5 * sigma * sigma)) * z;
                               });
  VegaIdentityReport r;
  r.sigma = sigma;
  r.finite_difference = MCEstimate::from_samples(column(table, 2, 0));
  r.cameron_martin = MCEstimate::from_samples(column(table, 2, 1));
  r.pooled_std_error = std::hypot(r.finite_difference.std_error, r.cameron_martin.std_error);
  return r;
}

double black_scholes_vega(double strike, double sigma) {
  if (!(strike > 0.0 && sigma > 0.0)) throw DomainError("black_scholes_vega needs strike > 0 and sigma > 0");
  const double d1 = (-std::log(strike) + 0.5 * sigma * sigma) / sigma;
  return std::exp(-0.5 * d1 * d1) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
}

}  // namespace comonotone
