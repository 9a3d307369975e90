#include "comonotone/process.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace comonotone {

Process::Process(std::string name, TimeGrid grid, Sampler sampler, PairSampler reflected, RealFn mean)
    : name_(std::move(name)),
      grid_(grid),
      sampler_(std::move(sampler)),
      reflected_(std::move(reflected)),
      mean_(std::move(mean)) {}

std::pair<Path, Path> Process::sample_antithetic(RngStream& rng) const {
  if (!reflected_) throw StructuralError("process '" + name_ + "' has no antithetic coupling");
  return reflected_(rng);
}

double Process::mean(double t) const {
  if (!mean_) throw StructuralError("process '" + name_ + "' has no closed-form mean");
  return mean_(t);
}

namespace {

RealFn zero_mean() {
  return [](double) { return 0.0; };
}

}  // namespace

Process make_bm(const TimeGrid& grid) {
  return Process(
      "brownian_motion", grid, [grid](RngStream& rng) { return simulate_bm(grid, rng); },
      [grid](RngStream& rng) {
        Path w = simulate_bm(grid, rng);
        std::vector<double> reflected(w.values().begin(), w.values().end());
        for (auto& v : reflected) v = -v;
        return std::pair<Path, Path>(std::move(w), Path(grid, std::move(reflected)));
      },
      zero_mean());
}

Process make_bm_series(const TimeGrid& grid, std::size_t n_terms) {
  auto sampler = std::make_shared<const BmSeriesSampler>(grid, n_terms);
  return Process("bm_series", grid, [sampler](RngStream& rng) { return (*sampler)(rng); }, {}, zero_mean());
}

Process make_bridge(const TimeGrid& grid) {
  return Process("brownian_bridge", grid, [grid](RngStream& rng) { return simulate_bridge(grid, rng); }, {},
                 zero_mean());
}

Process make_fbm_cholesky(const TimeGrid& grid, double hurst) {
  auto sampler = std::make_shared<const FbmCholeskySampler>(grid, hurst);
  std::ostringstream name;
  name << "fbm(H=" << hurst << ")";
  return Process(name.str(), grid, [sampler](RngStream& rng) { return (*sampler)(rng); }, {}, zero_mean());
}

Process make_fbm_mvn(const TimeGrid& grid, double hurst, double tail_cutoff, std::size_t quad_steps) {
  auto sampler = std::make_shared<const FbmMvnSampler>(grid, hurst, tail_cutoff, quad_steps);
  std::ostringstream name;
  name << "fbm_mvn(H=" << hurst << ")";
  return Process(name.str(), grid, [sampler](RngStream& rng) { return (*sampler)(rng); }, {}, zero_mean());
}

Process make_liouville(const TimeGrid& grid, RealFn kernel, std::size_t substeps) {
  auto sampler = std::make_shared<const LiouvilleSampler>(grid, std::move(kernel), substeps);
  return Process("liouville", grid, [sampler](RngStream& rng) { return (*sampler)(rng); }, {}, zero_mean());
}

Process make_wiener_param(const TimeGrid& grid, TimeStateFn kernel, double tail_cutoff, std::size_t quad_steps) {
  auto sampler = std::make_shared<const WienerParamSampler>(grid, std::move(kernel), tail_cutoff, quad_steps);
  return Process("wiener_param", grid, [sampler](RngStream& rng) { return (*sampler)(rng); }, {}, zero_mean());
}

Process make_euler(const DiffusionSpec& spec, const TimeGrid& grid) {
  return Process(
      "euler", grid, [spec, grid](RngStream& rng) { return simulate_euler(spec, grid, rng); },
      [spec, grid](RngStream& rng) { return simulate_euler_antithetic(spec, grid, rng); });
}

Process make_gbm(const GBMSpec& spec, const TimeGrid& grid) {
  spec.validate();
  return Process(
      "gbm", grid, [spec, grid](RngStream& rng) { return simulate_gbm_exact(spec, grid, rng); },
      [spec, grid](RngStream& rng) { return simulate_gbm_antithetic(spec, grid, rng); },
      [spec](double t) { return spec.s0 * std::exp(spec.rate * t); });
}

Process make_pii(const PIISpec& spec, const TimeGrid& grid) {
  spec.validate(grid);
  return Process(
      "pii", grid, [spec, grid](RngStream& rng) { return simulate_pii(spec, grid, rng); }, {},
      [spec](double t) { return pii_mean(spec, t); });
}

Process make_exp_pii(const PIISpec& spec, double s0, const TimeGrid& grid) {
  spec.validate(grid);
  if (!(s0 > 0.0)) throw DomainError("exponential PII needs s0 > 0");
  RealFn mean;
  try {
    // E s0 e^{X_t} = s0 e^{Psi(1, t)} when the transform is finite
    log_laplace_pii(spec, 1.0, grid.horizon());
    mean = [spec, s0](double t) { return s0 * std::exp(log_laplace_pii(spec, 1.0, t)); };
  } catch (const DomainError&) {
  }
  return Process(
      "exp_pii", grid,
      [spec, s0, grid](RngStream& rng) {
        const Path x = simulate_pii(spec, grid, rng);
        std::vector<double> s(x.size());
        for (std::size_t k = 0; k < s.size(); ++k) s[k] = s0 * std::exp(x[k]);
        return Path(grid, std::move(s), Interpretation::Cadlag);
      },
      {}, std::move(mean));
}

}  // namespace comonotone
