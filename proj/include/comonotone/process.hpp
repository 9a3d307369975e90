#pragma once

#include <functional>
#include <string>
#include <utility>

#include "comonotone/core.hpp"
#include "comonotone/processes.hpp"
#include "comonotone/rng.hpp"

namespace comonotone {

/// A sampler bound to a grid, as consumed by the labs.
///
/// Processes whose law is invariant under the reflection W -> -W of their
/// driving Brownian motion (BM, GBM, Euler diffusions) also carry a pair
/// sampler returning the path and its reflected twin from one stream.
class Process {
 public:
  using Sampler = std::function<Path(RngStream&)>;
  using PairSampler = std::function<std::pair<Path, Path>(RngStream&)>;

  Process(std::string name, TimeGrid grid, Sampler sampler, PairSampler reflected = {},
          RealFn mean = {});

  const std::string& name() const { return name_; }
  const TimeGrid& grid() const { return grid_; }

  Path sample(RngStream& rng) const { return sampler_(rng); }

  bool has_reflection() const { return static_cast<bool>(reflected_); }
  /// Throws StructuralError when the process has no reflection coupling.
  std::pair<Path, Path> sample_antithetic(RngStream& rng) const;

  bool has_mean() const { return static_cast<bool>(mean_); }
  /// Closed-form E X_t; throws StructuralError when unavailable.
  double mean(double t) const;

 private:
  std::string name_;
  TimeGrid grid_;
  Sampler sampler_;
  PairSampler reflected_;
  RealFn mean_;
};

Process make_bm(const TimeGrid& grid);
Process make_bm_series(const TimeGrid& grid, std::size_t n_terms);
Process make_bridge(const TimeGrid& grid);
Process make_fbm_cholesky(const TimeGrid& grid, double hurst);
Process make_fbm_mvn(const TimeGrid& grid, double hurst, double tail_cutoff = 0.0, std::size_t quad_steps = 0);
Process make_liouville(const TimeGrid& grid, RealFn kernel, std::size_t substeps = 1);
Process make_wiener_param(const TimeGrid& grid, TimeStateFn kernel, double tail_cutoff = 0.0,
                          std::size_t quad_steps = 0);
Process make_euler(const DiffusionSpec& spec, const TimeGrid& grid);
Process make_gbm(const GBMSpec& spec, const TimeGrid& grid);
Process make_pii(const PIISpec& spec, const TimeGrid& grid);
/// S_t = s0 exp(X_t) for a PII X.
Process make_exp_pii(const PIISpec& spec, double s0, const TimeGrid& grid);

}  // namespace comonotone
