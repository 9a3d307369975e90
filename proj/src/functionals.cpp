#include "comonotone/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace comonotone {

const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::NonDecreasing: return "non-decreasing";
    case Monotonicity::NonIncreasing: return "non-increasing";
    case Monotonicity::None: return "none";
  }
  return "none";
}

WeightMeasure::WeightMeasure(TimeGrid grid, std::vector<Atom> atoms, std::vector<double> cell_weights)
    : grid_(grid), atoms_(std::move(atoms)), cell_weights_(std::move(cell_weights)) {
  if (cell_weights_.empty()) cell_weights_.assign(grid_.n_steps(), 0.0);
  if (cell_weights_.size() != grid_.n_steps())
    throw StructuralError("measure needs one density weight per grid cell");
  for (double w : cell_weights_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("measure weights must be finite and >= 0");
  for (const auto& atom : atoms_) {
    if (!(atom.weight >= 0.0) || !std::isfinite(atom.weight)) throw DomainError("atom weights must be finite and >= 0");
    if (!(atom.time >= 0.0 && atom.time <= grid_.horizon())) throw DomainError("atom time outside [0, T]");
  }
  if (!(mass() > 0.0)) throw DomainError("measure must have positive total mass");
}

WeightMeasure WeightMeasure::dirac_terminal(const TimeGrid& grid) { return dirac(grid, grid.horizon()); }

WeightMeasure WeightMeasure::dirac(const TimeGrid& grid, double time) {
  return WeightMeasure(grid, {{time, 1.0}}, {});
}

WeightMeasure WeightMeasure::lebesgue(const TimeGrid& grid) {
  return WeightMeasure(grid, {}, std::vector<double>(grid.n_steps(), grid.step()));
}

WeightMeasure WeightMeasure::uniform_average(const TimeGrid& grid) {
  return WeightMeasure(grid, {}, std::vector<double>(grid.n_steps(), grid.step() / grid.horizon()));
}

WeightMeasure WeightMeasure::exp_weighted_average(const TimeGrid& grid, double rate) {
  std::vector<double> w(grid.n_steps());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(rate * grid.point(k)) * grid.step() / grid.horizon();
  return WeightMeasure(grid, {}, std::move(w));
}

double WeightMeasure::mass() const {
  // same accumulation order as integrate_with, so a path identically 1
  // integrates to exactly mass()
  return integrate_with([](std::size_t) { return 1.0; }, [](double) { return 1.0; });
}

double WeightMeasure::integrate(const Path& path) const {
  if (!(path.grid() == grid_)) throw StructuralError("measure and path live on different grids");
  return integrate_with([&](std::size_t k) { return path[k]; }, [&](double t) { return path.at(t); });
}

ScalarMap ScalarMap::identity() { return {[](double x) { return x; }, Monotonicity::NonDecreasing, "identity"}; }
ScalarMap ScalarMap::negation() { return {[](double x) { return -x; }, Monotonicity::NonIncreasing, "negate"}; }
ScalarMap ScalarMap::exponential() {
  return {[](double x) { return std::exp(x); }, Monotonicity::NonDecreasing, "exp"};
}
ScalarMap ScalarMap::hyperbolic_tangent() {
  return {[](double x) { return std::tanh(x); }, Monotonicity::NonDecreasing, "tanh"};
}
ScalarMap ScalarMap::cube() { return {[](double x) { return x * x * x; }, Monotonicity::NonDecreasing, "cube"}; }
ScalarMap ScalarMap::square() { return {[](double x) { return x * x; }, Monotonicity::None, "square"}; }

MonotoneFunctional terminal() {
  return {[](const Path& p) { return p.back(); }, Monotonicity::NonDecreasing, "terminal"};
}

MonotoneFunctional running_max() {
  return {[](const Path& p) {
            const auto v = p.values();
            return *std::max_element(v.begin(), v.end());
          },
          Monotonicity::NonDecreasing, "running_max"};
}

MonotoneFunctional running_min() {
  return {[](const Path& p) {
            const auto v = p.values();
            return *std::min_element(v.begin(), v.end());
          },
          Monotonicity::NonDecreasing, "running_min"};
}

MonotoneFunctional integral(WeightMeasure measure) {
  return {[measure = std::move(measure)](const Path& p) { return measure.integrate(p); },
          Monotonicity::NonDecreasing, "integral"};
}

MonotoneFunctional coordinate(std::size_t k) {
  std::ostringstream name;
  name << "coordinate(" << k << ")";
  return {[k](const Path& p) {
            if (k >= p.size()) throw StructuralError("coordinate index beyond path length");
            return p[k];
          },
          Monotonicity::NonDecreasing, name.str()};
}

MonotoneFunctional call_payoff(double strike) {
  if (!(strike >= 0.0)) throw DomainError("call strike must be >= 0");
  std::ostringstream name;
  name << "call(K=" << strike << ")";
  return {[strike](const Path& p) { return std::max(p.back() - strike, 0.0); }, Monotonicity::NonDecreasing,
          name.str()};
}

namespace {

double clamp_ramp(double x) { return std::min(std::max(x, 0.0), 1.0); }

}  // namespace

MonotoneFunctional smoothed_down_indicator(double barrier, double eps) {
  if (!(eps > 0.0)) throw DomainError("smoothing width must be > 0");
  std::ostringstream name;
  name << "smoothed_down(L=" << barrier << ",eps=" << eps << ")";
  return {[barrier, eps](const Path& p) {
            const auto v = p.values();
            const double lo = *std::min_element(v.begin(), v.end());
            return clamp_ramp(1.0 - (lo - barrier) / eps);
          },
          Monotonicity::NonIncreasing, name.str()};
}

MonotoneFunctional smoothed_up_indicator(double barrier, double eps) {
  if (!(eps > 0.0)) throw DomainError("smoothing width must be > 0");
  std::ostringstream name;
  name << "smoothed_up(L=" << barrier << ",eps=" << eps << ")";
  return {[barrier, eps](const Path& p) {
            const auto v = p.values();
            const double hi = *std::max_element(v.begin(), v.end());
            return clamp_ramp(1.0 - (barrier - hi) / eps);
          },
          Monotonicity::NonDecreasing, name.str()};
}

MonotoneFunctional down_indicator(double barrier) {
  std::ostringstream name;
  name << "down_indicator(L=" << barrier << ")";
  return {[barrier](const Path& p) {
            const auto v = p.values();
            return *std::min_element(v.begin(), v.end()) <= barrier ? 1.0 : 0.0;
          },
          Monotonicity::NonIncreasing, name.str(), false};
}

MonotoneFunctional up_indicator(double barrier) {
  std::ostringstream name;
  name << "up_indicator(L=" << barrier << ")";
  return {[barrier](const Path& p) {
            const auto v = p.values();
            return *std::max_element(v.begin(), v.end()) >= barrier ? 1.0 : 0.0;
          },
          Monotonicity::NonDecreasing, name.str(), false};
}

Monotonicity combine(Monotonicity outer, Monotonicity inner) {
  if (outer == Monotonicity::None || inner == Monotonicity::None) return Monotonicity::None;
  return outer == inner ? Monotonicity::NonDecreasing : Monotonicity::NonIncreasing;
}

MonotoneFunctional compose(const ScalarMap& g, const MonotoneFunctional& inner) {
  return {[fn = g.fn, eval = inner.evaluate](const Path& p) { return fn(eval(p)); },
          combine(g.monotonicity, inner.monotonicity), g.name + "(" + inner.description + ")",
          inner.continuity_verified};
}

}  // namespace comonotone
