#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "comonotone/core.hpp"

namespace comonotone {

enum class Monotonicity { NonDecreasing, NonIncreasing, None };

const char* to_string(Monotonicity m);

/// Nonnegative finite measure on [0, T]: point masses plus per-cell density
/// weights integrated with the left-point rule (cell k contributes
/// weight_k * alpha(t_k)).
class WeightMeasure {
 public:
  struct Atom {
    double time;
    double weight;
  };

  WeightMeasure(TimeGrid grid, std::vector<Atom> atoms, std::vector<double> cell_weights);

  /// delta_T
  static WeightMeasure dirac_terminal(const TimeGrid& grid);
  /// delta_t
  static WeightMeasure dirac(const TimeGrid& grid, double time);
  /// Lebesgue measure dt on [0, T]
  static WeightMeasure lebesgue(const TimeGrid& grid);
  /// (1/T) dt
  static WeightMeasure uniform_average(const TimeGrid& grid);
  /// e^{rt} (1/T) dt
  static WeightMeasure exp_weighted_average(const TimeGrid& grid, double rate);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& cell_weights() const { return cell_weights_; }
  double mass() const;

  /// Integral of the path against the measure.
  double integrate(const Path& path) const;
  /// Integral of a function of (node index, node value) against the cell
  /// weights plus atoms evaluated through `at_time`.
  template <class NodeFn, class TimeFn>
  double integrate_with(NodeFn&& node_value, TimeFn&& at_time) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < cell_weights_.size(); ++k)
      if (cell_weights_[k] != 0.0) acc += cell_weights_[k] * node_value(k);
    for (const auto& atom : atoms_) acc += atom.weight * at_time(atom.time);
    return acc;
  }

 private:
  TimeGrid grid_;
  std::vector<Atom> atoms_;
  std::vector<double> cell_weights_;  // one per cell [t_k, t_{k+1}), k < n
};

/// Path functional with declared monotonicity for the pointwise order.
struct MonotoneFunctional {
  std::function<double(const Path&)> evaluate;
  Monotonicity monotonicity = Monotonicity::None;
  std::string description;
  /// False for sharp indicators whose almost-sure continuity under the path
  /// law is not established.
  bool continuity_verified = true;

  double operator()(const Path& path) const { return evaluate(path); }
};

/// Real function with declared monotonicity, for `compose`.
struct ScalarMap {
  std::function<double(double)> fn;
  Monotonicity monotonicity = Monotonicity::None;
  std::string name;

  static ScalarMap identity();
  static ScalarMap negation();
  static ScalarMap exponential();
  static ScalarMap hyperbolic_tangent();
  static ScalarMap cube();
  static ScalarMap square();  // not monotone
};

MonotoneFunctional terminal();
MonotoneFunctional running_max();
MonotoneFunctional running_min();
MonotoneFunctional integral(WeightMeasure measure);
/// alpha -> alpha(t_k), for finite-dimensional vectors stored as paths.
MonotoneFunctional coordinate(std::size_t k);
/// (alpha(T) - K)_+
MonotoneFunctional call_payoff(double strike);
/// ((1 - (min alpha - L)/eps)_+) wedge 1; non-increasing in the path.
MonotoneFunctional smoothed_down_indicator(double barrier, double eps);
/// ((1 - (L - max alpha)/eps)_+) wedge 1; non-decreasing in the path.
MonotoneFunctional smoothed_up_indicator(double barrier, double eps);
/// 1{min alpha <= L}; continuity unverified.
MonotoneFunctional down_indicator(double barrier);
/// 1{max alpha >= L}; continuity unverified.
MonotoneFunctional up_indicator(double barrier);

/// g o inner with the sign rule for monotonicity.
MonotoneFunctional compose(const ScalarMap& g, const MonotoneFunctional& inner);

/// Monotonicity of g o F from the declared monotonicities.
Monotonicity combine(Monotonicity outer, Monotonicity inner);

}  // namespace comonotone
