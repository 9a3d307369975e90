#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace comonotone {

/// Argument outside the mathematical domain of an operation (time outside
/// [0,T], Hurst index outside (0,1], infinite Laplace transform, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mismatched shapes: paths on different grids, wrong vector lengths.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sampler or functional produced a non-finite value.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform subdivision t_k = k T / n of [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t n_steps);

  double horizon() const { return horizon_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t size() const { return n_steps_ + 1; }
  double step() const { return horizon_ / static_cast<double>(n_steps_); }

  /// t_k; t_0 = 0 and t_n = T exactly.
  double point(std::size_t k) const;
  std::vector<double> points() const;

  bool operator==(const TimeGrid& other) const {
    return horizon_ == other.horizon_ && n_steps_ == other.n_steps_;
  }

 private:
  double horizon_;
  std::size_t n_steps_;
};

/// How node values are extended to [0, T].
enum class Interpretation {
  Continuous,  // piecewise-linear interpolation
  Cadlag,      // right-continuous steps, value t_k on [t_k, t_{k+1})
};

/// Node values of a trajectory on a TimeGrid.
class Path {
 public:
  Path(TimeGrid grid, std::vector<double> values,
       Interpretation interpretation = Interpretation::Continuous);

  const TimeGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  Interpretation interpretation() const { return interpretation_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }
  std::size_t size() const { return values_.size(); }

  /// Value at an arbitrary time using the path's interpretation.
  double at(double t) const;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
  Interpretation interpretation_;
};

/// Canonical piecewise-linear interpolant of the node values at time t.
/// Throws DomainError when t is outside [0, T].
double linear_interpolate(const Path& path, double t);

/// Stepwise constant approximation on the coarse subdivision kT/m, sampled
/// back onto the path's own grid: value alpha(t^m_{k-1}) on
/// [t^m_{k-1}, t^m_k) and alpha(T) at T. Off-node evaluations of alpha use
/// the path's interpretation. The result is Cadlag.
Path stepwise_approximation(const Path& path, std::size_t m);

/// Pointwise partial order on node values. Throws StructuralError when the
/// grids differ.
bool pointwise_leq(const Path& a, const Path& b);

}  // namespace comonotone
