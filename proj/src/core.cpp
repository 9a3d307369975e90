#include "comonotone/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace comonotone {

TimeGrid::TimeGrid(double horizon, std::size_t n_steps)
    : horizon_(horizon), n_steps_(n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw DomainError("time grid horizon must be positive and finite");
  if (n_steps == 0) throw DomainError("time grid needs at least one step");
}

double TimeGrid::point(std::size_t k) const {
  if (k >= n_steps_) return horizon_;
  return horizon_ * static_cast<double>(k) / static_cast<double>(n_steps_);
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = point(k);
  return out;
}

Path::Path(TimeGrid grid, std::vector<double> values, Interpretation interpretation)
    : grid_(grid), values_(std::move(values)), interpretation_(interpretation) {
  if (values_.size() != grid_.size()) {
    std::ostringstream msg;
    msg << "path has " << values_.size() << " values but grid has " << grid_.size() << " nodes";
    throw StructuralError(msg.str());
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      std::ostringstream msg;
      msg << "non-finite path value at node " << k;
      throw SimulationError(msg.str());
    }
  }
}

namespace {

void check_time(const TimeGrid& grid, double t) {
  if (!(t >= 0.0 && t <= grid.horizon())) {
    std::ostringstream msg;
    msg << "time " << t << " outside [0, " << grid.horizon() << "]";
    throw DomainError(msg.str());
  }
}

// Index k with t_k <= t < t_{k+1}, clamped to n for t = T.
std::size_t cell_index(const TimeGrid& grid, double t) {
  const auto n = grid.n_steps();
  if (t >= grid.horizon()) return n;
  auto k = static_cast<std::size_t>(std::floor(t / grid.step()));
  k = std::min(k, n - 1);
  // guard against rounding in t / h
  while (k + 1 <= n && grid.point(k + 1) <= t) ++k;
  while (k > 0 && grid.point(k) > t) --k;
  return k;
}

}  // namespace

double linear_interpolate(const Path& path, double t) {
  const auto& grid = path.grid();
  check_time(grid, t);
  const auto n = grid.n_steps();
  std::size_t k = cell_index(grid, t);
  if (k == n) return path[n];
  const double lo = grid.point(k);
  const double hi = grid.point(k + 1);
  if (t == lo) return path[k];
  return (hi - t) / (hi - lo) * path[k] + (t - lo) / (hi - lo) * path[k + 1];
}

double Path::at(double t) const {
  if (interpretation_ == Interpretation::Continuous) return linear_interpolate(*this, t);
  check_time(grid_, t);
  return values_[cell_index(grid_, t)];
}

Path stepwise_approximation(const Path& path, std::size_t m) {
  if (m == 0) throw DomainError("stepwise approximation needs m >= 1");
  const auto& grid = path.grid();
  const std::size_t n = grid.n_steps();
  const double horizon = grid.horizon();
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < n; ++j) {
    // coarse cell of t_j = jT/n is floor(j m / n), computed exactly in integers
    const std::size_t k = (j * m) / n;
    if ((k * n) % m == 0) {
      out[j] = path[(k * n) / m];  // t^m_k is a node of the fine grid
    } else {
      out[j] = path.at(horizon * static_cast<double>(k) / static_cast<double>(m));
    }
  }
  out[n] = path[n];
  return Path(grid, std::move(out), Interpretation::Cadlag);
}

bool pointwise_leq(const Path& a, const Path& b) {
  if (!(a.grid() == b.grid())) throw StructuralError("pointwise_leq: paths live on different grids");
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t k = 0; k < va.size(); ++k)
    if (!(va[k] <= vb[k])) return false;
  return true;
}

}  // namespace comonotone
