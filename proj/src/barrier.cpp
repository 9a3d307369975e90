#include "comonotone/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "comonotone/parallel.hpp"

namespace comonotone {

const char* to_string(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::DownIn: return "DownIn";
    case BarrierKind::DownOut: return "DownOut";
    case BarrierKind::UpIn: return "UpIn";
    case BarrierKind::UpOut: return "UpOut";
  }
  return "DownIn";
}

BarrierKind barrier_kind_from_string(const std::string& name) {
  for (auto k : {BarrierKind::DownIn, BarrierKind::DownOut, BarrierKind::UpIn, BarrierKind::UpOut})
    if (name == to_string(k)) return k;
  throw DomainError("unknown barrier kind '" + name + "'");
}

const char* to_string(BoundSide side) { return side == BoundSide::LessEqual ? "<=" : ">="; }

namespace {

bool is_down(BarrierKind k) { return k == BarrierKind::DownIn || k == BarrierKind::DownOut; }
bool is_in(BarrierKind k) { return k == BarrierKind::DownIn || k == BarrierKind::UpIn; }

double ramp(double x) { return std::min(std::max(x, 0.0), 1.0); }

}  // namespace

void BarrierSpec::validate(const TimeGrid& grid) const {
  if (!(strike > 0.0)) throw DomainError("barrier strike must be > 0");
  if (!(barrier >= 0.0) || !std::isfinite(barrier)) throw DomainError("barrier level must be finite and >= 0");
  if (!(discount > 0.0) || !std::isfinite(discount)) throw DomainError("discount factor must be finite and > 0");
  if (window) {
    const auto [a, b] = *window;
    if (!(a >= 0.0 && a <= b && b <= grid.horizon())) throw DomainError("monitoring window must lie in [0, T]");
  }
}

void BarrierSpec::validate_against_spot(double s0) const {
  if (is_down(kind) && !(barrier < s0)) throw DomainError("down barriers need L < s0");
  if (!is_down(kind) && !(barrier > s0)) throw DomainError("up barriers need L > s0");
}

BarrierPayoff barrier_payoff(const Path& path, const BarrierSpec& spec) {
  const TimeGrid& grid = path.grid();
  const bool down = is_down(spec.kind);
  double ext = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (spec.window) {
      const double t = grid.point(k);
      if (t < spec.window->first || t > spec.window->second) continue;
    }
    const double v = path[k];
    if (!any) {
      ext = v;
      any = true;
    } else {
      ext = down ? std::min(ext, v) : std::max(ext, v);
    }
  }
  if (!any) throw DomainError("monitoring window contains no grid node");
  const bool event_in = down ? ext <= spec.barrier : ext > spec.barrier;
  BarrierPayoff p;
  p.extremum = ext;
  p.vanilla = spec.discount * std::max(path.back() - spec.strike, 0.0);
  p.crossed = event_in ? 1.0 : 0.0;
  p.knock_in = event_in ? p.vanilla : 0.0;
  p.knock_out = event_in ? 0.0 : p.vanilla;
  return p;
}

namespace {

bool has_negative(const Path& p) {
  const auto v = p.values();
  return std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; });
}

}  // namespace

BarrierPrice price_barrier(const Process& process, const BarrierSpec& spec, const RunOptions& options) {
  spec.validate(process.grid());
  const auto table = map_paths(options.n_paths, 3, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 const Path p = process.sample(rng);
                                 const BarrierPayoff pay = barrier_payoff(p, spec);
                                 row[0] = is_in(spec.kind) ? pay.knock_in : pay.knock_out;
                                 row[1] = pay.vanilla;
                                 row[2] = has_negative(p) ? 1.0 : 0.0;
                               });
  BarrierPrice r;
  r.barrier = MCEstimate::from_samples(column(table, 3, 0));
  r.vanilla = MCEstimate::from_samples(column(table, 3, 1));
  r.negative_paths = static_cast<std::size_t>(pairwise_sum(column(table, 3, 2)));
  return r;
}

namespace {

/// Slack of E[b] against E[c] E[p] with its delta-method standard error.
BoundRow bound_row(std::string name, std::span<const double> b, std::span<const double> c, std::span<const double> p,
                   BoundSide side, double z) {
  const std::size_t n = b.size();
  const double nd = static_cast<double>(n);
  const double mb = pairwise_sum(b) / nd;
  const double mc = pairwise_sum(c) / nd;
  const double mp = pairwise_sum(p) / nd;
  const double sign = side == BoundSide::LessEqual ? 1.0 : -1.0;
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = sign * (mp * (c[i] - mc) + mc * (p[i] - mp) - (b[i] - mb));
  BoundRow r;
  r.name = std::move(name);
  r.lhs = mb;
  r.rhs = mc * mp;
  r.slack = sign * (r.rhs - r.lhs);
  r.std_error = MCEstimate::from_samples(psi).std_error;
  r.verdict = r.slack >= -z * r.std_error ? Verdict::Consistent : Verdict::Violation;
  return r;
}

}  // namespace

BoundReport verify_bounds(const Process& process, const BarrierSpec& spec, const RunOptions& options) {
  spec.validate(process.grid());
  const double eps_list[] = {1e-2, 1e-4};
  const bool in = is_in(spec.kind);
  // smoothed indicator dominates the sharp one for DownIn/UpOut, is dominated for DownOut/UpIn
  const bool upper = spec.kind == BarrierKind::DownIn || spec.kind == BarrierKind::UpOut;
  constexpr std::size_t kFixed = 6;
  const std::size_t cols = kFixed + std::size(eps_list);
  const auto table = map_paths(options.n_paths, cols, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 const Path p = process.sample(rng);
                                 const BarrierPayoff pay = barrier_payoff(p, spec);
                                 row[0] = in ? pay.knock_in : pay.knock_out;
                                 row[1] = pay.vanilla;
                                 row[2] = in ? pay.crossed : 1.0 - pay.crossed;
                                 row[3] = std::abs(pay.knock_in + pay.knock_out - pay.vanilla);
                                 row[4] = std::abs(pay.vanilla);
                                 row[5] = has_negative(p) ? 1.0 : 0.0;
                                 for (std::size_t e = 0; e < std::size(eps_list); ++e) {
                                   const double u = (pay.extremum - spec.barrier) / eps_list[e];
                                   row[kFixed + e] = upper ? ramp(1.0 - u) : ramp(u);
                                 }
                               });
  const auto b = column(table, cols, 0);
  const auto c = column(table, cols, 1);
  const auto p = column(table, cols, 2);
  const auto res = column(table, cols, 3);
  const auto scale = column(table, cols, 4);

  BoundReport r;
  r.spec = spec;
  r.barrier = MCEstimate::from_samples(b);
  r.vanilla = MCEstimate::from_samples(c);
  r.crossing = MCEstimate::from_samples(p);
  r.side = upper ? BoundSide::LessEqual : BoundSide::GreaterEqual;
  const std::string base = std::string(to_string(spec.kind));
  r.sharp = bound_row(base + ":bound", b, c, p, r.side, options.z);
  for (std::size_t e = 0; e < std::size(eps_list); ++e) {
    const auto s = column(table, cols, kFixed + e);
    std::vector<double> cs(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) cs[i] = c[i] * s[i];
    std::ostringstream name;
    name << base << ":smoothed(eps=" << eps_list[e] << ")";
    r.smoothed.push_back(bound_row(name.str(), cs, c, s, r.side, options.z));
  }
  const double sc = std::max(1.0, *std::max_element(scale.begin(), scale.end()));
  r.parity_residual = *std::max_element(res.begin(), res.end()) / sc;
  r.negative_paths = static_cast<std::size_t>(pairwise_sum(column(table, cols, 5)));
  return r;
}

BarrierLadder barrier_ladder(const Process& process, BarrierSpec spec, std::vector<double> barriers,
                             const RunOptions& options) {
  if (barriers.empty()) throw DomainError("barrier ladder needs at least one level");
  std::sort(barriers.begin(), barriers.end());
  spec.validate(process.grid());
  const std::size_t k = barriers.size();
  const bool in = is_in(spec.kind);
  const auto table = map_paths(options.n_paths, k, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 const Path p = process.sample(rng);
                                 BarrierSpec s = spec;
                                 for (std::size_t j = 0; j < k; ++j) {
                                   s.barrier = barriers[j];
                                   const BarrierPayoff pay = barrier_payoff(p, s);
                                   row[j] = in ? pay.knock_in : pay.knock_out;
                                 }
                               });
  const bool increasing = spec.kind == BarrierKind::DownIn || spec.kind == BarrierKind::UpOut;
  BarrierLadder r;
  r.barriers = barriers;
  for (std::size_t j = 0; j < k; ++j) r.prices.push_back(MCEstimate::from_samples(column(table, k, j)));
  for (std::size_t i = 0; i < options.n_paths && r.pathwise_monotone; ++i)
    for (std::size_t j = 0; j + 1 < k; ++j) {
      const double a = table[i * k + j];
      const double b2 = table[i * k + j + 1];
      if (increasing ? b2 < a : b2 > a) {
        r.pathwise_monotone = false;
        break;
      }
    }
  return r;
}

}  // namespace comonotone
