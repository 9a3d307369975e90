#include "comonotone/comonotony_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "comonotone/parallel.hpp"

namespace comonotone {

const char* to_string(PredictedSign s) {
  switch (s) {
    case PredictedSign::NonNegative: return ">=0";
    case PredictedSign::NonPositive: return "<=0";
    case PredictedSign::None: return "none";
  }
  return "none";
}

PredictedSign predicted_sign(Monotonicity f, Monotonicity g) {
  if (f == Monotonicity::None || g == Monotonicity::None) return PredictedSign::None;
  return f == g ? PredictedSign::NonNegative : PredictedSign::NonPositive;
}

CovTestReport cov_test(std::span<const double> f, std::span<const double> g, PredictedSign predicted, double z,
                       std::string name) {
  if (f.size() != g.size() || f.size() < 2) throw StructuralError("cov_test needs paired samples");
  const std::size_t n = f.size();
  const double nd = static_cast<double>(n);
  const double mf = pairwise_sum(f) / nd;
  const double mg = pairwise_sum(g) / nd;
  std::vector<double> prod(n);
  for (std::size_t i = 0; i < n; ++i) prod[i] = (f[i] - mf) * (g[i] - mg);

  CovTestReport r;
  r.name = std::move(name);
  r.n_paths = n;
  r.predicted = predicted;
  r.z_threshold = z;
  r.cov_estimate = pairwise_sum(prod) / (nd - 1.0);

  const double pm = pairwise_sum(prod) / nd;
  std::vector<double> c2(n), c4(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = prod[i] - pm;
    c2[i] = d * d;
    c4[i] = c2[i] * c2[i];
  }
  const double m2 = pairwise_sum(c2) / nd;
  const double m4 = pairwise_sum(c4) / nd;
  r.std_error = std::sqrt(pairwise_sum(c2) / (nd - 1.0) / nd);
  r.product_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;

  const double tol = z * r.std_error;
  switch (predicted) {
    case PredictedSign::NonNegative:
      r.verdict = r.cov_estimate < -tol ? Verdict::Violation : Verdict::Consistent;
      break;
    case PredictedSign::NonPositive:
      r.verdict = r.cov_estimate > tol ? Verdict::Violation : Verdict::Consistent;
      break;
    case PredictedSign::None:
      r.verdict = Verdict::Inconclusive;
      break;
  }
  if (r.verdict == Verdict::Consistent && r.product_kurtosis > kKurtosisGuard) r.verdict = Verdict::Inconclusive;
  return r;
}

std::vector<double> functional_table(const Process& process, std::span<const MonotoneFunctional> functionals,
                                     const RunOptions& options) {
  const std::size_t k = functionals.size();
  if (k == 0) throw StructuralError("no functionals to evaluate");
  return map_paths(options.n_paths, k, options.seed, options.workers,
                   [&](std::size_t i, RngStream& rng, std::span<double> row) {
                     const Path path = process.sample(rng);
                     for (std::size_t j = 0; j < k; ++j) {
                       row[j] = functionals[j](path);
                       if (!std::isfinite(row[j])) {
                         std::ostringstream msg;
                         msg << "functional '" << functionals[j].description << "' is not finite on path " << i
                             << " of " << process.name();
                         throw SimulationError(msg.str());
                       }
                     }
                   });
}

namespace {

std::string pair_name(const Process& process, const MonotoneFunctional& f, const MonotoneFunctional& g) {
  return process.name() + ":" + f.description + "~" + g.description;
}

}  // namespace

CovTestReport estimate_cov(const Process& process, const MonotoneFunctional& f, const MonotoneFunctional& g,
                           const RunOptions& options) {
  if (options.n_paths < 100) throw DomainError("estimate_cov needs n_paths >= 100");
  const std::vector<MonotoneFunctional> fg{f, g};
  const auto table = functional_table(process, fg, options);
  return cov_test(column(table, 2, 0), column(table, 2, 1), predicted_sign(f.monotonicity, g.monotonicity),
                  options.z, pair_name(process, f, g));
}

std::vector<CovTestReport> cov_sweep(const Process& process, std::span<const MonotoneFunctional> functionals,
                                     const RunOptions& options,
                                     std::vector<std::pair<std::size_t, std::size_t>> pairs) {
  if (options.n_paths < 100) throw DomainError("cov_sweep needs n_paths >= 100");
  const std::size_t k = functionals.size();
  if (pairs.empty())
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  for (const auto& [i, j] : pairs)
    if (i >= k || j >= k) throw StructuralError("functional pair index out of range");

  const auto table = functional_table(process, functionals, options);
  std::vector<std::vector<double>> cols(k);
  for (std::size_t j = 0; j < k; ++j) cols[j] = column(table, k, j);
  std::vector<CovTestReport> reports;
  reports.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const auto& f = functionals[i];
    const auto& g = functionals[j];
    reports.push_back(cov_test(cols[i], cols[j], predicted_sign(f.monotonicity, g.monotonicity), options.z,
                               pair_name(process, f, g)));
  }
  return reports;
}

namespace {

double variance_of(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double m = pairwise_sum(v) / n;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  return pairwise_sum(sq) / (n - 1.0);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

constexpr std::uint64_t kBootstrapSalt = 0x626f6f7473747261ULL;

}  // namespace

AntitheticReport antithetic_estimate(const Process& process, const MonotoneFunctional& f,
                                     const RunOptions& options, std::size_t bootstrap, double ci_level) {
  if (!process.has_reflection()) throw StructuralError("process '" + process.name() + "' has no antithetic coupling");
  if (options.n_paths < 2) throw DomainError("antithetic_estimate needs n_paths >= 2");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  const auto table = map_paths(options.n_paths, 2, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 const auto [x, tx] = process.sample_antithetic(rng);
                                 const double a = f(x);
                                 const double b = f(tx);
                                 if (!std::isfinite(a) || !std::isfinite(b))
                                   throw SimulationError("functional '" + f.description + "' is not finite");
                                 row[0] = a;
                                 row[1] = 0.5 * (a + b);
                               });
  const auto plain = column(table, 2, 0);
  const auto anti = column(table, 2, 1);
  AntitheticReport r;
  r.plain = MCEstimate::from_samples(plain);
  r.antithetic = MCEstimate::from_samples(anti);
  r.ci_level = ci_level;
  r.variance_ratio = r.plain.variance > 0.0 ? r.antithetic.variance / r.plain.variance
                                            : std::numeric_limits<double>::quiet_NaN();
  if (bootstrap == 0 || !(r.plain.variance > 0.0)) {
    r.ratio_ci_low = r.ratio_ci_high = r.variance_ratio;
    return r;
  }
  const std::size_t n = plain.size();
  const auto ratios = map_paths(bootstrap, 1, splitmix64(options.seed ^ kBootstrapSalt), options.workers,
                                [&](std::size_t, RngStream& rng, std::span<double> row) {
                                  std::vector<double> p(n), a(n);
                                  for (std::size_t i = 0; i < n; ++i) {
                                    const auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
                                    const std::size_t j = std::min(idx, n - 1);
                                    p[i] = plain[j];
                                    a[i] = anti[j];
                                  }
                                  const double vp = variance_of(p);
                                  row[0] = vp > 0.0 ? variance_of(a) / vp : std::numeric_limits<double>::infinity();
                                });
  std::vector<double> sorted(ratios);
  std::sort(sorted.begin(), sorted.end());
  const double alpha = 0.5 * (1.0 - ci_level);
  r.ratio_ci_low = quantile_sorted(sorted, alpha);
  r.ratio_ci_high = quantile_sorted(sorted, 1.0 - alpha);
  return r;
}

RunningExtremaReport running_extrema_conditional(const Process& process, double y, std::span<const double> x_list,
                                                 const RunOptions& options) {
  for (double x : x_list)
    if (!(x <= y)) throw DomainError("conditioning levels must satisfy x <= y");
  if (options.n_paths < 2) throw DomainError("running_extrema_conditional needs n_paths >= 2");
  const auto table = map_paths(options.n_paths, 2, options.seed, options.workers,
                               [&](std::size_t, RngStream& rng, std::span<double> row) {
                                 const Path p = process.sample(rng);
                                 const auto v = p.values();
                                 row[0] = *std::max_element(v.begin(), v.end());
                                 row[1] = p.back();
                               });
  const auto sup = column(table, 2, 0);
  const auto last = column(table, 2, 1);
  std::vector<double> hit(sup.size());
  for (std::size_t i = 0; i < sup.size(); ++i) hit[i] = sup[i] >= y ? 1.0 : 0.0;

  RunningExtremaReport r;
  r.y = y;
  r.unconditional = MCEstimate::from_samples(hit);
  r.min_conditional = std::numeric_limits<double>::infinity();
  bool violation = false;
  bool any_conclusive = false;
  for (double x : x_list) {
    ConditionalExtremum c;
    c.x = x;
    std::vector<double> sub;
    for (std::size_t i = 0; i < hit.size(); ++i)
      if (last[i] >= x) sub.push_back(hit[i]);
    c.n_conditioning = sub.size();
    if (sub.empty()) {
      c.inconclusive = true;
    } else {
      const double m = pairwise_sum(sub) / static_cast<double>(sub.size());
      c.probability = m;
      // binomial standard error
      c.std_error = std::sqrt(m * (1.0 - m) / static_cast<double>(sub.size()));
      r.min_conditional = std::min(r.min_conditional, m);
      const double pooled = std::hypot(c.std_error, r.unconditional.std_error);
      if (m < r.unconditional.mean - options.z * pooled) violation = true;
      any_conclusive = true;
    }
    r.conditional.push_back(c);
  }
  r.gap = any_conclusive ? r.min_conditional - r.unconditional.mean : std::numeric_limits<double>::quiet_NaN();
  r.verdict = violation ? Verdict::Violation : (any_conclusive ? Verdict::Consistent : Verdict::Inconclusive);
  return r;
}

}  // namespace comonotone
