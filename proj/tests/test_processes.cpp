#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "comonotone/estimate.hpp"
#include "comonotone/parallel.hpp"
#include "comonotone/process.hpp"
#include "comonotone/processes.hpp"

using namespace comonotone;

namespace {

// Empirical covariance of nodes (i, j) with its standard error.
struct CovCheck {
  double cov;
  double se;
};

CovCheck empirical_cov(const Process& p, std::size_t i, std::size_t j, std::size_t n, std::uint64_t seed) {
  const auto table = map_paths(n, 2, seed, 0, [&](std::size_t, RngStream& rng, std::span<double> row) {
    const Path path = p.sample(rng);
    row[0] = path[i];
    row[1] = path[j];
  });
  const auto x = column(table, 2, 0);
  const auto y = column(table, 2, 1);
  const double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
  std::vector<double> prod(n);
  for (std::size_t k = 0; k < n; ++k) prod[k] = (x[k] - mx) * (y[k] - my);
  const auto e = MCEstimate::from_samples(prod);
  return {sample_covariance(x, y), e.std_error};
}

double series_cov_reference(double s, double t, double T, std::size_t n) {
  long double acc = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const long double a = std::numbers::pi_v<long double> * k;
    acc += (1 - std::cos(a * s / T)) * (1 - std::cos(a * t / T)) / (a * a);
  }
  return static_cast<double>(2 * T * acc);
}

}  // namespace

TEST(Bm, StartsAtZeroAndVariance) {
  TimeGrid g(2.0, 32);
  const Process bm = make_bm(g);
  RngStream rng(1, 0);
  EXPECT_EQ(bm.sample(rng)[0], 0.0);
  const auto c = empirical_cov(bm, 16, 32, 20000, 3);
  EXPECT_NEAR(c.cov, 1.0, 5 * c.se);
}

TEST(BmSeries, CovarianceMatchesPartialSum) {
  for (std::size_t n : {1u, 7u, 100u, 1000u})
    for (double s : {0.1, 0.5, 1.0})
      for (double t : {0.3, 1.0})
        EXPECT_NEAR(bm_series_covariance(s, t, 1.0, n), series_cov_reference(s, t, 1.0, n), 1e-12);
}

TEST(BmSeries, ConvergesToMin) {
  EXPECT_NEAR(bm_series_covariance(0.3, 0.7, 1.0, 200000), 0.3, 1e-5);
  EXPECT_NEAR(bm_series_covariance(2.0, 2.0, 2.0, 200000), 2.0, 1e-5);
}

TEST(BmSeries, BasisNonnegative) {
  BmSeriesSampler s(TimeGrid(1.0, 64), 50);
  for (std::size_t n = 1; n <= 50; ++n)
    for (int k = 0; k <= 64; ++k) EXPECT_GE(s.basis(n, k / 64.0), 0.0);
  EXPECT_THROW(BmSeriesSampler(TimeGrid(1.0, 4), 0), DomainError);
}

TEST(BmSeries, EmpiricalCovariance) {
  TimeGrid g(1.0, 8);
  const Process p = make_bm_series(g, 200);
  const auto c = empirical_cov(p, 3, 6, 20000, 5);
  EXPECT_NEAR(c.cov, series_cov_reference(3.0 / 8, 6.0 / 8, 1.0, 200), 5 * c.se);
}

TEST(Bridge, PinnedAndCovariance) {
  TimeGrid g(1.0, 8);
  const Process p = make_bridge(g);
  RngStream rng(2, 0);
  const Path path = p.sample(rng);
  EXPECT_EQ(path[0], 0.0);
  EXPECT_NEAR(path[8], 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(bridge_covariance(0.25, 0.5, 1.0), 0.25 * 0.5);
  const auto c = empirical_cov(p, 2, 4, 20000, 7);
  EXPECT_NEAR(c.cov, 0.25 * 0.5, 5 * c.se);
  EXPECT_FALSE(p.has_reflection());
  EXPECT_THROW(p.sample_antithetic(rng), StructuralError);
}

TEST(Fbm, CovarianceSpecialCases) {
  EXPECT_DOUBLE_EQ(fbm_covariance(0.3, 0.7, 0.5), 0.3);
  EXPECT_DOUBLE_EQ(fbm_covariance(0.3, 0.7, 1.0), 0.3 * 0.7);
  EXPECT_DOUBLE_EQ(fbm_covariance(0.4, 0.4, 0.25), std::sqrt(0.4));
  EXPECT_THROW(fbm_covariance(0.1, 0.2, 0.0), DomainError);
  EXPECT_THROW(fbm_covariance(0.1, 0.2, 1.2), DomainError);
}

TEST(Fbm, CholeskyFactorReproducesMatrix) {
  TimeGrid g(1.0, 16);
  for (double h : {0.1, 0.5, 0.9, 1.0}) {
    FbmCholeskySampler s(g, h);
    const Eigen::MatrixXd m = fbm_covariance_matrix(g, h);
    EXPECT_LT((s.factor() * s.factor().transpose() - m).cwiseAbs().maxCoeff(), 1e-10) << "H=" << h;
  }
}

TEST(Fbm, CholeskyEmpirical) {
  TimeGrid g(1.0, 8);
  const Process p = make_fbm_cholesky(g, 0.3);
  const auto c = empirical_cov(p, 4, 8, 20000, 9);
  EXPECT_NEAR(c.cov, fbm_covariance(0.5, 1.0, 0.3), 5 * c.se);
}

TEST(Fbm, MvnConstant) {
  EXPECT_NEAR(mandelbrot_van_ness_constant(0.5), 1.0, 1e-14);
  EXPECT_THROW(mandelbrot_van_ness_constant(1.0), DomainError);
}

TEST(Fbm, MvnVarianceAndCovariance) {
  TimeGrid g(1.0, 8);
  for (double h : {0.3, 0.7}) {
    const Process p = make_fbm_mvn(g, h);
    const auto v = empirical_cov(p, 8, 8, 20000, 11);
    EXPECT_NEAR(v.cov, 1.0, 5 * v.se + 0.02) << "H=" << h;
    const auto c = empirical_cov(p, 2, 6, 20000, 13);
    EXPECT_NEAR(c.cov, fbm_covariance(0.25, 0.75, h), 5 * c.se + 0.02) << "H=" << h;
  }
}

namespace {

// Gauss 2F1(a, b; c; z) by its power series, |z| < 1.
double hyp2f1(double a, double b, double c, double z) {
  long double term = 1.0L, sum = 1.0L;
  for (int k = 0; k < 400 && std::abs(term) > 1e-20L * std::abs(sum); ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0L)) * z;
    sum += term;
  }
  return static_cast<double>(sum);
}

}  // namespace

// int_0^m (L+v)^a v^a dv = m^{a+1} L^a / (a+1) 2F1(-a, a+1; a+2; -m/L), and m^{2a+1} / (2a+1) for L = 0.
TEST(Liouville, CovarianceAgainstHypergeometricClosedForm) {
  for (double a : {-0.25, 0.25, 1.0}) {
    const RealFn f = [a](double u) { return std::pow(u, a); };
    for (auto [s, t] : {std::pair{0.3, 0.8}, std::pair{1.0, 1.0}, std::pair{0.9, 0.2}, std::pair{0.1, 0.9}}) {
      const double m = std::min(s, t), lag = std::abs(t - s);
      const double ref = lag == 0.0 ? std::pow(m, 2 * a + 1) / (2 * a + 1)
                                    : std::pow(m, a + 1) * std::pow(lag, a) / (a + 1) *
                                          hyp2f1(-a, a + 1, a + 2, -m / lag);
      EXPECT_NEAR(liouville_covariance(f, s, t), ref, 1e-10 * std::max(1.0, std::abs(ref))) << a << " " << s << " " << t;
    }
  }
  // f = 1 is Brownian motion
  EXPECT_NEAR(liouville_covariance([](double) { return 1.0; }, 0.3, 0.8), 0.3, 1e-14);
  // f(u) = u^{1/4}, s = t: t^{3/2} / (3/2)
  EXPECT_NEAR(liouville_covariance([](double u) { return std::pow(u, 0.25); }, 0.64, 0.64),
              std::pow(0.64, 1.5) / 1.5, 1e-12);
}

TEST(Liouville, ConstantKernelIsCumulativeSum) {
  TimeGrid g(1.0, 16);
  LiouvilleSampler s(g, [](double) { return 1.0; }, 4);
  EXPECT_TRUE(s.kernel_nonnegative());
  const Process p = make_liouville(g, [](double) { return 1.0; }, 4);
  const auto c = empirical_cov(p, 4, 12, 20000, 15);
  EXPECT_NEAR(c.cov, 0.25, 5 * c.se);
  LiouvilleSampler neg(g, [](double u) { return std::cos(10 * u); });
  EXPECT_FALSE(neg.kernel_nonnegative());
}

TEST(WienerParam, IndicatorKernelIsBrownian) {
  TimeGrid g(1.0, 8);
  const Process p = make_wiener_param(g, [](double t, double s) { return s <= t ? 1.0 : 0.0; }, 0.0, 64);
  const auto c = empirical_cov(p, 4, 8, 20000, 17);
  EXPECT_NEAR(c.cov, 0.5, 5 * c.se);
}

TEST(Euler, MonotonyCheck) {
  TimeGrid g(1.0, 256);
  DiffusionSpec spec{[](double, double x) { return -x; }, [](double, double) { return 1.0; }, 0.0, 1.0};
  EXPECT_EQ(euler_monotony_check(spec, g), MonotonyCheck::Satisfied);
  spec.drift_lipschitz = 1000.0;
  EXPECT_EQ(euler_monotony_check(spec, g), MonotonyCheck::Violated);
  spec.drift_lipschitz.reset();
  EXPECT_EQ(euler_monotony_check(spec, g), MonotonyCheck::Unchecked);
}

TEST(Euler, DeterministicAndAntithetic) {
  TimeGrid g(1.0, 10);
  DiffusionSpec ode{[](double, double) { return 2.0; }, [](double, double) { return 0.0; }, 1.0, 0.0};
  RngStream rng(3, 0);
  EXPECT_NEAR(simulate_euler(ode, g, rng).back(), 3.0, 1e-14);
  DiffusionSpec bm{[](double, double) { return 0.0; }, [](double, double) { return 1.0; }, 0.0, 0.0};
  RngStream r1(4, 0), r2(4, 0);
  const auto [a, b] = simulate_euler_antithetic(bm, g, r1);
  const Path plain = simulate_euler(bm, g, r2);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k], plain[k]);
    EXPECT_EQ(b[k], -a[k]);
  }
}

TEST(Gbm, MeanAndReflectionIdentity) {
  TimeGrid g(1.0, 16);
  const GBMSpec spec{100.0, 0.03, 0.2};
  const Process p = make_gbm(spec, g);
  EXPECT_TRUE(p.has_reflection());
  EXPECT_NEAR(p.mean(1.0), 100.0 * std::exp(0.03), 1e-12);
  RngStream rng(6, 0);
  const auto [s, sr] = p.sample_antithetic(rng);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double t = g.point(k);
    EXPECT_NEAR(s[k] * sr[k], 1e4 * std::exp(2 * (0.03 - 0.02) * t), 1e-9 * 1e4);
  }
  const auto table = map_paths(20000, 1, 8, 0, [&](std::size_t, RngStream& r, std::span<double> row) {
    row[0] = p.sample(r).back();
  });
  const auto e = MCEstimate::from_samples(table);
  EXPECT_NEAR(e.mean, 100.0 * std::exp(0.03), 4.5 * e.std_error);
  EXPECT_THROW((GBMSpec{-1.0, 0.0, 0.2}).validate(), DomainError);
}

TEST(JumpLaw, LogLaplace) {
  EXPECT_DOUBLE_EQ(JumpLaw::constant(0.5).log_laplace(2.0), 1.0);
  EXPECT_DOUBLE_EQ(JumpLaw::normal(0.1, 0.3).log_laplace(2.0), 0.2 + 0.5 * 4 * 0.09);
  EXPECT_DOUBLE_EQ(JumpLaw::exponential(4.0).log_laplace(1.0), -std::log(0.75));
  EXPECT_TRUE(std::isinf(JumpLaw::exponential(4.0).log_laplace(4.0)));
  EXPECT_NEAR(JumpLaw::uniform(0.0, 1.0).log_laplace(1.0), std::log(std::exp(1.0) - 1.0), 1e-14);
  EXPECT_TRUE(JumpLaw::exponential(1.0).nonnegative());
  EXPECT_FALSE(JumpLaw::normal(0.0, 1.0).nonnegative());
}

TEST(Pii, LaplaceAndMean) {
  TimeGrid g(1.0, 20);
  PIISpec spec;
  spec.drift = [](double t) { return 0.1 * t; };
  spec.time_change = [](double t) { return 0.04 * t; };
  spec.intensity = 2.0;
  spec.jump = JumpLaw::normal(-0.05, 0.1);
  spec.fixed_jumps = {{0.5, JumpLaw::constant(0.2)}};
  spec.validate(g);
  const double u = 1.5, t = 1.0;
  const double expect = u * 0.1 + u * u * 0.04 / 2 + 2.0 * (std::exp(u * -0.05 + u * u * 0.01 / 2) - 1) + u * 0.2;
  EXPECT_NEAR(log_laplace_pii(spec, u, t), expect, 1e-14);
  EXPECT_NEAR(pii_mean(spec, 1.0), 0.1 - 0.1 + 0.2, 1e-14);
  EXPECT_NEAR(pii_mean(spec, 0.25), 0.025 - 0.025, 1e-14);

  const Process p = make_pii(spec, g);
  const auto table = map_paths(40000, 1, 19, 0, [&](std::size_t, RngStream& r, std::span<double> row) {
    row[0] = std::exp(u * p.sample(r).back() - expect);
  });
  const auto e = MCEstimate::from_samples(table);
  EXPECT_NEAR(e.mean, 1.0, 5 * e.std_error);

  PIISpec bad = spec;
  bad.time_change = [](double t) { return t < 0.5 ? t : 1.0 - t; };
  EXPECT_THROW(bad.validate(g), DomainError);
  PIISpec heavy;
  heavy.intensity = 1.0;
  heavy.jump = JumpLaw::exponential(1.0);
  EXPECT_THROW(log_laplace_pii(heavy, 2.0, 1.0), DomainError);
}

TEST(Pii, FixedJumpLandsOnFirstNodeAfter) {
  TimeGrid g(1.0, 4);
  PIISpec spec;
  spec.time_change = [](double) { return 0.0; };
  spec.fixed_jumps = {{0.3, JumpLaw::constant(1.0)}};
  RngStream rng(0, 0);
  const Path p = simulate_pii(spec, g, rng);
  EXPECT_EQ(p.interpretation(), Interpretation::Cadlag);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_EQ(p[2], 1.0);
  EXPECT_EQ(p[4], 1.0);
}

TEST(ExpPii, MartingaleNormalized) {
  TimeGrid g(1.0, 8);
  PIISpec spec;
  spec.drift = [](double t) { return -0.5 * 0.04 * t; };
  spec.time_change = [](double t) { return 0.04 * t; };
  const Process p = make_exp_pii(spec, 100.0, g);
  RngStream rng(1, 0);
  EXPECT_DOUBLE_EQ(p.sample(rng)[0], 100.0);
  EXPECT_THROW(make_exp_pii(spec, 0.0, g), DomainError);
}
