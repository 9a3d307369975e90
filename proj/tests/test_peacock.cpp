#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <random>

#include "comonotone/peacock_lab.hpp"

using namespace comonotone;

namespace {

RunOptions opts(std::size_t n, std::uint64_t seed) {
  RunOptions o;
  o.n_paths = n;
  o.seed = seed;
  return o;
}

std::vector<ConvexTestFn> all_fns() {
  return {ConvexTestFn::call_part(1.0), ConvexTestFn::abs_dev(-0.5), ConvexTestFn::square(),
          ConvexTestFn::soft_plus(0.3, 0.05), ConvexTestFn::linear()};
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST(ConvexTestFn, MidpointConvexity) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const auto& phi : all_fns())
    for (int i = 0; i < 1000; ++i) {
      const double a = u(gen), b = u(gen);
      EXPECT_LE(phi(0.5 * (a + b)), 0.5 * (phi(a) + phi(b)) + 1e-12) << phi.name();
    }
}

TEST(ConvexTestFn, RightDerivativeIsSubgradient) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const auto& phi : all_fns())
    for (int i = 0; i < 1000; ++i) {
      const double x = u(gen), y = u(gen);
      EXPECT_GE(phi(y), phi(x) + phi.right_derivative(x) * (y - x) - 1e-12) << phi.name();
    }
  EXPECT_EQ(ConvexTestFn::call_part(1.0).right_derivative(1.0), 1.0);
  EXPECT_EQ(ConvexTestFn::call_part(1.0)(3.0), 2.0);
  EXPECT_NEAR(ConvexTestFn::soft_plus(0.0, 0.1)(0.0), 0.1 * std::log(2.0), 1e-15);
  EXPECT_THROW(ConvexTestFn::soft_plus(0.0, 0.0), DomainError);
}

TEST(ExpPii, SigmaZeroIsExactAndLinearIsFlat) {
  const TimeGrid g(1.0, 32);
  const PIISpec bm;
  const auto mu = WeightMeasure::uniform_average(g);
  const auto sig = linspace(0.0, 2.0, 10);
  const auto call = exp_pii_peacock(bm, mu, ConvexTestFn::call_part(1.0), sig, opts(10000, 1));
  EXPECT_EQ(call.points[0].mean, std::max(mu.mass() - 1.0, 0.0));
  EXPECT_EQ(call.points[0].variance, 0.0);
  EXPECT_TRUE(call.monotone(4.0)) << call.min_difference_z();
  const auto lin = exp_pii_peacock(bm, mu, ConvexTestFn::linear(), sig, opts(10000, 2));
  EXPECT_EQ(lin.points[0].mean, mu.mass());
  for (std::size_t i = 1; i < lin.points.size(); ++i)
    EXPECT_NEAR(lin.points[i].mean, mu.mass(), 4 * lin.points[i].std_error + 1e-12);
}

TEST(ExpPii, JumpsStayMonotone) {
  const TimeGrid g(1.0, 32);
  PIISpec spec;
  spec.intensity = 1.0;
  spec.jump = JumpLaw::normal(0.0, 0.2);
  spec.fixed_jumps = {{0.5, JumpLaw::uniform(-0.1, 0.1)}};
  const auto c = exp_pii_peacock(spec, WeightMeasure::lebesgue(g), ConvexTestFn::abs_dev(1.0), linspace(0.0, 1.5, 10),
                                 opts(10000, 3));
  EXPECT_TRUE(c.monotone(4.0)) << c.min_difference_z();
  PIISpec heavy;
  heavy.intensity = 1.0;
  heavy.jump = JumpLaw::exponential(1.0);
  const std::vector<double> sig{0.5, 2.0};
  EXPECT_THROW(exp_pii_peacock(heavy, WeightMeasure::lebesgue(g), ConvexTestFn::square(), sig, opts(100, 1)),
               DomainError);
}

// For BM on the left-point rule, Y_{t_m} = h sum_{k<m} W_{t_k} and
// E Y^2 = h^3 sum_{j,k<m} min(j,k) = h^3 (m-1) m (2m-1) / 6.
TEST(CenteredAntiderivative, BrownianSquareOracle) {
  const std::size_t n = 32;
  const TimeGrid g(1.0, n);
  const Process bm = make_bm(g);
  std::vector<double> ts;
  for (std::size_t m = 0; m <= n; m += 4) ts.push_back(g.point(m));
  const auto c = centered_antiderivative_peacock(bm, WeightMeasure::lebesgue(g), ConvexTestFn::square(), ts,
                                                 opts(20000, 4));
  const double h = g.step();
  EXPECT_EQ(c.points[0].mean, 0.0);
  EXPECT_EQ(c.points[0].variance, 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double m = 4.0 * i;
    const double oracle = h * h * h * (m - 1) * m * (2 * m - 1) / 6.0;
    EXPECT_NEAR(c.points[i].mean, std::max(oracle, 0.0), 5 * c.points[i].std_error + 1e-15) << "m=" << m;
  }
  EXPECT_TRUE(c.monotone(4.0));
  EXPECT_NE(c.notes.find("closed form"), std::string::npos);
}

TEST(CenteredAntiderivative, PrepassWhenNoClosedForm) {
  const TimeGrid g(1.0, 16);
  const Process bm = make_bm(g);
  const Process no_mean("bm_no_mean", g, [&](RngStream& r) { return bm.sample(r); });
  const std::vector<double> ts{0.0, 0.5, 1.0};
  const auto c = centered_antiderivative_peacock(no_mean, WeightMeasure::lebesgue(g), ConvexTestFn::abs_dev(0.0), ts,
                                                 opts(2000, 5));
  EXPECT_NE(c.notes.find("pre-pass"), std::string::npos);
  EXPECT_EQ(c.points[0].mean, 0.0);
  const std::vector<double> off{0.3};
  EXPECT_THROW(centered_antiderivative_peacock(bm, WeightMeasure::lebesgue(g), ConvexTestFn::square(), off,
                                               opts(100, 1)),
               DomainError);
}

TEST(AsianVega, ZeroStrikeIsSpotAndSmallVolIsIntrinsic) {
  const TimeGrid g(1.0, 32);
  const GBMSpec base{100.0, 0.0, 0.2};
  const auto sig = linspace(0.05, 0.5, 10);
  const auto zero = asian_vega_curve(base, g, sig, ConvexTestFn::call_part(0.0), opts(10000, 6));
  for (const auto& p : zero.points) EXPECT_NEAR(p.mean, 100.0, 4 * p.std_error);
  const std::vector<double> tiny{0.01};
  const auto itm = asian_vega_curve(base, g, tiny, ConvexTestFn::call_part(90.0), opts(10000, 7));
  EXPECT_NEAR(itm.points[0].mean, 10.0, 0.05);
  const auto atm = asian_vega_curve(base, g, sig, ConvexTestFn::call_part(100.0), opts(10000, 8));
  EXPECT_TRUE(atm.monotone(4.0));
  const std::vector<double> bad{0.0};
  EXPECT_THROW(asian_vega_curve(base, g, bad, ConvexTestFn::call_part(1.0), opts(100, 1)), DomainError);
}

TEST(CarrMaturity, LinearFlatAndCallMonotone) {
  const TimeGrid g(1.0, 64);
  std::vector<double> ts;
  for (int k = 1; k <= 10; ++k) ts.push_back(g.point(6 * k));
  const auto lin = carr_maturity_curve(g, ts, ConvexTestFn::linear(), opts(10000, 9));
  EXPECT_TRUE(lin.flat(1.0, 4.0));
  const auto call = carr_maturity_curve(g, ts, ConvexTestFn::call_part(1.0), opts(10000, 10));
  EXPECT_TRUE(call.monotone(4.0));
  // first node: (1/h) * h * e^0 = 1
  const std::vector<double> first{g.point(1)};
  const auto c0 = carr_maturity_curve(g, first, ConvexTestFn::square(), opts(1000, 11));
  EXPECT_EQ(c0.points[0].mean, 1.0);
  const std::vector<double> zero{0.0};
  EXPECT_THROW(carr_maturity_curve(g, zero, ConvexTestFn::square(), opts(100, 1)), DomainError);
}

TEST(CurveFromTable, DifferencesArePaired) {
  // rows (path): {0, 1}, {1, 2}, {2, 3}: difference is always 1
  const std::vector<double> t{0, 1, 1, 2, 2, 3};
  const auto c = curve_from_table("c", {0.0, 1.0}, t);
  EXPECT_EQ(c.differences[0].mean, 1.0);
  EXPECT_EQ(c.differences[0].variance, 0.0);
  EXPECT_TRUE(c.monotone(4.0));
  EXPECT_EQ(c.min_difference_z(), std::numeric_limits<double>::infinity());
}

TEST(VegaIdentity, CallPartMatchesBlackScholes) {
  const double sigma = 0.2;
  const auto r = scalar_vega_identity(ConvexTestFn::call_part(1.0), sigma, opts(200000, 12));
  EXPECT_TRUE(r.agree(4.0));
  // independent oracle: vega = n(d1) with d1 = sigma / 2 at K = 1
  const boost::math::normal_distribution<double> nd;
  const double bs = boost::math::pdf(nd, sigma / 2);
  EXPECT_NEAR(black_scholes_vega(1.0, sigma), bs, 1e-15);
  EXPECT_NEAR(r.finite_difference.mean, bs, 0.01 * bs);
  EXPECT_NEAR(r.cameron_martin.mean, bs, 0.01 * bs);
  EXPECT_GE(r.finite_difference.mean, -4 * r.finite_difference.std_error);
  EXPECT_THROW(scalar_vega_identity(ConvexTestFn::square(), 0.0, opts(100, 1)), DomainError);
}

TEST(VegaIdentity, SquareMatchesClosedForm) {
  // E exp(2 sigma Z - sigma^2) = e^{sigma^2}, so f'(sigma) = 2 sigma e^{sigma^2}
  const double sigma = 0.2;
  const auto r = scalar_vega_identity(ConvexTestFn::square(), sigma, opts(200000, 13));
  EXPECT_TRUE(r.agree(4.0));
  const double exact = 2 * sigma * std::exp(sigma * sigma);
  EXPECT_NEAR(r.finite_difference.mean, exact, 5 * r.finite_difference.std_error);
  EXPECT_NEAR(r.cameron_martin.mean, exact, 5 * r.cameron_martin.std_error);
}
