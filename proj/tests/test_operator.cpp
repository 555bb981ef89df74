#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "superosc/operator_engine.hpp"
#include "superosc/precision.hpp"
#include "superosc/superosc.hpp"
#include "support.hpp"

using namespace superosc;
using testing_support::to_d;
using testing_support::to_std;

namespace {

using CQ = Complex<Rational>;

Rational binomial(unsigned n, unsigned k) {
  Rational r(1);
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(Symbol, YSeries) {
  const auto y = build_y_series<Rational>({Rational(2), Rational(-1)}, {PowerSeries::exp(), PowerSeries::identity()}, 3);
  // i (2 e^lambda - lambda): constant term included
  EXPECT_EQ(y.coeffs[0], CQ(Rational(0), Rational(2)));
  EXPECT_EQ(y.coeffs[1], CQ(Rational(0), Rational(1)));
  EXPECT_EQ(y.coeffs[2], CQ(Rational(0), Rational(1)));
  EXPECT_EQ(y.coeffs[3], CQ(Rational(0), Rational(1, 3)));
}

TEST(Symbol, USquare) {
  const Rational u(3, 7);
  const auto op = build_U<Rational>({u}, {PowerSeries::monomial(2)}, 6);
  const std::vector<CQ> expected{CQ(Rational(1)),      CQ(Rational(0)), CQ(Rational(0), u), CQ(Rational(0)),
                                 CQ(Rational(-u * u / 2)), CQ(Rational(0)), CQ(Rational(0), Rational(-u * u * u / 6))};
  EXPECT_EQ(op.sigma.coeffs, expected);
}

// U from the exponential series against sum_m y^m / m! accumulated directly.
TEST(Symbol, UMatchesNestedSum) {
  std::mt19937 rng(4);
  for (int t = 0; t < 8; ++t) {
    const std::vector<Rational> x{testing_support::random_rational(rng, 3, 4), testing_support::random_rational(rng, 3, 4)};
    const std::vector<PowerSeries> G{PowerSeries::identity(), PowerSeries::custom({CQ(Rational(0)), CQ(Rational(1, 2)), CQ(Rational(-1))}, Radius::infinite())};
    const std::size_t N = 8;
    const auto op = build_U<Rational>(x, G, N);
    const auto y = build_y_series<Rational>(x, G, N);
    std::vector<CQ> acc(N + 1, CQ(Rational(0)));
    Rational fact(1);
    for (unsigned m = 0; m <= N; ++m) {
      if (m > 0) fact *= m;
      const auto p = cauchy_power(y, m, N);
      for (std::size_t k = 0; k <= N; ++k) acc[k] += p.coeffs[k] / CQ(fact);
    }
    EXPECT_EQ(op.sigma.coeffs, acc);
  }
}

TEST(Symbol, VMatchesNestedSum) {
  const std::vector<Rational> x{Rational(1, 3), Rational(-2)};
  const std::vector<PowerSeries> G{PowerSeries::geometric(Rational(5)), PowerSeries::cos()};
  const std::size_t N = 7;
  const auto op = build_V<Rational>(x, G, N);
  const auto g1 = G[0].coefficients<Rational>(N + 1), g2 = G[1].coefficients<Rational>(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    CQ s(Rational(0));
    for (std::size_t m1 = 0; m1 <= k; ++m1) {
      const std::size_t m2 = k - m1;
      s += g1[m1] * g2[m2] * CQ(Rational(ipow(x[0], m1) * ipow(x[1], m2)));
    }
    EXPECT_EQ(op.sigma.coeffs[k], s) << k;
  }
  EXPECT_EQ(op.sigma_radius, Radius(Rational(15)));
}

TEST(Apply, ZeroIsIdentity) {
  PrecisionScope scope(128);
  const auto op = build_U<Real>({Real(0), Real(0)}, {PowerSeries::sin(), PowerSeries::exp()}, 16);
  const auto f = exponential_wave(Real(1.25));
  const auto a = f.coefficients(20), b = operator_coefficients(op, f, 20);
  for (std::size_t j = 0; j < 20; ++j) EXPECT_EQ(a[j], b[j]);
}

// With G = identity the U operator is the shift f(xi) -> f(xi + x); on polynomials this is exact.
TEST(Apply, ShiftIdentityOnPolynomials) {
  std::mt19937 rng(12);
  for (int t = 0; t < 20; ++t) {
    const std::size_t deg = rng() % 7;
    std::vector<CQ> p;
    for (std::size_t k = 0; k <= deg; ++k) p.emplace_back(testing_support::random_rational(rng, 5, 3));
    const Rational x = testing_support::random_rational(rng, 3, 2);
    const auto op = build_U<Rational>({x}, {PowerSeries::identity()}, deg + 2);
    const auto out = apply_operator_exact(op, polynomial_function<Rational>(p)).coefficients(deg + 1);
    for (std::size_t j = 0; j <= deg; ++j) {
      CQ s(Rational(0));
      for (std::size_t k = j; k <= deg; ++k) s += p[k] * CQ(Rational(binomial(k, j) * ipow(x, k - j)));
      EXPECT_EQ(out[j], s);
    }
  }
}

TEST(Apply, LimitRoutesOnWaves) {
  PrecisionScope scope(128);
  OperatorOptions opt;
  for (double x : {-0.8, 0.3, 1.0}) {
    const auto u = detail::restricted_value(OperatorKind::U, {Real(x)}, {PowerSeries::identity()}, exponential_wave(Real(2)), opt);
    EXPECT_LT(std::abs(to_std(u.value) - std::exp(std::complex<double>(0, 2 * x))), 1e-14);
    EXPECT_LT(to_d(u.tail_bound), 1e-29);
    const auto v = detail::restricted_value(OperatorKind::V, {Real(x)}, {PowerSeries::identity()}, exponential_wave(Real(2)), opt);
    EXPECT_LT(std::abs(to_std(v.value) - 2 * x), 1e-30);
  }
  const auto p = ProblemSpec{NodeScheme::equispaced, 4, {}, Rational(3, 2), {PowerSeries::geometric(Rational(2))}}.instantiate(4, 128);
  const auto t = limit_route_target(p, {Real(0.5)}, opt);
  EXPECT_LT(std::abs(to_std(t.value) - std::exp(std::complex<double>(0, 2))), 1e-14);
}

TEST(Apply, Linearity) {
  PrecisionScope scope(128);
  const auto op = build_V<Real>({Real(0.4), Real(-0.7)}, {PowerSeries::sin(), PowerSeries::geometric(Rational(3))}, 24);
  const auto f = exponential_wave(Real(0.5)), g = exponential_wave(Real(-1.5));
  const Complex<Real> alpha(Real(2), Real(-1)), beta(Real(0.25), Real(3));
  const auto h = linear_combination<Real>({alpha, beta}, {f, g});
  const auto of = operator_coefficients(op, f, 12), og = operator_coefficients(op, g, 12), oh = operator_coefficients(op, h, 12);
  for (std::size_t j = 0; j < 12; ++j) EXPECT_LT(to_d(abs(oh[j] - (alpha * of[j] + beta * og[j]))), 1e-30);
}

TEST(Apply, TailBoundsCoverTruncation) {
  PrecisionScope scope(192);
  const std::vector<Real> x{Real(0.6)};
  const std::vector<PowerSeries> G{PowerSeries::sin()};
  const auto f = exponential_wave(Real(1.5));
  const auto lo = build_U<Real>(x, G, 12), hi = build_U<Real>(x, G, 96);
  const auto a = operator_coefficients(lo, f, 6), b = operator_coefficients(hi, f, 6);
  const auto tails = operator_tail_bounds(lo, f, 6);
  for (std::size_t j = 0; j < 6; ++j) EXPECT_LE(abs(a[j] - b[j]), tails[j]) << j;
}

TEST(Routes, OperatorMatchesDirectInOneDimension) {
  PrecisionScope scope(160);
  const auto p = ProblemSpec{NodeScheme::equispaced, 8, {}, Rational(2), {PowerSeries::identity()}}.instantiate(8, 160);
  for (double x : {-1.0, 0.0, 0.45}) {
    const auto r = operator_route_Fn(p, {Real(x)});
    EXPECT_LT(to_d(abs(r.value - eval_f1d(p.coeffs, Complex<Real>(Real(x))))), to_d(r.tail_bound) + 1e-40);
  }
}

TEST(Routes, HandExampleBothRoutes) {
  PrecisionScope scope(160);
  ProblemSpec s;
  s.G = {PowerSeries::monomial(2), PowerSeries::identity()};
  s.n = 2;
  const auto p = s.instantiate(2, 160);
  for (auto [x1, x2] : std::vector<std::pair<double, double>>{{0.5, -0.25}, {-1, 1}}) {
    const auto r = operator_route_Fn(p, {Real(x1), Real(x2)});
    const auto d = eval_multivar(p, {Real(x1), Real(x2)});
    EXPECT_LE(abs(r.value - d.value), r.tail_bound + d.error_bound);
    const std::complex<double> ref = 3.0 * std::exp(std::complex<double>(0, x1 + x2)) - 3.0 + std::exp(std::complex<double>(0, x1 - x2));
    EXPECT_LT(std::abs(to_std(r.value) - ref), 1e-13);
  }
}

TEST(Routes, TailNotBoundedWhenCapped) {
  PrecisionScope scope(128);
  OperatorOptions opt;
  opt.n_max = 8;
  opt.n_start = 4;
  const auto p = ProblemSpec{NodeScheme::equispaced, 6, {}, Rational(2), {PowerSeries::exp()}}.instantiate(6, 128);
  try {
    operator_route_Fn(p, {Real(3)}, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TailNotBounded);
  }
}

TEST(Probe, ZeroPointIsContractive) {
  PrecisionScope scope(128);
  const Real B(1);
  const auto res = continuity_probe(OperatorKind::U, {Real(0)}, {PowerSeries::sin()}, B, default_probe_family(B));
  ASSERT_EQ(res.ratios.size(), 4u);
  for (const auto& r : res.ratios) EXPECT_LE(to_d(r), 1.0 + 1e-12);
}

TEST(Probe, FiniteAndScaleInvariant) {
  PrecisionScope scope(128);
  const Real B(0.5);
  const std::vector<Real> x{Real(0.3), Real(-0.2)};
  const std::vector<PowerSeries> G{PowerSeries::sin(), PowerSeries::identity()};
  auto family = default_probe_family(B);
  const auto base = continuity_probe(OperatorKind::U, x, G, B, family);
  for (auto& f : family) f = scaled(f, Complex<Real>(Real(3)));
  const auto tripled = continuity_probe(OperatorKind::U, x, G, B, family);
  for (std::size_t i = 0; i < base.ratios.size(); ++i) {
    EXPECT_TRUE(boost::multiprecision::isfinite(base.ratios[i]));
    EXPECT_GT(base.ratios[i], 0);
    EXPECT_NEAR(to_d(tripled.ratios[i] / base.ratios[i]), 1.0, 1e-20);
  }
}

TEST(Probe, RejectsLargeB) {
  PrecisionScope scope(128);
  const Real B(1);
  EXPECT_THROW(continuity_probe(OperatorKind::U, {Real(0.1)}, {PowerSeries::geometric(Rational(2))}, B, default_probe_family(B)),
               Error);
}

TEST(Kinds, Parsing) {
  EXPECT_EQ(parse_operator_kind("U"), OperatorKind::U);
  EXPECT_EQ(parse_operator_kind("V"), OperatorKind::V);
  EXPECT_THROW(parse_operator_kind("W"), Error);
  EXPECT_EQ(operator_kind_for(Mode::supershift), OperatorKind::V);
}
