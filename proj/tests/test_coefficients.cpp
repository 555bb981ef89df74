#include <gtest/gtest.h>

#include <random>

#include "superosc/coefficients.hpp"
#include "superosc/nodes.hpp"
#include "superosc/precision.hpp"
#include "support.hpp"

using namespace superosc;

namespace {

// Independent oracle: solve the Vandermonde system sum_j Z_j h_j^p = a^p, p = 0..n,
// by Gaussian elimination over the rationals.
std::vector<Rational> vandermonde_solve(const std::vector<Rational>& h, const Rational& a) {
  const std::size_t m = h.size();
  std::vector<std::vector<Rational>> A(m, std::vector<Rational>(m + 1));
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t j = 0; j < m; ++j) A[p][j] = ipow(h[j], p);
    A[p][m] = ipow(a, p);
  }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    while (A[piv][c] == 0) ++piv;
    std::swap(A[c], A[piv]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c || A[r][c] == 0) continue;
      const Rational f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= m; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<Rational> z(m);
  for (std::size_t j = 0; j < m; ++j) z[j] = A[j][m] / A[j][j];
  return z;
}

CoefficientSet<Rational> exact_for(std::vector<Rational> nodes, Rational a) {
  return solve_coefficients<Rational>(NodeSet::custom(std::move(nodes)), a);
}

}  // namespace

TEST(Coefficients, ThreeNodeExample) {
  const auto c = exact_for({Rational(1), Rational(0), Rational(-1)}, Rational(2));
  EXPECT_EQ(c.values, (std::vector<Rational>{Rational(3), Rational(-3), Rational(1)}));
  EXPECT_TRUE(c.exact);
  EXPECT_EQ(verify_interpolation(c, 2), (std::vector<Rational>(3, Rational(0))));
}

TEST(Coefficients, TargetOnNodeGivesIndicator) {
  const auto c = exact_for({Rational(1), Rational(0), Rational(-1)}, Rational(0));
  EXPECT_EQ(c.values, (std::vector<Rational>{Rational(0), Rational(1), Rational(0)}));
}

TEST(Coefficients, TwoNodeExample) {
  const auto c = exact_for({Rational(1), Rational(-1)}, Rational(3));
  EXPECT_EQ(c.values, (std::vector<Rational>{Rational(2), Rational(-1)}));
}

TEST(Coefficients, OrderPlusOneWitness) {
  const auto c = exact_for({Rational(1), Rational(0), Rational(-1)}, Rational(2));
  EXPECT_EQ(interpolation_residual(c, 3), Rational(2 - 8));
  EXPECT_THROW(verify_interpolation(c, 3), Error);
}

TEST(Coefficients, PerturbationShowsInZerothResidual) {
  auto c = exact_for({Rational(1), Rational(1, 3), Rational(-1)}, Rational(5, 2));
  const Rational eps(1, 1000);
  c.values[0] += eps;
  EXPECT_EQ(verify_interpolation(c, 2)[0], eps);
}

TEST(Coefficients, MatchesVandermondeOracle) {
  std::mt19937 rng(2024);
  for (int t = 0; t < 60; ++t) {
    const std::size_t count = 2 + rng() % 9;
    const auto nodes = testing_support::random_nodes(rng, count);
    const Rational a = testing_support::random_rational(rng, 40, 9);
    const auto c = exact_for(nodes, a);
    EXPECT_EQ(c.values, vandermonde_solve(nodes, a)) << "t=" << t;
  }
}

TEST(Coefficients, ExactInterpolationUpToSixteen) {
  for (const Rational& a : {Rational(3, 2), Rational(2), Rational(-5, 2)}) {
    for (std::size_t n = 1; n <= 16; ++n) {
      const auto c = solve_coefficients<Rational>(NodeSet::generate(NodeScheme::equispaced, n), a);
      for (const auto& r : verify_interpolation(c, n)) ASSERT_EQ(r, 0) << "n=" << n;
      EXPECT_NE(interpolation_residual(c, n + 1), 0);
    }
  }
}

TEST(Coefficients, DeltaPropertyBothSchemes) {
  PrecisionScope scope(256);
  for (auto scheme : {NodeScheme::equispaced, NodeScheme::chebyshev}) {
    for (std::size_t n = 1; n <= 16; ++n) {
      const NodeSet ns = NodeSet::generate(scheme, n, 256);
      for (std::size_t k = 0; k <= n; ++k) {
        if (ns.is_exact()) {
          const auto c = solve_coefficients<Rational>(ns, *ns.exact(k));
          for (std::size_t j = 0; j <= n; ++j) ASSERT_EQ(c.values[j], j == k ? 1 : 0);
        }
        // irrational Chebyshev nodes: the target is the node itself at working precision
        const auto pts = ns.real_points();
        const auto z = product_coefficients(pts, pts[k]);
        for (std::size_t j = 0; j <= n; ++j) ASSERT_EQ(z[j], j == k ? 1 : 0);
      }
    }
  }
}

TEST(Coefficients, RealPathAgreesWithExactPath) {
  PrecisionScope scope(256);
  const NodeSet ns = NodeSet::generate(NodeScheme::equispaced, 16, 256);
  const auto e = solve_coefficients<Rational>(ns, Rational(-5, 2));
  const auto r = solve_coefficients<Real>(ns, Rational(-5, 2));
  for (std::size_t j = 0; j < e.values.size(); ++j)
    EXPECT_LE(to_double(Real(abs(Real(r.values[j] - Real(e.values[j]))) / abs(Real(e.values[j])))), 1e-60);
}

TEST(Coefficients, SumIsOneForRandomNodes) {
  std::mt19937 rng(7);
  for (int t = 0; t < 40; ++t) {
    const auto c = exact_for(testing_support::random_nodes(rng, 2 + rng() % 10), testing_support::random_rational(rng, 30, 7));
    Rational s(0);
    for (const auto& z : c.values) s += z;
    EXPECT_EQ(s, 1);
  }
}

TEST(Coefficients, GrowthNondecreasingInTarget) {
  for (std::size_t n = 1; n <= 24; ++n) {
    const NodeSet ns = NodeSet::generate(NodeScheme::equispaced, n);
    Rational prev(0);
    for (const Rational& a : {Rational(11, 10), Rational(3, 2), Rational(2), Rational(3)}) {
      const Rational m = solve_coefficients<Rational>(ns, a).max_magnitude();
      EXPECT_GE(m, prev) << "n=" << n;
      prev = m;
    }
  }
}
