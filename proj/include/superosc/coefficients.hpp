#pragma once

// Interpolation-exact coefficients Z_j(n, a) = prod_{k != j} (h_k - a) / (h_k - h_j).
// They are the Lagrange basis polynomials of the nodes evaluated at a, so
// sum_j Z_j h_j^p = a^p for every p <= n.

#include <cstddef>
#include <optional>
#include <type_traits>
#include <vector>

#include "nodes.hpp"
#include "numeric.hpp"

namespace superosc {

template <class T>
struct CoefficientSet {
  NodeSet nodes;
  Rational a;
  std::vector<T> points;  // h_j in the scalar type T
  std::vector<T> values;  // Z_j
  bool exact = std::is_same_v<T, Rational>;

  std::size_t order() const { return nodes.order(); }
  T target() const { return T(a); }

  /// max_j |Z_j|
  T max_magnitude() const {
    T m(0);
    for (const auto& z : values) {
      T v = z < 0 ? T(-z) : z;
      if (v > m) m = v;
    }
    return m;
  }

  /// sum_j |Z_j|; with |h_j| <= 1 this bounds every moment sum_j Z_j h_j^p.
  T l1_norm() const {
    T s(0);
    for (const auto& z : values) s += z < 0 ? T(-z) : z;
    return s;
  }
};

/// Product-formula coefficients over the nodes `h` for target `a`. Numerator
/// and denominator products are accumulated separately with a single division.
/// If `a` equals a node exactly the indicator of that node is returned.
template <class T>
std::vector<T> product_coefficients(const std::vector<T>& h, const T& a) {
  const std::size_t count = h.size();
  std::vector<T> z(count, T(0));
  for (std::size_t k = 0; k < count; ++k) {
    if (h[k] == a) {
      z[k] = T(1);
      return z;
    }
  }
  for (std::size_t j = 0; j < count; ++j) {
    T num(1);
    T den(1);
    for (std::size_t k = 0; k < count; ++k) {
      if (k == j) continue;
      num *= h[k] - a;
      den *= h[k] - h[j];
    }
    z[j] = num / den;
  }
  return z;
}

/// Solves the interpolation problem in scalar type T (Rational for the exact
/// path, Real at the current working precision otherwise).
template <class T>
CoefficientSet<T> solve_coefficients(const NodeSet& nodes, const Rational& a) {
  CoefficientSet<T> out{nodes, a, nodes.points<T>(), {}};
  out.values = product_coefficients(out.points, T(a));
  return out;
}

/// r_p = sum_j Z_j h_j^p - a^p for a single power p (any p >= 0).
template <class T>
T interpolation_residual(const CoefficientSet<T>& c, std::size_t p) {
  T sum(0);
  for (std::size_t j = 0; j < c.values.size(); ++j) sum += c.values[j] * ipow(c.points[j], p);
  return sum - ipow(T(c.a), p);
}

/// Residuals r_0..r_{p_max}; p_max must not exceed the order n.
template <class T>
std::vector<T> verify_interpolation(const CoefficientSet<T>& c, std::size_t p_max) {
  if (p_max > c.order())
    throw Error(ErrorKind::InvalidConfig, "verify_interpolation: p_max exceeds the sequence order");
  std::vector<T> r;
  r.reserve(p_max + 1);
  std::vector<T> powers(c.values.size(), T(1));
  T a_pow(1);
  const T a(c.a);
  for (std::size_t p = 0; p <= p_max; ++p) {
    T sum(0);
    for (std::size_t j = 0; j < c.values.size(); ++j) {
      sum += c.values[j] * powers[j];
      powers[j] *= c.points[j];
    }
    r.push_back(sum - a_pow);
    a_pow *= a;
  }
  return r;
}

}  // namespace superosc
