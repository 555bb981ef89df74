#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace superosc {

enum class NodeScheme { equispaced, chebyshev, custom };

inline std::string_view name(NodeScheme s) {
  switch (s) {
    case NodeScheme::equispaced: return "equispaced";
    case NodeScheme::chebyshev: return "chebyshev";
    case NodeScheme::custom: return "custom";
  }
  return "?";
}

inline NodeScheme parse_node_scheme(std::string_view s) {
  if (s == "equispaced") return NodeScheme::equispaced;
  if (s == "chebyshev") return NodeScheme::chebyshev;
  if (s == "custom") return NodeScheme::custom;
  throw Error(ErrorKind::InvalidConfig, "unknown node scheme '" + std::string(s) + "'");
}

/// Frequencies h_0..h_n in [-1, 1]. Rational nodes are kept exact; Chebyshev
/// nodes are exact only where cos(j pi / n) is rational (0, +-1/2, +-1).
class NodeSet {
 public:
  NodeScheme scheme() const { return scheme_; }
  std::size_t order() const { return exact_.size() - 1; }
  std::size_t size() const { return exact_.size(); }
  double min_gap() const { return min_gap_; }

  bool is_exact() const {
    return std::all_of(exact_.begin(), exact_.end(), [](const auto& h) { return h.has_value(); });
  }
  const std::optional<Rational>& exact(std::size_t j) const { return exact_[j]; }

  /// Exact nodes; throws when some node is irrational.
  std::vector<Rational> rational_points() const {
    std::vector<Rational> out;
    out.reserve(exact_.size());
    for (const auto& h : exact_) {
      if (!h) throw Error(ErrorKind::InvalidConfig, "node set has irrational nodes; no exact path available");
      out.push_back(*h);
    }
    return out;
  }

  /// Nodes at the current working precision.
  std::vector<Real> real_points() const {
    std::vector<Real> out;
    out.reserve(exact_.size());
    const std::size_t n = order();
    for (std::size_t j = 0; j < exact_.size(); ++j) {
      if (exact_[j])
        out.emplace_back(*exact_[j]);
      else
        out.emplace_back(boost::multiprecision::cos(Real(pi() * j / n)));
    }
    return out;
  }

  template <class T>
  std::vector<T> points() const {
    if constexpr (std::is_same_v<T, Rational>)
      return rational_points();
    else
      return real_points();
  }

  std::vector<double> approx_points() const {
    std::vector<double> out;
    out.reserve(exact_.size());
    for (std::size_t j = 0; j < exact_.size(); ++j)
      out.push_back(exact_[j] ? to_double(*exact_[j]) : std::cos(3.14159265358979323846 * double(j) / double(order())));
    return out;
  }

  /// Rejection threshold for the minimum pairwise gap: 2^{-bits/4}.
  static double degeneracy_threshold(unsigned bits) { return std::ldexp(1.0, -static_cast<int>(bits / 4)); }

  static NodeSet generate(NodeScheme scheme, std::size_t n, unsigned bits = 128) {
    if (scheme == NodeScheme::custom)
      throw Error(ErrorKind::InvalidConfig, "custom nodes must be supplied through NodeSet::custom");
    if (n < 1) throw Error(ErrorKind::InvalidConfig, "node order n must be >= 1");
    NodeSet s;
    s.scheme_ = scheme;
    s.exact_.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      if (scheme == NodeScheme::equispaced)
        s.exact_[j] = Rational(1) - Rational(2 * j, n);
      else
        s.exact_[j] = chebyshev_exact(j, n);
    }
    s.validate(bits);
    return s;
  }

  static NodeSet custom(std::vector<Rational> points, unsigned bits = 128) {
    if (points.empty()) throw Error(ErrorKind::InvalidConfig, "custom node list is empty");
    NodeSet s;
    s.scheme_ = NodeScheme::custom;
    for (auto& p : points) s.exact_.emplace_back(std::move(p));
    s.validate(bits);
    return s;
  }

 private:
  // Niven: cos(q pi) is rational only for values in {0, +-1/2, +-1}.
  static std::optional<Rational> chebyshev_exact(std::size_t j, std::size_t n) {
    if (j == 0) return Rational(1);
    if (j == n) return Rational(-1);
    if (2 * j == n) return Rational(0);
    if (3 * j == n) return Rational(1, 2);
    if (3 * j == 2 * n) return Rational(-1, 2);
    return std::nullopt;
  }

  void validate(unsigned bits) {
    const auto approx = approx_points();
    for (std::size_t j = 0; j < exact_.size(); ++j) {
      bool out = exact_[j] ? (*exact_[j] > 1 || *exact_[j] < -1) : std::abs(approx[j]) > 1.0;
      if (out) throw Error(ErrorKind::OutOfRange, "node h_" + std::to_string(j) + " lies outside [-1, 1]");
    }
    min_gap_ = approx.size() < 2 ? 2.0 : 1e300;
    for (std::size_t i = 0; i < exact_.size(); ++i) {
      for (std::size_t j = i + 1; j < exact_.size(); ++j) {
        if (exact_[i] && exact_[j] && *exact_[i] == *exact_[j])
          throw Error(ErrorKind::DegenerateNodes,
                      "nodes h_" + std::to_string(i) + " and h_" + std::to_string(j) + " coincide");
        min_gap_ = std::min(min_gap_, std::abs(approx[i] - approx[j]));
      }
    }
    if (min_gap_ < degeneracy_threshold(bits))
      throw Error(ErrorKind::DegenerateNodes,
                  "minimum node gap " + std::to_string(min_gap_) + " is below 2^-" + std::to_string(bits / 4));
  }

  NodeScheme scheme_ = NodeScheme::equispaced;
  std::vector<std::optional<Rational>> exact_;
  double min_gap_ = 0.0;
};

}  // namespace superosc
