#pragma once

// Direct evaluation of the one-variable sequence f_n, the several-variable
// superoscillating sequence
//   F_n(x) = sum_j Z_j prod_l exp(i x_l G_l(h_j)),
// the supershift sequence
//   F_n(x) = sum_j Z_j prod_l G_l(x_l h_j),
// and their limits exp(i sum_l x_l G_l(a)) and prod_l G_l(a x_l).

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "nodes.hpp"
#include "numeric.hpp"
#include "precision.hpp"
#include "series.hpp"

namespace superosc {

enum class Mode { superoscillation, supershift };

inline std::string_view name(Mode m) { return m == Mode::superoscillation ? "superoscillation" : "supershift"; }

inline Mode parse_mode(std::string_view s) {
  if (s == "superoscillation") return Mode::superoscillation;
  if (s == "supershift") return Mode::supershift;
  throw Error(ErrorKind::InvalidConfig, "unknown mode '" + std::string(s) + "'");
}

/// Precision actually carried by freshly constructed Reals.
inline unsigned current_bits() {
  Real probe(0);
  return static_cast<unsigned>(mpfr_get_prec(probe.backend().data()));
}

inline Radius min_radius(const std::vector<PowerSeries>& G) {
  Radius r = Radius::infinite();
  for (const auto& g : G) r = min(r, g.radius());
  return r;
}

/// A problem at a fixed order n, with coefficients at the current precision.
struct MultivarProblem {
  CoefficientSet<Real> coeffs;
  std::vector<PowerSeries> G;
  Mode mode = Mode::superoscillation;
  Real B;

  std::size_t dimension() const { return G.size(); }
  Radius radius() const { return min_radius(G); }
};

/// Order-independent description of a problem: node family, target, G list,
/// mode and growth parameter. Instantiated per order and precision.
struct ProblemSpec {
  NodeScheme scheme = NodeScheme::equispaced;
  std::size_t n = 8;
  std::vector<Rational> custom_points;
  Rational a{2};
  std::vector<PowerSeries> G;
  Mode mode = Mode::superoscillation;
  std::optional<Rational> B;  // default R / (8e), or 2|a| when every G is entire

  Radius radius() const { return min_radius(G); }

  /// Growth parameter at the current precision.
  Real growth_B() const {
    if (B) return Real(*B);
    const Radius r = radius();
    if (r.is_infinite()) return Real(2 * Real(a < 0 ? Rational(-a) : a));
    return Real(r.real() / (8 * euler_e()));
  }

  NodeSet nodes(std::size_t order, unsigned bits) const {
    if (scheme == NodeScheme::custom) return NodeSet::custom(custom_points, bits);
    return NodeSet::generate(scheme, order, bits);
  }

  /// Checks the hypotheses the limit statements rely on.
  void validate() const {
    if (G.empty()) throw Error(ErrorKind::InvalidConfig, "at least one series G is required");
    if (B && *B <= 0) throw Error(ErrorKind::InvalidConfig, "B must be positive");
    if (scheme == NodeScheme::custom && custom_points.empty())
      throw Error(ErrorKind::InvalidConfig, "custom scheme requires custom_points");
    const Radius r = radius();
    const Rational abs_a = a < 0 ? Rational(-a) : a;
    if (mode == Mode::superoscillation) {
      for (std::size_t l = 0; l < G.size(); ++l)
        if (!G[l].radius().is_infinite() && G[l].radius().value() < 1)
          throw Error(ErrorKind::InvalidConfig, "superoscillation mode requires every radius R_l >= 1; G_" +
                                                    std::to_string(l + 1) + " has radius " + G[l].radius().str());
      if (!r.is_infinite() && abs_a >= r.value())
        throw Error(ErrorKind::InvalidConfig, "superoscillation limit requires |a| < R = min_l R_l; got |a| = " +
                                                  to_string(abs_a) + ", R = " + r.str());
      if (!r.is_infinite() && B) {
        PrecisionScope scope(128);
        if (!(Real(*B) < Real(r.real() / (4 * euler_e()))))
          throw Error(ErrorKind::InvalidConfig, "growth parameter must satisfy B < R / (4e)");
      }
    }
  }

  /// Builds the order-n problem at the current precision.
  MultivarProblem instantiate(std::size_t order, unsigned bits) const {
    NodeSet ns = nodes(order, bits);
    return MultivarProblem{solve_coefficients<Real>(ns, a), G, mode, growth_B()};
  }
};

struct Evaluation {
  Complex<Real> value;
  Real error_bound;  // propagated truncation bounds plus a rounding allowance
};

/// sum_j Z_j e^{i h_j xi}
inline Complex<Real> eval_f1d(const CoefficientSet<Real>& c, const Complex<Real>& xi) {
  Complex<Real> sum(Real(0), Real(0));
  for (std::size_t j = 0; j < c.values.size(); ++j) sum += exp_i(xi * Complex<Real>(c.points[j])) * c.values[j];
  return sum;
}

inline Real default_tail_tol() { return pow2(-static_cast<long>(current_bits()) - 8); }

namespace detail {
inline void check_dimension(const MultivarProblem& p, const std::vector<Real>& x) {
  if (x.size() != p.G.size())
    throw Error(ErrorKind::InvalidConfig, "point has " + std::to_string(x.size()) + " coordinates, problem has d = " +
                                              std::to_string(p.G.size()));
}
inline Real rounding_allowance(const Real& scale, std::size_t ops) {
  return Real(unit_roundoff(current_bits()) * scale * Real(ops + 16));
}
}  // namespace detail

/// Direct-route evaluator for one problem. In superoscillation mode the values
/// G_l(h_j) and G_l(a) do not depend on x and are computed once.
class DirectEvaluator {
 public:
  explicit DirectEvaluator(const MultivarProblem& p, std::optional<Real> tail_tol = std::nullopt)
      : p_(p), tol_(tail_tol ? *tail_tol : default_tail_tol()) {
    for (const auto& g : p_.G) series_.emplace_back(g);
    if (p_.mode == Mode::superoscillation) {
      node_values_.resize(p_.G.size());
      for (std::size_t l = 0; l < p_.G.size(); ++l)
        for (const Real& h : p_.coeffs.points) node_values_[l].push_back(series_[l](Complex<Real>(h), tol_));
    }
  }

  const MultivarProblem& problem() const { return p_; }

  Evaluation eval(const std::vector<Real>& x) const {
    detail::check_dimension(p_, x);
    return p_.mode == Mode::superoscillation ? eval_superoscillation(x) : eval_supershift(x);
  }

  Evaluation target(const std::vector<Real>& x) const {
    detail::check_dimension(p_, x);
    return p_.mode == Mode::superoscillation ? target_superoscillation(x) : target_supershift(x);
  }

 private:
  Evaluation eval_superoscillation(const std::vector<Real>& x) const {
    Complex<Real> sum(Real(0), Real(0));
    Real err(0);
    Real scale(0);
    for (std::size_t j = 0; j < p_.coeffs.values.size(); ++j) {
      Complex<Real> phase(Real(0), Real(0));
      Real phase_err(0);
      for (std::size_t l = 0; l < x.size(); ++l) {
        phase += node_values_[l][j].value * x[l];
        phase_err += boost::multiprecision::abs(x[l]) * node_values_[l][j].tail_bound;
      }
      const Complex<Real> wave = exp_i(phase);
      const Real term_mag = boost::multiprecision::abs(p_.coeffs.values[j]) * abs(wave);
      sum += wave * p_.coeffs.values[j];
      // |e^{i(phase + delta)} - e^{i phase}| <= |e^{i phase}| (e^{|delta|} - 1)
      err += term_mag * Real(boost::multiprecision::exp(phase_err) - 1);
      scale += term_mag * Real(1 + abs(phase));
    }
    err += detail::rounding_allowance(scale, p_.coeffs.values.size() + 4 * x.size());
    return Evaluation{sum, err};
  }

  Evaluation target_superoscillation(const std::vector<Real>& x) const {
    Complex<Real> phase(Real(0), Real(0));
    Real phase_err(0);
    for (std::size_t l = 0; l < x.size(); ++l) {
      SeriesValue g = series_[l](Complex<Real>(Real(p_.coeffs.a)), tol_);
      phase += g.value * x[l];
      phase_err += boost::multiprecision::abs(x[l]) * g.tail_bound;
    }
    const Complex<Real> v = exp_i(phase);
    const Real mag = abs(v);
    Real err = mag * Real(boost::multiprecision::exp(phase_err) - 1) +
               detail::rounding_allowance(Real(mag * (1 + abs(phase))), 4 * x.size());
    return Evaluation{v, err};
  }

  Evaluation eval_supershift(const std::vector<Real>& x) const {
    Complex<Real> sum(Real(0), Real(0));
    Real err(0);
    Real scale(0);
    for (std::size_t j = 0; j < p_.coeffs.values.size(); ++j) {
      Complex<Real> prod(Real(1));
      Real prod_mag(1);
      Real prod_upper(1);  // prod_l (|G_l| + tail_l)
      for (std::size_t l = 0; l < x.size(); ++l) {
        SeriesValue g = series_[l](Complex<Real>(Real(x[l] * p_.coeffs.points[j])), tol_);
        prod *= g.value;
        const Real m = abs(g.value);
        prod_mag *= m;
        prod_upper *= m + g.tail_bound;
      }
      const Real z = boost::multiprecision::abs(p_.coeffs.values[j]);
      sum += prod * p_.coeffs.values[j];
      err += z * Real(prod_upper - prod_mag);
      scale += z * prod_mag;
    }
    err += detail::rounding_allowance(scale, p_.coeffs.values.size() + 4 * x.size());
    return Evaluation{sum, err};
  }

  Evaluation target_supershift(const std::vector<Real>& x) const {
    Complex<Real> prod(Real(1));
    Real prod_mag(1);
    Real prod_upper(1);
    const Real a(p_.coeffs.a);
    for (std::size_t l = 0; l < x.size(); ++l) {
      SeriesValue g = series_[l](Complex<Real>(Real(a * x[l])), tol_);
      prod *= g.value;
      const Real m = abs(g.value);
      prod_mag *= m;
      prod_upper *= m + g.tail_bound;
    }
    return Evaluation{prod, Real(prod_upper - prod_mag + detail::rounding_allowance(prod_mag, 4 * x.size()))};
  }

  MultivarProblem p_;
  Real tol_;
  mutable std::vector<SeriesEvaluator> series_;  // coefficient caches; evaluation is not thread-safe
  std::vector<std::vector<SeriesValue>> node_values_;  // [l][j] = G_l(h_j)
};

inline Evaluation eval_multivar(const MultivarProblem& p, const std::vector<Real>& x,
                                std::optional<Real> tol = std::nullopt) {
  if (p.mode != Mode::superoscillation) throw Error(ErrorKind::InvalidConfig, "eval_multivar needs superoscillation mode");
  return DirectEvaluator(p, std::move(tol)).eval(x);
}

inline Evaluation target_multivar(const MultivarProblem& p, const std::vector<Real>& x,
                                  std::optional<Real> tol = std::nullopt) {
  detail::check_dimension(p, x);
  Real t = tol ? *tol : default_tail_tol();
  Complex<Real> phase(Real(0), Real(0));
  Real phase_err(0);
  for (std::size_t l = 0; l < x.size(); ++l) {
    SeriesValue g = truncated_eval(p.G[l], Complex<Real>(Real(p.coeffs.a)), t);
    phase += g.value * x[l];
    phase_err += boost::multiprecision::abs(x[l]) * g.tail_bound;
  }
  const Complex<Real> v = exp_i(phase);
  const Real mag = abs(v);
  return Evaluation{v, Real(mag * Real(boost::multiprecision::exp(phase_err) - 1) +
                            detail::rounding_allowance(Real(mag * (1 + abs(phase))), 4 * x.size()))};
}

inline Evaluation eval_supershift(const MultivarProblem& p, const std::vector<Real>& x,
                                  std::optional<Real> tol = std::nullopt) {
  if (p.mode != Mode::supershift) throw Error(ErrorKind::InvalidConfig, "eval_supershift needs supershift mode");
  return DirectEvaluator(p, std::move(tol)).eval(x);
}

inline Evaluation target_supershift(const MultivarProblem& p, const std::vector<Real>& x,
                                    std::optional<Real> tol = std::nullopt) {
  MultivarProblem q = p;
  q.mode = Mode::supershift;
  return DirectEvaluator(q, std::move(tol)).target(x);
}

/// Exact supershift sum for polynomial G with rational data.
inline Complex<Rational> eval_supershift_exact(const CoefficientSet<Rational>& c, const std::vector<PowerSeries>& G,
                                               const std::vector<Rational>& x) {
  Complex<Rational> sum(Rational(0), Rational(0));
  for (std::size_t j = 0; j < c.values.size(); ++j) {
    Complex<Rational> prod(Rational(1));
    for (std::size_t l = 0; l < G.size(); ++l) prod *= evaluate_exact(G[l], Complex<Rational>(Rational(x[l] * c.points[j])));
    sum += prod * c.values[j];
  }
  return sum;
}

inline Complex<Rational> target_supershift_exact(const Rational& a, const std::vector<PowerSeries>& G,
                                                 const std::vector<Rational>& x) {
  Complex<Rational> prod(Rational(1));
  for (std::size_t l = 0; l < G.size(); ++l) prod *= evaluate_exact(G[l], Complex<Rational>(Rational(a * x[l])));
  return prod;
}

struct Halfwidth {
  bool infinite = false;
  std::optional<Rational> exact;  // set when the minimum is attained by a rational term
  Real value;
};

/// R' = min(R/|a|, R/(4eB), R) with R = min_l R_l.
inline Halfwidth admissible_halfwidth(const Rational& a, const Real& B, const std::vector<Radius>& radii) {
  const Rational abs_a = a < 0 ? Rational(-a) : a;
  if (abs_a <= 1) throw Error(ErrorKind::InvalidConfig, "admissible_halfwidth requires |a| > 1");
  if (!(B > 0)) throw Error(ErrorKind::InvalidConfig, "admissible_halfwidth requires B > 0");
  Radius r = Radius::infinite();
  for (const auto& ri : radii) r = min(r, ri);
  if (r.is_infinite()) return Halfwidth{true, std::nullopt, std::numeric_limits<Real>::infinity()};
  const Rational by_a = r.value() / abs_a;  // <= R since |a| > 1
  const Real by_b = r.real() / (4 * euler_e() * B);
  if (Real(by_a) <= by_b) return Halfwidth{false, by_a, Real(by_a)};
  return Halfwidth{false, std::nullopt, by_b};
}

}  // namespace superosc
