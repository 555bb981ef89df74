#pragma once

// Infinite-order differential operators as truncated symbols sigma(lambda):
// the degree-k coefficient multiplies D^k / i^k. Acting on f = sum a_j xi^j,
//   (op f)_j = sum_k sigma_k i^{-k} a_{j+k} (j+k)! / j!.
// U has symbol exp(y(lambda)), y_p = i sum_l x_l g_{l,p}; V has symbol
// prod_l G_l(x_l lambda).

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "growth_space.hpp"
#include "numeric.hpp"
#include "precision.hpp"
#include "series.hpp"
#include "superosc.hpp"

namespace superosc {

enum class OperatorKind { U, V };

inline std::string_view name(OperatorKind k) { return k == OperatorKind::U ? "U" : "V"; }

inline OperatorKind parse_operator_kind(std::string_view s) {
  if (s == "U" || s == "u") return OperatorKind::U;
  if (s == "V" || s == "v") return OperatorKind::V;
  throw Error(ErrorKind::InvalidConfig, "unknown operator kind '" + std::string(s) + "'");
}

inline OperatorKind operator_kind_for(Mode m) { return m == Mode::superoscillation ? OperatorKind::U : OperatorKind::V; }

template <class T>
struct OperatorSymbol {
  OperatorKind kind = OperatorKind::U;
  TruncatedSeries<T> sigma;
  std::size_t order = 0;  // truncation order N
  std::vector<T> x;
  std::vector<PowerSeries> G;
  Radius sigma_radius = Radius::infinite();
};

struct OperatorOptions {
  double tail_tol = 1e-30;
  std::size_t n_start = 32;
  std::size_t n_max = 512;
  bool adaptive = true;  // false: use n_start as is and report whatever tail results
};

namespace detail {
inline Rational abs_rational(const Rational& q) { return q < 0 ? Rational(-q) : q; }
inline Rational abs_rational(const Real& x) {
  // Slightly enlarged so R / |x| is not overstated.
  return Rational(boost::multiprecision::abs(x).convert_to<double>() * (1 + 1e-12));
}
}  // namespace detail

/// y_p = i sum_l x_l g_{l,p} for p <= order, constant term included.
template <class T>
TruncatedSeries<T> build_y_series(const std::vector<T>& x, const std::vector<PowerSeries>& G, std::size_t order) {
  if (x.size() != G.size()) throw Error(ErrorKind::InvalidConfig, "x and G have different lengths");
  TruncatedSeries<T> y{std::vector<Complex<T>>(order + 1, Complex<T>(T(0), T(0))), min_radius(G)};
  for (std::size_t l = 0; l < G.size(); ++l) {
    if (x[l] == 0) continue;
    const auto g = G[l].coefficients<T>(order + 1);
    for (std::size_t p = 0; p <= order; ++p) y.coeffs[p] += Complex<T>::i() * g[p] * x[l];
  }
  return y;
}

template <class T>
OperatorSymbol<T> build_U(const std::vector<T>& x, const std::vector<PowerSeries>& G, std::size_t order) {
  auto y = build_y_series(x, G, order);
  OperatorSymbol<T> op{OperatorKind::U, series_exp(y, order), order, x, G, min_radius(G)};
  return op;
}

template <class T>
OperatorSymbol<T> build_V(const std::vector<T>& x, const std::vector<PowerSeries>& G, std::size_t order) {
  if (x.size() != G.size()) throw Error(ErrorKind::InvalidConfig, "x and G have different lengths");
  TruncatedSeries<T> sigma{std::vector<Complex<T>>(order + 1, Complex<T>(T(0), T(0))), Radius::infinite()};
  sigma.coeffs[0] = Complex<T>(T(1));
  Radius r = Radius::infinite();
  for (std::size_t l = 0; l < G.size(); ++l) {
    auto g = G[l].coefficients<T>(order + 1);
    T power(1);
    for (std::size_t m = 0; m <= order; ++m) {
      g[m] *= power;
      power *= x[l];
    }
    sigma = cauchy_product(sigma, TruncatedSeries<T>{std::move(g), Radius::infinite()}, order);
    if (!G[l].radius().is_infinite() && x[l] != 0)
      r = min(r, Radius(G[l].radius().value() / detail::abs_rational(x[l])));
  }
  sigma.radius = r;
  return OperatorSymbol<T>{OperatorKind::V, std::move(sigma), order, x, G, r};
}

template <class T>
OperatorSymbol<T> build_operator(OperatorKind kind, const std::vector<T>& x, const std::vector<PowerSeries>& G,
                                 std::size_t order) {
  return kind == OperatorKind::U ? build_U(x, G, order) : build_V(x, G, order);
}

/// Bound on sum_{k > N} |sigma_k| b^k from the envelope of the computed prefix.
inline Real symbol_tail(const OperatorSymbol<Real>& op, const Real& b) {
  return envelope_tail(magnitudes(op.sigma.coeffs), b, op.sigma_radius);
}

/// sum_{k <= N} |sigma_k| b^k
inline Real symbol_weight(const OperatorSymbol<Real>& op, const Real& b) {
  Real s(0);
  Real p(1);
  for (const auto& c : op.sigma.coeffs) {
    s += abs(c) * p;
    p *= b;
  }
  return s;
}

/// First `count` output coefficients of op f.
template <class T>
std::vector<Complex<T>> operator_coefficients(const OperatorSymbol<T>& op, const GrowthFunction<T>& f,
                                              std::size_t count) {
  const std::size_t N = op.sigma.coeffs.size() - 1;
  std::vector<Complex<T>> out(count, Complex<T>(T(0), T(0)));
  if (count == 0) return out;
  const auto a = f.taylor(count + N);
  // s_k = sigma_k i^{-k}
  std::vector<Complex<T>> s(N + 1);
  for (std::size_t k = 0; k <= N; ++k) s[k] = op.sigma.coeffs[k] * i_pow<T>(4 - k % 4);
  for (std::size_t j = 0; j < count; ++j) {
    Complex<T> acc(T(0), T(0));
    T ratio(1);  // (j+k)! / j!
    for (std::size_t k = 0; k <= N; ++k) {
      if (k > 0) ratio *= T(j + k);
      if (s[k].is_zero() || a[j + k].is_zero()) continue;
      acc += s[k] * a[j + k] * ratio;
    }
    out[j] = acc;
  }
  return out;
}

/// op f as a GrowthFunction. With |a_j| <= C b^j / j! the output satisfies
/// |c_j| <= C S(b) b^j / j!, S(b) = sum_k |sigma_k| b^k, which is the output certificate.
inline GrowthFunction<Real> apply_operator(const OperatorSymbol<Real>& op, const GrowthFunction<Real>& f) {
  const Real& b = f.certificate.b;
  const Real weight = symbol_weight(op, b) + symbol_tail(op, b);
  GrowthFunction<Real> g;
  g.certificate = Certificate{Real(f.certificate.C * weight), b};
  g.label = std::string(name(op.kind)) + "(" + f.label + ")";
  g.taylor = [op, f](std::size_t count) { return operator_coefficients(op, f, count); };
  return g;
}

template <class T>
GrowthFunction<T> apply_operator_exact(const OperatorSymbol<T>& op, const GrowthFunction<T>& f) {
  GrowthFunction<T> g;
  g.certificate = f.certificate;
  g.label = std::string(name(op.kind)) + "(" + f.label + ")";
  g.taylor = [op, f](std::size_t count) { return operator_coefficients(op, f, count); };
  return g;
}

/// Truncation bounds for the first `count` output coefficients:
/// tail_j = C b^j / j! * sum_{k > N} |sigma_k| b^k.
inline std::vector<Real> operator_tail_bounds(const OperatorSymbol<Real>& op, const GrowthFunction<Real>& f,
                                              std::size_t count) {
  const Real& b = f.certificate.b;
  const Real t = f.certificate.C * symbol_tail(op, b);
  std::vector<Real> out;
  out.reserve(count);
  Real scale(1);
  for (std::size_t j = 0; j < count; ++j) {
    if (j > 0) scale *= b / j;
    out.push_back(t * scale);
  }
  return out;
}

struct OperatorResult {
  Complex<Real> value;
  Real tail_bound;  // symbol truncation plus rounding allowance
  std::size_t order = 0;
};

namespace detail {
/// Applies the operator built at increasing N to f and restricts to xi = 0.
inline OperatorResult restricted_value(OperatorKind kind, const std::vector<Real>& x,
                                       const std::vector<PowerSeries>& G, const GrowthFunction<Real>& f,
                                       const OperatorOptions& opt) {
  const Real tol(opt.tail_tol);
  const Real& b = f.certificate.b;
  std::size_t N = std::min(opt.n_start, opt.n_max);
  for (;;) {
    auto op = build_operator(kind, x, G, N);
    const Real tail = f.certificate.C * symbol_tail(op, b);
    if (tail < tol || !opt.adaptive) {
      const Complex<Real> value = operator_coefficients(op, f, 1).at(0);
      const Real scale = f.certificate.C * symbol_weight(op, b);
      return OperatorResult{value, Real(tail + rounding_allowance(scale, 2 * N + 8 * x.size())), N};
    }
    if (N >= opt.n_max)
      throw Error(ErrorKind::TailNotBounded, "operator " + std::string(name(kind)) + " symbol tail " +
                                                 to_string(tail, 6) + " above tolerance at N = " +
                                                 std::to_string(opt.n_max));
    N = std::min(2 * N, opt.n_max);
  }
}
}  // namespace detail

/// F_n(x) computed as (op sum_j Z_j e^{i xi h_j}) at xi = 0.
inline OperatorResult operator_route_Fn(const MultivarProblem& p, const std::vector<Real>& x,
                                        const OperatorOptions& opt = {}) {
  detail::check_dimension(p, x);
  const OperatorKind kind = operator_kind_for(p.mode);
  return detail::restricted_value(kind, x, p.G, sequence_function(p.coeffs), opt);
}

/// The limit computed as (op e^{i xi a}) at xi = 0.
inline OperatorResult limit_route_target(const MultivarProblem& p, const std::vector<Real>& x,
                                         const OperatorOptions& opt = {}) {
  detail::check_dimension(p, x);
  const OperatorKind kind = operator_kind_for(p.mode);
  const Rational abs_a = detail::abs_rational(p.coeffs.a);
  const Radius R = p.radius();
  if (kind == OperatorKind::U && !R.is_infinite() && abs_a >= R.value())
    throw Error(ErrorKind::OutsideRadius, "limit route needs |a| < R, got |a| = " + to_string(abs_a));
  if (kind == OperatorKind::V && !R.is_infinite())
    for (const Real& xl : x)
      if (!(Real(abs_a) * boost::multiprecision::abs(xl) < R.real()))
        throw Error(ErrorKind::OutsideRadius, "limit route needs |x_l| < R / |a|, got |x_l| = " + to_string(xl, 8));
  return detail::restricted_value(kind, x, p.G, exponential_wave(Real(p.coeffs.a)), opt);
}

struct ProbeResult {
  std::vector<Real> ratios;  // per family member: ||op f||_{8eB} / ||f||_B (sampled estimates)
  Real max_ratio;
  std::vector<std::string> labels;
};

/// Test family for the continuity probe: waves at frequencies B/4, B/2, 3B/4 and the constant 1.
inline std::vector<GrowthFunction<Real>> default_probe_family(const Real& B) {
  std::vector<GrowthFunction<Real>> fam;
  for (int q = 1; q <= 3; ++q) {
    auto f = exponential_wave(Real(B * q / 4));
    f.label = "wave(" + std::to_string(q) + "B/4)";
    fam.push_back(std::move(f));
  }
  fam.push_back(constant_function(Complex<Real>(Real(1))));
  return fam;
}

/// Sampled ratios ||op f||_{8eB} / ||f||_B over a family. The symbol is built
/// to the first N whose envelope tail at the family's largest b is below tol.
inline ProbeResult continuity_probe(OperatorKind kind, const std::vector<Real>& x, const std::vector<PowerSeries>& G,
                                    const Real& B, const std::vector<GrowthFunction<Real>>& family,
                                    const NormGrid& grid = {}, const OperatorOptions& opt = {}) {
  const Radius R = min_radius(G);
  if (!(B > 0)) throw Error(ErrorKind::InvalidConfig, "continuity probe needs B > 0");
  if (kind == OperatorKind::U && !R.is_infinite() && !(B < Real(R.real() / (4 * euler_e()))))
    throw Error(ErrorKind::InvalidConfig, "U continuity needs B < R / (4e)");
  if (kind == OperatorKind::V && !R.is_infinite())
    for (const Real& xl : x)
      if (!(boost::multiprecision::abs(xl) < Real(R.real() / (4 * euler_e() * B))))
        throw Error(ErrorKind::OutsideRadius, "V continuity needs |x_l| < R / (4eB)");
  Real b_max(0);
  for (const auto& f : family) b_max = std::max(b_max, f.certificate.b);

  std::size_t N = std::min(opt.n_start, opt.n_max);
  OperatorSymbol<Real> op = build_operator(kind, x, G, N);
  while (symbol_tail(op, b_max) >= Real(opt.tail_tol)) {
    if (N >= opt.n_max) throw Error(ErrorKind::TailNotBounded, "probe symbol tail not bounded at N_max");
    N = std::min(2 * N, opt.n_max);
    op = build_operator(kind, x, G, N);
  }

  const Real B_out = 8 * euler_e() * B;
  ProbeResult res{{}, Real(0), {}};
  for (const auto& f : family) {
    const NormEstimate in = bnorm_estimate(f, B, grid);
    const NormEstimate out = bnorm_estimate(apply_operator(op, f), B_out, grid);
    Real ratio = out.lower / in.lower;
    res.max_ratio = std::max(res.max_ratio, ratio);
    res.ratios.push_back(std::move(ratio));
    res.labels.push_back(f.label);
  }
  return res;
}

}  // namespace superosc
