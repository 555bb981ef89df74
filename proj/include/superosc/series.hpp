#pragma once

// Power series G(lambda) = sum_m g_m lambda^m: builtin catalog plus user lists,
// truncated evaluation with an envelope tail bound, and truncated arithmetic
// (Cauchy product and power, exponential) on coefficient prefixes.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace superosc {

/// Radius of convergence: a non-negative rational or infinity.
class Radius {
 public:
  Radius() = default;  // infinite
  explicit Radius(Rational r) : value_(std::move(r)) {
    if (*value_ <= 0) throw Error(ErrorKind::InvalidConfig, "radius must be positive");
  }
  static Radius infinite() { return Radius(); }

  bool is_infinite() const { return !value_.has_value(); }
  const Rational& value() const { return *value_; }
  Real real() const { return is_infinite() ? std::numeric_limits<Real>::infinity() : Real(*value_); }
  double approx() const { return is_infinite() ? std::numeric_limits<double>::infinity() : to_double(*value_); }
  std::string str() const { return is_infinite() ? "inf" : to_string(*value_); }

  friend bool operator==(const Radius& a, const Radius& b) { return a.value_ == b.value_; }
  friend bool operator<(const Radius& a, const Radius& b) {
    if (a.is_infinite()) return false;
    if (b.is_infinite()) return true;
    return *a.value_ < *b.value_;
  }

 private:
  std::optional<Rational> value_;
};

inline Radius min(const Radius& a, const Radius& b) { return b < a ? b : a; }

/// Finite coefficient prefix c_0..c_N with the radius of the series it truncates.
template <class T>
struct TruncatedSeries {
  std::vector<Complex<T>> coeffs;
  Radius radius;

  std::size_t order() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  Complex<T> operator[](std::size_t k) const { return k < coeffs.size() ? coeffs[k] : Complex<T>(); }
};

class PowerSeries {
 public:
  enum class Kind { identity, monomial, exp, sin, cos, geometric, custom };

  static PowerSeries identity() { return PowerSeries(Kind::identity, "identity"); }

  static PowerSeries monomial(std::size_t p) {
    PowerSeries s(Kind::monomial, "monomial");
    s.power_ = p;
    return s;
  }

  /// e^{c lambda}
  static PowerSeries exp(Complex<Rational> scale = Complex<Rational>(Rational(1))) {
    PowerSeries s(Kind::exp, "exp");
    s.scale_ = std::move(scale);
    return s;
  }

  static PowerSeries sin() { return PowerSeries(Kind::sin, "sin"); }
  static PowerSeries cos() { return PowerSeries(Kind::cos, "cos"); }

  /// 1 / (1 - lambda / pole), radius |pole|.
  static PowerSeries geometric(Rational pole) {
    if (pole == 0) throw Error(ErrorKind::InvalidConfig, "geometric series pole must be nonzero");
    PowerSeries s(Kind::geometric, "geometric");
    s.radius_ = Radius(pole < 0 ? Rational(-pole) : pole);
    s.pole_ = std::move(pole);
    return s;
  }

  /// Finite coefficient list (zero beyond it) with a declared radius used for
  /// hypothesis checks. With >= 32 coefficients the declaration is checked
  /// against the root-test estimate.
  static PowerSeries custom(std::vector<Complex<Rational>> coeffs, Radius declared);

  Kind kind() const { return kind_; }
  const std::string& tag() const { return tag_; }
  const Radius& radius() const { return radius_; }
  std::size_t power() const { return power_; }
  const Complex<Rational>& scale() const { return scale_; }
  const Rational& pole() const { return pole_; }
  const std::vector<Complex<Rational>>& custom_coeffs() const { return custom_; }

  /// Polynomial degree when the series terminates.
  std::optional<std::size_t> degree() const {
    switch (kind_) {
      case Kind::identity: return 1;
      case Kind::monomial: return power_;
      case Kind::custom: {
        std::size_t d = 0;
        for (std::size_t m = 0; m < custom_.size(); ++m)
          if (!custom_[m].is_zero()) d = m;
        return d;
      }
      case Kind::exp:
        if (scale_.is_zero()) return 0;
        return std::nullopt;
      default: return std::nullopt;
    }
  }

  /// g_0..g_{count-1} in scalar type T.
  template <class T>
  std::vector<Complex<T>> coefficients(std::size_t count) const {
    std::vector<Complex<T>> g(count, Complex<T>(T(0), T(0)));
    if (count == 0) return g;
    switch (kind_) {
      case Kind::identity:
        if (count > 1) g[1] = Complex<T>(T(1));
        break;
      case Kind::monomial:
        if (power_ < count) g[power_] = Complex<T>(T(1));
        break;
      case Kind::exp: {
        const Complex<T> c(T(scale_.re), T(scale_.im));
        g[0] = Complex<T>(T(1));
        for (std::size_t m = 1; m < count; ++m) g[m] = g[m - 1] * c / T(m);
        break;
      }
      case Kind::sin:
      case Kind::cos: {
        T f(1);  // 1/m!
        for (std::size_t m = 0; m < count; ++m) {
          if (m > 0) f /= T(m);
          const bool odd = m % 2 == 1;
          if ((kind_ == Kind::sin) == odd) {
            const bool negative = (kind_ == Kind::sin ? (m - 1) / 2 : m / 2) % 2 == 1;
            g[m] = Complex<T>(negative ? T(-f) : f);
          }
        }
        break;
      }
      case Kind::geometric: {
        const T inv = T(1) / T(pole_);
        T v(1);
        for (std::size_t m = 0; m < count; ++m) {
          g[m] = Complex<T>(v);
          v *= inv;
        }
        break;
      }
      case Kind::custom:
        for (std::size_t m = 0; m < count && m < custom_.size(); ++m)
          g[m] = Complex<T>(T(custom_[m].re), T(custom_[m].im));
        break;
    }
    return g;
  }

  template <class T>
  TruncatedSeries<T> prefix(std::size_t order) const {
    return TruncatedSeries<T>{coefficients<T>(order + 1), radius_};
  }

 private:
  PowerSeries(Kind k, std::string tag) : kind_(k), tag_(std::move(tag)) {}

  Kind kind_;
  std::string tag_;
  Radius radius_;
  std::size_t power_ = 0;
  Complex<Rational> scale_{Rational(1)};
  Rational pole_{1};
  std::vector<Complex<Rational>> custom_;
};

/// Geometric envelope |c_m| <= C rho^m fitted on the upper half of a prefix
/// (rho clamped to at least 1/radius).
struct Envelope {
  Real C;
  Real rho;
  std::size_t order = 0;  // N, the last prefix index

  /// 2 C q^{N+1} / (1 - q) with q = rho r; +inf when q >= 1.
  Real tail(const Real& r) const {
    if (r == 0 || rho == 0) return Real(0);
    Real q = rho * r;
    if (q >= 1) return std::numeric_limits<Real>::infinity();
    return Real(2 * C * ipow(q, order + 1) / (1 - q));
  }
};

inline Envelope envelope_fit(const std::vector<Real>& magnitudes, const Radius& radius) {
  if (magnitudes.empty()) return Envelope{Real(0), Real(0), 0};
  const std::size_t n = magnitudes.size() - 1;
  const std::size_t start = std::max<std::size_t>(1, n / 2);
  Real rho(0);
  for (std::size_t m = start; m <= n; ++m) {
    if (magnitudes[m] == 0) continue;
    Real root = boost::multiprecision::exp(Real(boost::multiprecision::log(magnitudes[m]) / m));
    if (root > rho) rho = root;
  }
  if (!radius.is_infinite()) {
    Real inv = Real(1) / radius.real();
    if (inv > rho) rho = inv;
  }
  if (rho == 0) return Envelope{Real(0), Real(0), n};
  Real envelope_c(0);
  for (std::size_t m = start; m <= n; ++m) {
    Real ratio = magnitudes[m] / ipow(rho, m);
    if (ratio > envelope_c) envelope_c = ratio;
  }
  if (envelope_c == 0) envelope_c = 1;
  return Envelope{envelope_c, rho, n};
}

/// Tail estimate for sum_{m > N} |c_m| r^m from the prefix magnitudes |c_0..c_N|,
/// with a factor 2 margin over the fitted geometric remainder.
inline Real envelope_tail(const std::vector<Real>& magnitudes, const Real& r, const Radius& radius) {
  if (magnitudes.empty() || r == 0) return Real(0);
  return envelope_fit(magnitudes, radius).tail(r);
}

inline Complex<Real> to_real_complex(const Complex<Real>& z) { return z; }
inline Complex<Real> to_real_complex(const Complex<Rational>& z) { return to_real(z); }

template <class T>
std::vector<Real> magnitudes(const std::vector<Complex<T>>& c) {
  std::vector<Real> out;
  out.reserve(c.size());
  for (const auto& z : c) out.push_back(abs(to_real_complex(z)));
  return out;
}

/// Horner evaluation of a coefficient prefix.
template <class T>
Complex<T> horner(const std::vector<Complex<T>>& c, const Complex<T>& x) {
  Complex<T> acc(T(0), T(0));
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

struct SeriesValue {
  Complex<Real> value;
  Real tail_bound;
  std::size_t order = 0;
};

/// Evaluation of one series at many points. Coefficient prefixes and their
/// envelopes are computed once per order N and reused; not thread-safe.
class SeriesEvaluator {
 public:
  explicit SeriesEvaluator(PowerSeries s, std::size_t n_max = 4096, std::size_t n_start = 16)
      : s_(std::move(s)), n_max_(n_max), n_start_(std::min(n_start, n_max)) {}

  const PowerSeries& series() const { return s_; }

  /// s(lambda) to the first N terms, N doubling until the envelope tail bound
  /// falls below tail_tol. Requires |lambda| < 0.99 radius.
  SeriesValue operator()(const Complex<Real>& lambda, const Real& tail_tol) {
    const Real r = abs(lambda);
    if (!s_.radius().is_infinite() && r >= Real(s_.radius().real() * Real(0.99)))
      throw Error(ErrorKind::OutsideRadius, "series '" + s_.tag() + "' evaluated at |lambda| = " + to_string(r, 8) +
                                                " outside 0.99 x radius " + s_.radius().str());
    if (auto d = s_.degree()) {
      if (levels_.empty()) levels_.push_back(Level{s_.coefficients<Real>(*d + 1), Envelope{Real(0), Real(0), *d}});
      return SeriesValue{horner(levels_[0].coeffs, lambda), Real(0), *d};
    }
    for (std::size_t i = 0;; ++i) {
      if (i == levels_.size()) {
        const std::size_t n = i == 0 ? n_start_ : std::min(2 * levels_.back().env.order, n_max_);
        if (i > 0 && n == levels_.back().env.order) break;
        auto c = s_.coefficients<Real>(n + 1);
        Envelope env = envelope_fit(magnitudes(c), s_.radius());
        levels_.push_back(Level{std::move(c), std::move(env)});
      }
      Real tail = levels_[i].env.tail(r);
      if (tail < tail_tol) return SeriesValue{horner(levels_[i].coeffs, lambda), tail, levels_[i].env.order};
      if (levels_[i].env.order >= n_max_) break;
    }
    throw Error(ErrorKind::TailNotBounded, "series '" + s_.tag() + "' tail above tolerance at order " +
                                               std::to_string(n_max_));
  }

 private:
  struct Level {
    std::vector<Complex<Real>> coeffs;
    Envelope env;
  };
  PowerSeries s_;
  std::size_t n_max_;
  std::size_t n_start_;
  std::vector<Level> levels_;
};

/// One-off evaluation; see SeriesEvaluator.
inline SeriesValue truncated_eval(const PowerSeries& s, const Complex<Real>& lambda, const Real& tail_tol,
                                  std::size_t n_max = 4096, std::size_t n_start = 16) {
  return SeriesEvaluator(s, n_max, n_start)(lambda, tail_tol);
}

/// Exact evaluation for terminating series with rational coefficients.
inline Complex<Rational> evaluate_exact(const PowerSeries& s, const Complex<Rational>& lambda) {
  auto d = s.degree();
  if (!d) throw Error(ErrorKind::InvalidConfig, "exact evaluation needs a polynomial series, got '" + s.tag() + "'");
  return horner(s.coefficients<Rational>(*d + 1), lambda);
}

/// c_k = sum_{i <= k} a_i b_{k-i} for k <= N.
template <class T>
TruncatedSeries<T> cauchy_product(const TruncatedSeries<T>& a, const TruncatedSeries<T>& b, std::size_t order) {
  TruncatedSeries<T> out{std::vector<Complex<T>>(order + 1, Complex<T>(T(0), T(0))), min(a.radius, b.radius)};
  const std::size_t na = std::min(a.coeffs.size(), order + 1);
  for (std::size_t i = 0; i < na; ++i) {
    if (a.coeffs[i].is_zero()) continue;
    const std::size_t nb = std::min(b.coeffs.size(), order + 1 - i);
    for (std::size_t j = 0; j < nb; ++j) out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  return out;
}

/// s^m truncated at order N by repeated convolution; s^0 is the constant 1.
template <class T>
TruncatedSeries<T> cauchy_power(const TruncatedSeries<T>& s, std::size_t m, std::size_t order) {
  TruncatedSeries<T> out{std::vector<Complex<T>>(order + 1, Complex<T>(T(0), T(0))), s.radius};
  out.coeffs[0] = Complex<T>(T(1));
  for (std::size_t i = 0; i < m; ++i) out = cauchy_product(out, s, order);
  out.radius = s.radius;
  return out;
}

inline Complex<Real> exp_constant(const Complex<Real>& z) { return exp(z); }
inline Complex<Rational> exp_constant(const Complex<Rational>& z) {
  if (!z.is_zero()) throw Error(ErrorKind::InvalidConfig, "exp of a nonzero constant term is not rational");
  return Complex<Rational>(Rational(1));
}

/// exp(s) to order N: E_0 = e^{s_0}, k E_k = sum_{j=1..k} j s_j E_{k-j}.
template <class T>
TruncatedSeries<T> series_exp(const TruncatedSeries<T>& s, std::size_t order) {
  TruncatedSeries<T> e{std::vector<Complex<T>>(order + 1, Complex<T>(T(0), T(0))), s.radius};
  e.coeffs[0] = exp_constant(s[0]);
  const std::size_t ns = s.coeffs.size();
  for (std::size_t k = 1; k <= order; ++k) {
    Complex<T> acc(T(0), T(0));
    for (std::size_t j = 1; j <= k && j < ns; ++j) {
      if (s.coeffs[j].is_zero()) continue;
      acc += s.coeffs[j] * e.coeffs[k - j] * T(j);
    }
    e.coeffs[k] = acc / T(k);
  }
  return e;
}

/// Root-test radius estimate 1 / max_{m in top quartile} |g_m|^{1/m}. Returns
/// +inf when the tail vanishes, when the root test keeps decaying between the
/// last two quartiles (entire-function signature), or beyond `infinity_threshold`.
inline Real radius_estimate(const std::vector<Real>& magnitudes, double infinity_threshold = 1e12) {
  const std::size_t count = magnitudes.size();
  if (count < 32) throw Error(ErrorKind::InvalidConfig, "radius_estimate needs at least 32 coefficients");
  auto root_max = [&](std::size_t lo, std::size_t hi) {
    Real rho(0);
    for (std::size_t m = std::max<std::size_t>(lo, 1); m < hi; ++m) {
      if (magnitudes[m] == 0) continue;
      Real root = boost::multiprecision::exp(Real(boost::multiprecision::log(magnitudes[m]) / m));
      if (root > rho) rho = root;
    }
    return rho;
  };
  const Real top = root_max(3 * count / 4, count);
  const Real below = root_max(count / 2, 3 * count / 4);
  const Real inf = std::numeric_limits<Real>::infinity();
  if (top == 0) return inf;
  if (below > 0 && top < Real(below * Real(0.85))) return inf;
  Real r = Real(1) / top;
  if (r > infinity_threshold) return inf;
  return r;
}

inline PowerSeries PowerSeries::custom(std::vector<Complex<Rational>> coeffs, Radius declared) {
  PowerSeries s(Kind::custom, "custom");
  s.custom_ = std::move(coeffs);
  s.radius_ = std::move(declared);
  if (s.custom_.size() >= 32) {
    std::vector<Real> mags;
    for (const auto& z : s.custom_) mags.push_back(abs(to_real(z)));
    Real est = radius_estimate(mags);
    const bool est_inf = boost::multiprecision::isinf(est);
    bool consistent = est_inf == s.radius_.is_infinite();
    if (consistent && !est_inf) {
      Real ratio = est / s.radius_.real();
      consistent = ratio > Real(0.75) && ratio < Real(4) / 3;
    }
    if (!consistent)
      throw Error(ErrorKind::InvalidConfig, "declared radius " + s.radius_.str() +
                                                " disagrees with root-test estimate " + to_string(est, 6));
  }
  return s;
}

}  // namespace superosc
