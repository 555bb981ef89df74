#pragma once

// Entire functions of exponential type, carried as a Taylor-coefficient
// generator plus a certificate (C, b) with |a_j| <= C b^j / j!, and sampled
// estimates of the weighted sup-norm ||f||_B = sup |f(xi)| e^{-B |xi|}.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "numeric.hpp"
#include "series.hpp"

namespace superosc {

struct Certificate {
  Real C{1};
  Real b{0};
};

/// Returns the first `count` Taylor coefficients.
template <class T>
using TaylorPrefix = std::function<std::vector<Complex<T>>(std::size_t)>;

template <class T>
struct GrowthFunction {
  TaylorPrefix<T> taylor;
  Certificate certificate;
  std::string label;

  std::vector<Complex<T>> coefficients(std::size_t count) const { return taylor(count); }
};

namespace detail {
inline Real magnitude_of(const Rational& q) { return Real(q < 0 ? Rational(-q) : q); }
inline Real magnitude_of(const Real& x) { return boost::multiprecision::abs(x); }
inline Real magnitude_of(const Complex<Real>& z) { return abs(z); }
inline Real magnitude_of(const Complex<Rational>& z) { return abs(to_real(z)); }
}  // namespace detail

/// xi -> e^{i lambda xi}; a_j = (i lambda)^j / j!, certificate (1, |lambda|) exactly.
template <class T>
GrowthFunction<T> exponential_wave(const T& lambda) {
  GrowthFunction<T> f;
  f.taylor = [lambda](std::size_t count) {
    std::vector<Complex<T>> a(count, Complex<T>(T(0), T(0)));
    if (count == 0) return a;
    const Complex<T> step(T(0), lambda);
    a[0] = Complex<T>(T(1));
    for (std::size_t j = 1; j < count; ++j) a[j] = a[j - 1] * step / T(j);
    return a;
  };
  f.certificate = Certificate{Real(1), detail::magnitude_of(lambda)};
  f.label = "exponential_wave";
  return f;
}

/// Constant function c (certificate b is the configured b_min sentinel).
template <class T>
GrowthFunction<T> constant_function(const Complex<T>& c, double b_min = 1e-6) {
  GrowthFunction<T> f;
  f.taylor = [c](std::size_t count) {
    std::vector<Complex<T>> a(count, Complex<T>(T(0), T(0)));
    if (count) a[0] = c;
    return a;
  };
  f.certificate = Certificate{std::max(Real(1), detail::magnitude_of(c)), Real(b_min)};
  f.label = "constant";
  return f;
}

/// Function with a finite list of Taylor coefficients (zero beyond).
template <class T>
GrowthFunction<T> polynomial_function(std::vector<Complex<T>> coeffs, std::string label = "polynomial");

/// sum_i w_i f_i with certificate (sum |w_i| C_i, max b_i).
template <class T>
GrowthFunction<T> linear_combination(std::vector<Complex<T>> weights, std::vector<GrowthFunction<T>> parts) {
  GrowthFunction<T> f;
  Real c_total(0);
  Real b_max(0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    c_total += detail::magnitude_of(weights[i]) * parts[i].certificate.C;
    if (parts[i].certificate.b > b_max) b_max = parts[i].certificate.b;
  }
  f.certificate = Certificate{c_total, b_max};
  f.label = "linear_combination";
  f.taylor = [weights = std::move(weights), parts = std::move(parts)](std::size_t count) {
    std::vector<Complex<T>> a(count, Complex<T>(T(0), T(0)));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      auto p = parts[i].taylor(count);
      for (std::size_t j = 0; j < count; ++j) a[j] += weights[i] * p[j];
    }
    return a;
  };
  return f;
}

/// xi -> sum_j Z_j e^{i h_j xi}. With |h_j| <= 1 the certificate (sum |Z_j|, 1) holds.
template <class T>
GrowthFunction<T> sequence_function(const CoefficientSet<T>& c) {
  GrowthFunction<T> f;
  f.certificate = Certificate{detail::magnitude_of(c.l1_norm()), Real(1)};
  f.label = "superoscillating_sequence";
  f.taylor = [z = c.values, h = c.points](std::size_t count) {
    std::vector<Complex<T>> a(count, Complex<T>(T(0), T(0)));
    if (count == 0) return a;
    // a_k = (i^k / k!) sum_j Z_j h_j^k
    std::vector<T> powers(z.size(), T(1));
    T inv_fact(1);
    for (std::size_t k = 0; k < count; ++k) {
      if (k > 0) inv_fact /= T(k);
      T moment(0);
      for (std::size_t j = 0; j < z.size(); ++j) {
        moment += z[j] * powers[j];
        powers[j] *= h[j];
      }
      a[k] = i_pow<T>(k) * Complex<T>(T(moment * inv_fact));
    }
    return a;
  };
  return f;
}

template <class T>
GrowthFunction<T> scaled(const GrowthFunction<T>& f, const Complex<T>& s) {
  GrowthFunction<T> g;
  g.certificate = Certificate{Real(f.certificate.C * detail::magnitude_of(s)), f.certificate.b};
  g.label = f.label + "_scaled";
  g.taylor = [inner = f.taylor, s](std::size_t count) {
    auto a = inner(count);
    for (auto& v : a) v *= s;
    return a;
  };
  return g;
}


/// a_0, the value at xi = 0.
template <class T>
Complex<T> restrict_at_zero(const GrowthFunction<T>& f) {
  return f.taylor(1).at(0);
}

struct CertificateOptions {
  std::size_t horizon = 32;
  double b_min = 1e-6;
  double divergence_ratio = 1.25;
};

/// Fits (C, b) on a_0..a_J: b = max_{1<=j<=J} (|a_j| j! / C0)^{1/j} with
/// C0 = max(|a_0|, 1), then the minimal C for which the bound holds on the horizon.
inline Certificate certificate_fit(const std::vector<Real>& abs_coeffs, const CertificateOptions& opt = {}) {
  const std::size_t horizon = abs_coeffs.size() - 1;
  if (abs_coeffs.size() < 9) throw Error(ErrorKind::InvalidConfig, "certificate_fit needs a horizon J >= 8");
  std::vector<Real> scaled(horizon + 1);  // |a_j| j!
  Real fact(1);
  for (std::size_t j = 0; j <= horizon; ++j) {
    if (j > 0) fact *= j;
    scaled[j] = abs_coeffs[j] * fact;
  }
  const Real c0 = std::max(Real(1), abs_coeffs[0]);
  std::vector<Real> root(horizon + 1, Real(0));
  for (std::size_t j = 1; j <= horizon; ++j)
    if (scaled[j] > 0) root[j] = boost::multiprecision::exp(Real(boost::multiprecision::log(Real(scaled[j] / c0)) / j));

  // Growth faster than C b^j / j!: the root sequence keeps increasing across the
  // upper half of the horizon and clearly exceeds the lower-half maximum.
  const std::size_t half = horizon / 2;
  Real lower(0);
  for (std::size_t j = 1; j <= half; ++j) lower = std::max(lower, root[j]);
  std::vector<Real> upper;
  for (std::size_t j = half + 1; j <= horizon; ++j)
    if (root[j] > 0) upper.push_back(root[j]);
  if (upper.size() >= 2 && std::is_sorted(upper.begin(), upper.end())) {
    const Real& reference = lower > 0 ? lower : upper.front();
    if (upper.back() > reference * Real(opt.divergence_ratio))
      throw Error(ErrorKind::NotExponentialType, "Taylor coefficients grow faster than C b^j / j! on the horizon");
  }

  Real b(0);
  for (std::size_t j = 1; j <= horizon; ++j) b = std::max(b, root[j]);
  if (b == 0) b = Real(opt.b_min);
  Real c(0);
  for (std::size_t j = 0; j <= horizon; ++j) c = std::max(c, Real(scaled[j] / ipow(b, j)));
  if (c == 0) c = 1;
  return Certificate{c, b};
}

template <class T>
GrowthFunction<T> polynomial_function(std::vector<Complex<T>> coeffs, std::string label) {
  GrowthFunction<T> f;
  f.label = std::move(label);
  // Any b > 0 works for a polynomial; take b = 1 and C = max_j |a_j| j!.
  Real c(1);
  Real fact(1);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (j > 0) fact *= j;
    c = std::max(c, Real(detail::magnitude_of(coeffs[j]) * fact));
  }
  f.certificate = Certificate{c, Real(1)};
  f.taylor = [coeffs = std::move(coeffs)](std::size_t count) {
    std::vector<Complex<T>> a(count, Complex<T>(T(0), T(0)));
    for (std::size_t j = 0; j < count && j < coeffs.size(); ++j) a[j] = coeffs[j];
    return a;
  };
  return f;
}

template <class T>
Certificate certificate_fit(const TaylorPrefix<T>& taylor, const CertificateOptions& opt = {}) {
  if (opt.horizon < 8) throw Error(ErrorKind::InvalidConfig, "certificate_fit needs a horizon J >= 8");
  auto a = taylor(opt.horizon + 1);
  std::vector<Real> mags;
  mags.reserve(a.size());
  for (const auto& v : a) mags.push_back(detail::magnitude_of(v));
  return certificate_fit(mags, opt);
}

/// Radial-angular sampling: the origin plus circles at radii rho0 2^{k/steps}.
struct NormGrid {
  double rho0 = 1.0 / 16.0;
  unsigned steps_per_octave = 4;
  unsigned angles = 64;
  std::optional<double> rho_max;  // fixed outer radius; adaptive when empty
  double cap_tolerance = 1e-3;    // relative weight of the analytic tail at the cap
  double hard_rho_limit = 4096.0;

  NormGrid refined() const {
    NormGrid g = *this;
    g.steps_per_octave *= 2;
    g.angles *= 2;
    return g;
  }
};

struct NormEstimate {
  Real lower;
  Real upper;
  Real rho_cap;
  std::size_t samples = 0;
};

namespace detail {

/// Smallest J with C (b rho)^{J+1} / (J+1)! below eps * C (and J >= 2 b rho).
inline std::size_t taylor_terms_for(const Real& b, const Real& rho, const Real& eps) {
  const Real x = b * rho;
  Real term(1);
  std::size_t j = 0;
  for (;;) {
    ++j;
    term *= x / j;
    if (Real(j) > 2 * x && term < eps) return j;
    if (j > 100000) return j;
  }
}

inline std::vector<Real> sample_radii(const NormGrid& g, double cap) {
  std::vector<Real> r;
  for (std::size_t k = 0;; ++k) {
    double rho = g.rho0 * std::exp2(double(k) / g.steps_per_octave);
    if (rho > cap * (1 + 1e-12)) break;
    r.emplace_back(rho);
  }
  return r;
}

}  // namespace detail

/// Sampled B-norm: lower = max over samples of |f(xi)| e^{-B|xi|}; upper adds the
/// certificate bound C e^{(b - B) rho*} for the region beyond the sampled cap rho*.
inline NormEstimate bnorm_estimate(const GrowthFunction<Real>& f, const Real& B, const NormGrid& grid = {},
                                   double margin = 0.01) {
  const Real& b = f.certificate.b;
  const Real& C = f.certificate.C;
  if (!(B > b * Real(1 + margin)))
    throw Error(ErrorKind::NormNotCertifiable, "B = " + to_string(B, 8) + " does not exceed certificate b = " +
                                                   to_string(b, 8) + " by the required margin");
  const Real gap = B - b;
  const Real eps = pow2(-static_cast<long>(Real::default_precision() * 3));  // well below working precision

  // Outer radius: fixed, or doubled until the analytic tail is negligible next to the sampled maximum.
  double cap = grid.rho_max ? *grid.rho_max : std::max(1.0, to_double(Real(4 / gap)));
  std::vector<Complex<Real>> coeffs;
  NormEstimate est{Real(0), Real(0), Real(0), 0};
  auto two_pi = Real(2 * pi());
  for (;;) {
    const Real cap_r(cap);
    const std::size_t terms = detail::taylor_terms_for(b, cap_r, eps);
    if (coeffs.size() < terms + 1) coeffs = f.taylor(terms + 1);
    std::vector<Complex<Real>> used(coeffs.begin(), coeffs.begin() + static_cast<long>(terms + 1));

    Real best = abs(used.empty() ? Complex<Real>() : used[0]);  // origin
    std::size_t samples = 1;
    for (const Real& rho : detail::sample_radii(grid, cap)) {
      const Real weight = boost::multiprecision::exp(Real(-B * rho));
      for (unsigned t = 0; t < grid.angles; ++t) {
        const Real theta = two_pi * t / grid.angles;
        const Complex<Real> xi(Real(rho * boost::multiprecision::cos(theta)), Real(rho * boost::multiprecision::sin(theta)));
        Real v = abs(horner(used, xi)) * weight;
        if (v > best) best = v;
        ++samples;
      }
    }
    const Real tail = C * boost::multiprecision::exp(Real(-gap * cap_r));
    est = NormEstimate{best, std::max(best, tail), cap_r, samples};
    if (grid.rho_max || tail <= best * Real(grid.cap_tolerance) || cap * 2 > grid.hard_rho_limit) break;
    cap *= 2;
  }
  return est;
}

}  // namespace superosc
