#pragma once

// Scalar types shared by every module: a runtime-precision binary float (MPFR),
// an exact rational (GMP), and a small complex wrapper usable over both.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace superosc {

using Real = boost::multiprecision::mpfr_float;
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

template <class T>
struct Complex {
  T re{0};
  T im{0};

  Complex() = default;
  Complex(T r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}

  static Complex i() { return Complex(T(0), T(1)); }

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    T r = re * o.re - im * o.im;
    T s = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(s);
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    T den = o.re * o.re + o.im * o.im;
    T r = (re * o.re + im * o.im) / den;
    T s = (im * o.re - re * o.im) / den;
    re = std::move(r);
    im = std::move(s);
    return *this;
  }
  Complex& operator*=(const T& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const T& s) {
    re /= s;
    im /= s;
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator*(Complex a, const T& s) { return a *= s; }
  friend Complex operator*(const T& s, Complex a) { return a *= s; }
  friend Complex operator/(Complex a, const T& s) { return a /= s; }
  friend Complex operator-(const Complex& a) { return Complex(T(-a.re), T(-a.im)); }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

  bool is_zero() const { return re == 0 && im == 0; }
};

template <class T>
Complex<T> conj(const Complex<T>& z) {
  return Complex<T>(z.re, T(-z.im));
}

/// Squared modulus; exact for rationals.
template <class T>
T norm(const Complex<T>& z) {
  return z.re * z.re + z.im * z.im;
}

inline Real abs(const Complex<Real>& z) {
  return boost::multiprecision::sqrt(norm(z));
}

/// z^k by binary powering.
template <class T>
Complex<T> ipow(Complex<T> z, std::size_t k) {
  Complex<T> out(T(1));
  while (k) {
    if (k & 1U) out *= z;
    k >>= 1U;
    if (k) z *= z;
  }
  return out;
}

template <class T>
T ipow(T x, std::size_t k) {
  T out(1);
  while (k) {
    if (k & 1U) out *= x;
    k >>= 1U;
    if (k) x *= x;
  }
  return out;
}

/// i^k for integer k >= 0.
template <class T>
Complex<T> i_pow(std::size_t k) {
  switch (k % 4) {
    case 0: return Complex<T>(T(1), T(0));
    case 1: return Complex<T>(T(0), T(1));
    case 2: return Complex<T>(T(-1), T(0));
    default: return Complex<T>(T(0), T(-1));
  }
}

inline Complex<Real> exp(const Complex<Real>& z) {
  Real m = boost::multiprecision::exp(z.re);
  return Complex<Real>(Real(m * boost::multiprecision::cos(z.im)), Real(m * boost::multiprecision::sin(z.im)));
}

/// e^{i z}
inline Complex<Real> exp_i(const Complex<Real>& z) {
  return exp(Complex<Real>(Real(-z.im), z.re));
}

inline Real pi() {
  Real p;
  mpfr_const_pi(p.backend().data(), MPFR_RNDN);
  return p;
}

inline Real euler_e() { return boost::multiprecision::exp(Real(1)); }

/// 2^{-bits}
inline Real pow2(long e) {
  Real r(1);
  mpfr_mul_2si(r.backend().data(), r.backend().data(), e, MPFR_RNDN);
  return r;
}

inline Real to_real(const Rational& q) { return Real(q); }
inline Complex<Real> to_real(const Complex<Rational>& z) { return Complex<Real>(Real(z.re), Real(z.im)); }

inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Parses "p/q", integers and decimal literals ("-1.25e-3") exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto trim = [](std::string& t) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  };
  trim(s);
  if (s.empty()) throw std::invalid_argument("empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long exponent = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      std::size_t used = 0;
      long e = 0;
      try {
        e = std::stol(s.substr(pos + 1), &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("malformed exponent in '" + s + "'");
      }
      if (pos + 1 + used != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
      exponent += e;
      pos = s.size();
      break;
    } else {
      throw std::invalid_argument("malformed number '" + s + "'");
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed number '" + s + "'");
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  Rational value{Integer(digits)};
  Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0)
    value /= Rational(ten_pow);
  else
    value *= Rational(ten_pow);
  return negative ? Rational(-value) : value;
}

/// Canonical text for a rational: "p" or "p/q".
inline std::string to_string(const Rational& q) { return q.str(); }

inline std::string to_string(const Real& x, int digits = 20) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

}  // namespace superosc
