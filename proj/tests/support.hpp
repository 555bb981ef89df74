#pragma once

#include <complex>
#include <random>
#include <vector>

#include "superosc/numeric.hpp"

namespace testing_support {

using superosc::Complex;
using superosc::Rational;
using superosc::Real;

inline std::complex<double> to_std(const Complex<Real>& z) {
  return {superosc::to_double(z.re), superosc::to_double(z.im)};
}

inline double to_d(const Real& x) { return superosc::to_double(x); }

/// p/q with |p| <= max_num, 1 <= q <= max_den.
inline Rational random_rational(std::mt19937& rng, int max_num, int max_den) {
  std::uniform_int_distribution<int> num(-max_num, max_num);
  std::uniform_int_distribution<int> den(1, max_den);
  return Rational(num(rng), den(rng));
}

/// Distinct rationals in [-1, 1].
inline std::vector<Rational> random_nodes(std::mt19937& rng, std::size_t count) {
  std::vector<Rational> out;
  while (out.size() < count) {
    Rational h = random_rational(rng, 24, 24);
    if (h > 1 || h < -1) continue;
    bool dup = false;
    for (const auto& v : out) dup = dup || v == h;
    if (!dup) out.push_back(h);
  }
  return out;
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testing_support
