#pragma once

// Runtime working precision and the two-precision agreement protocol.
//
// MPFR values created through Boost take the process-wide default precision at
// construction, so every computation handed to with_escalation() must build
// its Real values from exact inputs inside the call. The default precision is
// process state; PrecisionScope serializes access to it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>
#include <type_traits>
#include <utility>

#include "errors.hpp"
#include "numeric.hpp"

namespace superosc {

struct PrecisionPolicy {
  unsigned bits = 128;
  unsigned escalation_factor = 2;
  double agreement_tol = 1e-24;
  unsigned max_bits = 8192;

  /// Default working precision for a sequence of order n: max(128, 8n).
  static unsigned default_bits(std::size_t n) { return static_cast<unsigned>(std::max<std::size_t>(128, 8 * n)); }

  /// Same policy with bits raised to at least default_bits(n).
  PrecisionPolicy for_order(std::size_t n) const {
    PrecisionPolicy p = *this;
    p.bits = std::max(bits, default_bits(n));
    p.max_bits = std::max(p.max_bits, p.bits);
    return p;
  }

  void validate() const {
    if (bits < 64) throw Error(ErrorKind::InvalidConfig, "precision.bits must be >= 64");
    if (max_bits < bits) throw Error(ErrorKind::InvalidConfig, "precision.max_bits must be >= precision.bits");
    if (escalation_factor < 2) throw Error(ErrorKind::InvalidConfig, "precision.escalation_factor must be >= 2");
    if (!(agreement_tol > 0.0 && agreement_tol < 1.0))
      throw Error(ErrorKind::InvalidConfig, "precision.agreement_tol must lie in (0, 1)");
  }

  /// Applies the SUPEROSC_BITS environment override, if present.
  PrecisionPolicy with_env_override() const {
    PrecisionPolicy p = *this;
    if (const char* env = std::getenv("SUPEROSC_BITS"); env && *env) {
      char* end = nullptr;
      unsigned long v = std::strtoul(env, &end, 10);
      if (end == env || *end != '\0' || v == 0)
        throw Error(ErrorKind::InvalidConfig, std::string("SUPEROSC_BITS is not a positive integer: ") + env);
      p.bits = static_cast<unsigned>(v);
      p.max_bits = std::max(p.max_bits, p.bits);
    }
    return p;
  }
};

namespace detail {
inline std::recursive_mutex& precision_mutex() {
  static std::recursive_mutex m;
  return m;
}

inline unsigned bits_to_digits10(unsigned bits) {
  // digits10 -> bits conversion in the MPFR backend rounds up, so this yields >= bits.
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}
}  // namespace detail

/// Sets the default MPFR precision for the lifetime of the scope and restores it on exit.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits) : lock_(detail::precision_mutex()), saved_(Real::default_precision()) {
    Real::default_precision(detail::bits_to_digits10(bits));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  std::unique_lock<std::recursive_mutex> lock_;
  unsigned saved_;
};

/// Unit roundoff for a working precision of `bits`.
inline Real unit_roundoff(unsigned bits) { return pow2(-static_cast<long>(bits) + 1); }

template <class V>
struct Escalated {
  V value;
  Real error_estimate;  // observed relative discrepancy between the last two precisions
  unsigned bits = 0;    // precision of the returned value
  unsigned runs = 0;    // number of precisions tried
};

namespace detail {
inline Real magnitude(const Real& x) { return boost::multiprecision::abs(x); }
inline Real magnitude(const Complex<Real>& z) { return abs(z); }
inline Real difference(const Real& a, const Real& b) { return boost::multiprecision::abs(Real(a - b)); }
inline Real difference(const Complex<Real>& a, const Complex<Real>& b) { return abs(a - b); }

inline Real relative_discrepancy(const Real& diff, const Real& reference) {
  if (diff == 0) return Real(0);
  if (reference == 0) return diff;
  return Real(diff / reference);
}
}  // namespace detail

/// Runs `computation(bits)` at increasing precision until two consecutive runs
/// agree to `policy.agreement_tol` relatively. `measure` maps a result to the
/// Real or Complex<Real> quantity compared between runs.
template <class F, class Measure>
auto with_escalation(F&& computation, const PrecisionPolicy& policy, Measure&& measure)
    -> Escalated<std::invoke_result_t<F&, unsigned>> {
  using V = std::invoke_result_t<F&, unsigned>;
  policy.validate();
  std::lock_guard<std::recursive_mutex> hold(detail::precision_mutex());

  unsigned bits = policy.bits;
  unsigned runs = 1;
  V previous = [&] {
    PrecisionScope scope(bits);
    return computation(bits);
  }();
  for (;;) {
    unsigned next = bits * policy.escalation_factor;
    if (next > policy.max_bits)
      throw Error(ErrorKind::NoConvergenceAtMaxBits,
                  "no agreement to " + std::to_string(policy.agreement_tol) + " below " +
                      std::to_string(policy.max_bits) + " bits");
    PrecisionScope scope(next);
    V current = computation(next);
    ++runs;
    const auto m_prev = measure(previous);
    const auto m_cur = measure(current);
    Real discrepancy = detail::relative_discrepancy(detail::difference(m_prev, m_cur), detail::magnitude(m_cur));
    if (discrepancy <= policy.agreement_tol)
      return Escalated<V>{std::move(current), std::move(discrepancy), next, runs};
    previous = std::move(current);
    bits = next;
  }
}

template <class F>
auto with_escalation(F&& computation, const PrecisionPolicy& policy) {
  return with_escalation(std::forward<F>(computation), policy, [](const auto& v) -> const auto& { return v; });
}

}  // namespace superosc
