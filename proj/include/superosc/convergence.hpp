#pragma once

// Uniform-error sweeps over grids and direct-vs-operator consistency checks.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "nodes.hpp"
#include "numeric.hpp"
#include "operator_engine.hpp"
#include "precision.hpp"
#include "series.hpp"
#include "superosc.hpp"

namespace superosc {

struct GridSpec {
  std::vector<std::pair<Rational, Rational>> box;  // closed interval per axis
  std::size_t points_per_axis = 9;

  std::size_t dimension() const { return box.size(); }

  void validate() const {
    if (box.empty()) throw Error(ErrorKind::InvalidConfig, "grid box is empty");
    if (points_per_axis < 2) throw Error(ErrorKind::InvalidConfig, "grid needs at least 2 points per axis");
    for (const auto& [lo, hi] : box)
      if (hi < lo) throw Error(ErrorKind::InvalidConfig, "grid interval has hi < lo");
  }

  /// Tensor grid with exactly rational coordinates.
  std::vector<std::vector<Rational>> points() const {
    validate();
    const std::size_t m = points_per_axis;
    std::vector<std::vector<Rational>> axes;
    for (const auto& [lo, hi] : box) {
      std::vector<Rational> ax;
      for (std::size_t k = 0; k < m; ++k) ax.push_back(lo + (hi - lo) * Rational(k, m - 1));
      axes.push_back(std::move(ax));
    }
    std::vector<std::vector<Rational>> out{{}};
    for (const auto& ax : axes) {
      std::vector<std::vector<Rational>> next;
      next.reserve(out.size() * ax.size());
      for (const auto& prefix : out)
        for (const auto& v : ax) {
          auto p = prefix;
          p.push_back(v);
          next.push_back(std::move(p));
        }
      out = std::move(next);
    }
    return out;
  }

  GridSpec refined() const { return GridSpec{box, 2 * points_per_axis - 1}; }
};

inline std::vector<Real> to_real_point(const std::vector<Rational>& x) {
  std::vector<Real> out;
  out.reserve(x.size());
  for (const auto& v : x) out.emplace_back(v);
  return out;
}

/// Symmetric box of halfwidth w on every axis, w given as a decimal rational.
inline GridSpec symmetric_grid(std::size_t d, const Rational& w, std::size_t points_per_axis) {
  return GridSpec{std::vector<std::pair<Rational, Rational>>(d, {Rational(-w), w}), points_per_axis};
}

/// [-1, 1]^d for superoscillation; for supershift a box of 3/4 of the admissible
/// halfwidth R' (rounded down to a multiple of 1/64), or [-1, 1]^d when R' is infinite.
inline GridSpec default_grid(const ProblemSpec& spec) {
  const std::size_t d = spec.G.size();
  const std::size_t m = d <= 2 ? 9 : 5;
  if (spec.mode == Mode::superoscillation) return symmetric_grid(d, Rational(1), m);
  PrecisionScope scope(128);
  std::vector<Radius> radii;
  for (const auto& g : spec.G) radii.push_back(g.radius());
  const Halfwidth hw = admissible_halfwidth(spec.a, spec.growth_B(), radii);
  if (hw.infinite) return symmetric_grid(d, Rational(1), m);
  const double w = std::floor(to_double(hw.value) * 0.75 * 64.0) / 64.0;
  return symmetric_grid(d, Rational(static_cast<long>(w * 64), 64), m);
}

/// Rejects grids outside the region where the sequence and its limit are evaluated.
inline void check_grid_admissible(const ProblemSpec& spec, const GridSpec& grid) {
  grid.validate();
  if (grid.dimension() != spec.G.size())
    throw Error(ErrorKind::InvalidConfig, "grid dimension " + std::to_string(grid.dimension()) +
                                              " does not match d = " + std::to_string(spec.G.size()));
  if (spec.mode != Mode::supershift) return;
  PrecisionScope scope(128);
  std::vector<Radius> radii;
  for (const auto& g : spec.G) radii.push_back(g.radius());
  const Rational abs_a = spec.a < 0 ? Rational(-spec.a) : spec.a;
  if (abs_a <= 1) return;
  const Halfwidth hw = admissible_halfwidth(spec.a, spec.growth_B(), radii);
  if (hw.infinite) return;
  for (const auto& [lo, hi] : grid.box) {
    const Rational m = std::max(lo < 0 ? Rational(-lo) : lo, hi < 0 ? Rational(-hi) : hi);
    if (!(Real(m) < hw.value))
      throw Error(ErrorKind::OutsideRadius, "grid extends to |x| = " + to_string(m) +
                                                " beyond the admissible halfwidth R' = " + to_string(hw.value, 12));
  }
}

struct ConvergenceReport {
  std::vector<std::size_t> n_values;
  std::vector<double> sup_errors;
  std::vector<double> coefficient_max_magnitudes;
  std::vector<unsigned> precision_bits_used;  // 0 marks the exact rational path
  std::vector<std::optional<double>> dual_route_discrepancies;
  std::vector<std::optional<std::string>> failures;
  std::optional<double> dual_route_max_discrepancy;

  std::size_t size() const { return n_values.size(); }
};

struct SweepOptions {
  bool dual_route = false;
  OperatorOptions op;
  bool allow_exact = true;
};

/// True when the supershift sum can be evaluated exactly in rationals.
inline bool exact_path_available(const ProblemSpec& spec, std::size_t n) {
  if (spec.mode != Mode::supershift || spec.scheme == NodeScheme::chebyshev) return false;
  for (const auto& g : spec.G)
    if (!g.degree()) return false;
  (void)n;
  return true;
}

namespace detail {

struct SweepPoint {
  Real sup_error;
  Real max_coeff;
  std::optional<Real> dual;
};

inline SweepPoint sweep_at(const ProblemSpec& spec, std::size_t n, const std::vector<std::vector<Rational>>& pts,
                           unsigned bits, const SweepOptions& opt) {
  const MultivarProblem prob = spec.instantiate(n, bits);
  const DirectEvaluator ev(prob);
  SweepPoint out{Real(0), prob.coeffs.max_magnitude(), std::nullopt};
  if (opt.dual_route) out.dual = Real(0);
  for (const auto& q : pts) {
    const auto x = to_real_point(q);
    const Evaluation f = ev.eval(x);
    const Evaluation t = ev.target(x);
    out.sup_error = std::max(out.sup_error, abs(f.value - t.value));
    if (opt.dual_route) {
      const OperatorResult r = operator_route_Fn(prob, x, opt.op);
      *out.dual = std::max(*out.dual, abs(r.value - f.value));
    }
  }
  return out;
}

inline Rational exact_sup_error(const ProblemSpec& spec, std::size_t n,
                                const std::vector<std::vector<Rational>>& pts, Rational& max_coeff) {
  const NodeSet ns = spec.nodes(n, 128);
  const auto c = solve_coefficients<Rational>(ns, spec.a);
  max_coeff = c.max_magnitude();
  Rational worst(0);
  for (const auto& x : pts) {
    const Complex<Rational> diff = eval_supershift_exact(c, spec.G, x) - target_supershift_exact(spec.a, spec.G, x);
    // |diff|^2 is exact; the sup is compared on squared moduli.
    const Rational sq = norm(diff);
    if (sq > worst) worst = sq;
  }
  return worst;
}

}  // namespace detail

/// For every n: rebuilds the coefficients, evaluates sup_x |F_n(x) - target(x)|
/// over the grid with precision escalation, and records max |Z_j| and the bits used.
inline ConvergenceReport sweep(const ProblemSpec& spec, const std::vector<std::size_t>& n_list, const GridSpec& grid,
                               const PrecisionPolicy& policy, const SweepOptions& opt = {}) {
  spec.validate();
  check_grid_admissible(spec, grid);
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw Error(ErrorKind::InvalidConfig, "n_list must be strictly increasing");
  const auto pts = grid.points();

  ConvergenceReport rep;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n : n_list) {
    rep.n_values.push_back(n);
    try {
      if (opt.allow_exact && exact_path_available(spec, n)) {
        Rational max_coeff;
        const Rational sq = detail::exact_sup_error(spec, n, pts, max_coeff);
        rep.sup_errors.push_back(std::sqrt(to_double(sq)));
        rep.coefficient_max_magnitudes.push_back(to_double(max_coeff));
        rep.precision_bits_used.push_back(0);
        rep.dual_route_discrepancies.push_back(std::nullopt);
        rep.failures.push_back(std::nullopt);
        continue;
      }
      const PrecisionPolicy pol = policy.for_order(n);
      auto res = with_escalation([&](unsigned bits) { return detail::sweep_at(spec, n, pts, bits, opt); }, pol,
                                 [](const detail::SweepPoint& s) -> const Real& { return s.sup_error; });
      rep.sup_errors.push_back(to_double(res.value.sup_error));
      rep.coefficient_max_magnitudes.push_back(to_double(res.value.max_coeff));
      rep.precision_bits_used.push_back(res.bits);
      rep.dual_route_discrepancies.push_back(res.value.dual ? std::optional<double>(to_double(*res.value.dual))
                                                            : std::nullopt);
      rep.failures.push_back(std::nullopt);
    } catch (const Error& e) {
      rep.sup_errors.push_back(nan);
      rep.coefficient_max_magnitudes.push_back(nan);
      rep.precision_bits_used.push_back(0);
      rep.dual_route_discrepancies.push_back(std::nullopt);
      rep.failures.push_back(std::string(name(e.kind())) + ": " + e.what());
    }
  }
  for (const auto& d : rep.dual_route_discrepancies)
    if (d) rep.dual_route_max_discrepancy = std::max(rep.dual_route_max_discrepancy.value_or(0.0), *d);
  return rep;
}

struct DualRouteReport {
  double max_discrepancy = 0;    // max_x |direct - operator|
  double max_bound = 0;          // max_x of the combined reported bounds
  double min_slack = 0;          // min_x (bound - discrepancy); negative means a violation
  double max_limit_discrepancy = 0;  // max_x |target - limit route|
  double min_limit_slack = 0;
  std::size_t points = 0;
  unsigned bits = 0;
  std::size_t max_symbol_order = 0;

  bool within_bounds() const { return min_slack >= 0 && min_limit_slack >= 0; }
};

/// Compares the direct and operator routes for F_n and for the limit at every grid point.
inline DualRouteReport dual_route_check(const ProblemSpec& spec, std::size_t n, const GridSpec& grid, unsigned bits,
                                        const OperatorOptions& opt = {}) {
  spec.validate();
  check_grid_admissible(spec, grid);
  const auto pts = grid.points();
  PrecisionScope scope(bits);
  const MultivarProblem prob = spec.instantiate(n, bits);
  const DirectEvaluator ev(prob);
  DualRouteReport rep;
  rep.bits = bits;
  rep.min_slack = rep.min_limit_slack = std::numeric_limits<double>::infinity();
  for (const auto& q : pts) {
    const auto x = to_real_point(q);
    const Evaluation f = ev.eval(x);
    const OperatorResult r = operator_route_Fn(prob, x, opt);
    const Real disc = abs(f.value - r.value);
    const Real bound = f.error_bound + r.tail_bound;
    rep.max_discrepancy = std::max(rep.max_discrepancy, to_double(disc));
    rep.max_bound = std::max(rep.max_bound, to_double(bound));
    rep.min_slack = std::min(rep.min_slack, to_double(Real(bound - disc)));
    rep.max_symbol_order = std::max(rep.max_symbol_order, r.order);

    const Evaluation t = ev.target(x);
    const OperatorResult lt = limit_route_target(prob, x, opt);
    const Real ldisc = abs(t.value - lt.value);
    rep.max_limit_discrepancy = std::max(rep.max_limit_discrepancy, to_double(ldisc));
    rep.min_limit_slack = std::min(rep.min_limit_slack, to_double(Real(t.error_bound + lt.tail_bound - ldisc)));
    ++rep.points;
  }
  return rep;
}

}  // namespace superosc
