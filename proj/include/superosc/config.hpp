#pragma once

// JSON problem configuration. Numbers are accepted as JSON numbers, decimal
// strings or exact "p/q" strings; the canonical form writes every exact
// quantity as a string so parse -> serialize -> parse is the identity.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convergence.hpp"
#include "errors.hpp"
#include "nodes.hpp"
#include "numeric.hpp"
#include "precision.hpp"
#include "series.hpp"
#include "superosc.hpp"

namespace superosc {

using json = nlohmann::json;

struct ProblemConfig {
  ProblemSpec problem;
  std::optional<GridSpec> grid;  // default_grid(problem) when absent
  std::vector<std::size_t> n_list{4, 8, 12, 16, 20, 24};
  PrecisionPolicy precision;
  double tail_tol = 1e-30;

  GridSpec effective_grid() const { return grid ? *grid : default_grid(problem); }

  OperatorOptions operator_options() const {
    OperatorOptions o;
    o.tail_tol = tail_tol;
    return o;
  }

  void validate() const {
    problem.validate();
    precision.validate();
    if (!(tail_tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "truncation.tail_tol must be positive");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      if (n_list[i] < 1) throw Error(ErrorKind::InvalidConfig, "n_list entries must be >= 1");
      if (i > 0 && n_list[i] <= n_list[i - 1]) throw Error(ErrorKind::InvalidConfig, "n_list must be strictly increasing");
    }
    if (problem.scheme != NodeScheme::custom) (void)NodeSet::generate(problem.scheme, problem.n, precision.bits);
    else (void)NodeSet::custom(problem.custom_points, precision.bits);
    check_grid_admissible(problem, effective_grid());
  }
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); }

inline Rational rational(const json& j, const std::string& field) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_float()) return parse_rational(j.dump());
  } catch (const std::invalid_argument& e) {
    fail(field + ": " + e.what());
  }
  fail(field + " must be a number or a numeric string");
}

inline double real_number(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
    try {
      return to_double(parse_rational(s));
    } catch (const std::invalid_argument&) {
    }
  }
  fail(field + " must be a number or a numeric string");
}

inline unsigned unsigned_number(const json& j, const std::string& field) {
  if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)) return j.get<unsigned>();
  if (j.is_string()) {
    const Rational q = rational(j, field);
    if (denominator(q) == 1 && q >= 0) return numerator(q).convert_to<unsigned>();
  }
  fail(field + " must be a nonnegative integer");
}

inline Complex<Rational> complex_rational(const json& j, const std::string& field) {
  if (j.is_array()) {
    if (j.size() != 2) fail(field + " complex values are written [re, im]");
    return Complex<Rational>(rational(j[0], field), rational(j[1], field));
  }
  return Complex<Rational>(rational(j, field));
}

inline std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline json complex_json(const Complex<Rational>& z) {
  if (z.im == 0) return to_string(z.re);
  return json::array({to_string(z.re), to_string(z.im)});
}

inline Radius radius(const json& j, const std::string& field) {
  if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinity")) return Radius::infinite();
  const Rational r = rational(j, field);
  if (r <= 0) fail(field + " must be positive or \"inf\"");
  return Radius(r);
}

inline PowerSeries series(const json& j, std::size_t index) {
  const std::string field = "G[" + std::to_string(index) + "]";
  if (!j.is_object()) fail(field + " must be an object");
  if (j.contains("coeffs")) {
    if (!j.contains("radius")) fail(field + ".radius is required for explicit coefficients");
    std::vector<Complex<Rational>> c;
    for (const auto& v : j.at("coeffs")) c.push_back(complex_rational(v, field + ".coeffs"));
    if (c.empty()) fail(field + ".coeffs is empty");
    return PowerSeries::custom(std::move(c), radius(j.at("radius"), field + ".radius"));
  }
  if (!j.contains("builtin")) fail(field + " needs 'builtin' or 'coeffs'");
  const std::string b = j.at("builtin").get<std::string>();
  const json params = j.value("params", json::object());
  if (b == "identity") return PowerSeries::identity();
  if (b == "monomial") {
    if (!params.contains("power")) fail(field + ".params.power is required");
    return PowerSeries::monomial(unsigned_number(params.at("power"), field + ".params.power"));
  }
  if (b == "exp")
    return PowerSeries::exp(params.contains("scale") ? complex_rational(params.at("scale"), field + ".params.scale")
                                                     : Complex<Rational>(Rational(1)));
  if (b == "sin") return PowerSeries::sin();
  if (b == "cos") return PowerSeries::cos();
  if (b == "geometric") {
    if (!params.contains("pole")) fail(field + ".params.pole is required");
    return PowerSeries::geometric(rational(params.at("pole"), field + ".params.pole"));
  }
  fail(field + ": unknown builtin '" + b + "'");
}

inline json series_json(const PowerSeries& s) {
  using K = PowerSeries::Kind;
  switch (s.kind()) {
    case K::identity: return {{"builtin", "identity"}};
    case K::monomial: return {{"builtin", "monomial"}, {"params", {{"power", s.power()}}}};
    case K::exp: return {{"builtin", "exp"}, {"params", {{"scale", complex_json(s.scale())}}}};
    case K::sin: return {{"builtin", "sin"}};
    case K::cos: return {{"builtin", "cos"}};
    case K::geometric: return {{"builtin", "geometric"}, {"params", {{"pole", to_string(s.pole())}}}};
    case K::custom: {
      json c = json::array();
      for (const auto& z : s.custom_coeffs()) c.push_back(complex_json(z));
      return {{"coeffs", c}, {"radius", s.radius().str()}};
    }
  }
  return {};
}

}  // namespace config_detail

inline ProblemConfig parse_config(const json& j) {
  using namespace config_detail;
  if (!j.is_object()) fail("config must be a JSON object");
  ProblemConfig c;
  ProblemSpec& p = c.problem;
  try {
    if (j.contains("nodes")) {
      const json& n = j.at("nodes");
      p.scheme = parse_node_scheme(n.value("scheme", "equispaced"));
      if (n.contains("n")) p.n = unsigned_number(n.at("n"), "nodes.n");
      if (n.contains("custom_points"))
        for (const auto& v : n.at("custom_points")) p.custom_points.push_back(rational(v, "nodes.custom_points"));
      if (p.scheme == NodeScheme::custom) {
        if (p.custom_points.empty()) fail("nodes.custom_points is required for the custom scheme");
        p.n = p.custom_points.size() - 1;
      }
    }
    if (!j.contains("a")) fail("a is required");
    p.a = rational(j.at("a"), "a");
    if (!j.contains("G") || !j.at("G").is_array()) fail("G must be a list of series");
    p.G.clear();
    for (std::size_t i = 0; i < j.at("G").size(); ++i) p.G.push_back(series(j.at("G")[i], i));
    p.mode = parse_mode(j.value("mode", "superoscillation"));
    if (j.contains("B") && !j.at("B").is_null()) p.B = rational(j.at("B"), "B");
    if (j.contains("grid") && !j.at("grid").is_null()) {
      const json& g = j.at("grid");
      GridSpec gs;
      if (!g.contains("box")) fail("grid.box is required");
      for (const auto& iv : g.at("box")) {
        if (!iv.is_array() || iv.size() != 2) fail("grid.box entries are [lo, hi] pairs");
        gs.box.emplace_back(rational(iv[0], "grid.box"), rational(iv[1], "grid.box"));
      }
      if (g.contains("points_per_axis")) gs.points_per_axis = unsigned_number(g.at("points_per_axis"), "grid.points_per_axis");
      c.grid = std::move(gs);
    }
    if (j.contains("n_list")) {
      c.n_list.clear();
      for (const auto& v : j.at("n_list")) c.n_list.push_back(unsigned_number(v, "n_list"));
    }
    if (j.contains("precision")) {
      const json& pr = j.at("precision");
      if (pr.contains("bits")) c.precision.bits = unsigned_number(pr.at("bits"), "precision.bits");
      if (pr.contains("escalation_factor"))
        c.precision.escalation_factor = unsigned_number(pr.at("escalation_factor"), "precision.escalation_factor");
      if (pr.contains("agreement_tol")) c.precision.agreement_tol = real_number(pr.at("agreement_tol"), "precision.agreement_tol");
      if (pr.contains("max_bits")) c.precision.max_bits = unsigned_number(pr.at("max_bits"), "precision.max_bits");
    }
    if (j.contains("truncation") && j.at("truncation").contains("tail_tol"))
      c.tail_tol = real_number(j.at("truncation").at("tail_tol"), "truncation.tail_tol");
  } catch (const json::exception& e) {
    fail(std::string("malformed config: ") + e.what());
  }
  return c;
}

inline json to_json(const ProblemConfig& c) {
  using namespace config_detail;
  const ProblemSpec& p = c.problem;
  json nodes = {{"scheme", std::string(name(p.scheme))}, {"n", p.n}};
  if (p.scheme == NodeScheme::custom) {
    json pts = json::array();
    for (const auto& h : p.custom_points) pts.push_back(to_string(h));
    nodes["custom_points"] = pts;
  }
  json G = json::array();
  for (const auto& s : p.G) G.push_back(series_json(s));
  json out = {{"nodes", nodes}, {"a", to_string(p.a)}, {"G", G}, {"mode", std::string(name(p.mode))}};
  if (p.B) out["B"] = to_string(*p.B);
  if (c.grid) {
    json box = json::array();
    for (const auto& [lo, hi] : c.grid->box) box.push_back({to_string(lo), to_string(hi)});
    out["grid"] = {{"box", box}, {"points_per_axis", c.grid->points_per_axis}};
  }
  out["n_list"] = c.n_list;
  out["precision"] = {{"bits", c.precision.bits},
                      {"escalation_factor", c.precision.escalation_factor},
                      {"agreement_tol", shortest(c.precision.agreement_tol)},
                      {"max_bits", c.precision.max_bits}};
  out["truncation"] = {{"tail_tol", shortest(c.tail_tol)}};
  return out;
}

inline std::string serialize(const ProblemConfig& c) { return to_json(c).dump(2); }

inline ProblemConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// FNV-1a over the compact canonical serialization.
inline std::string config_hash(const ProblemConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace superosc
