#pragma once

// Command-line front end: coeffs, certify, eval, sweep, operator, check.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "coefficients.hpp"
#include "config.hpp"
#include "convergence.hpp"
#include "errors.hpp"
#include "growth_space.hpp"
#include "nodes.hpp"
#include "numeric.hpp"
#include "operator_engine.hpp"
#include "precision.hpp"
#include "superosc.hpp"

namespace superosc {

enum class PlotFormat { csv, json };

inline PlotFormat parse_plot_format(const std::string& s) {
  if (s == "csv") return PlotFormat::csv;
  if (s == "json") return PlotFormat::json;
  throw Error(ErrorKind::InvalidConfig, "unknown format '" + s + "' (csv or json)");
}

struct PlotMetadata {
  std::string config_hash;
  std::string tool_version = "0.1.0";
};

inline json library_versions() {
  return {{"boost", BOOST_LIB_VERSION}, {"mpfr", mpfr_get_version()}, {"gmp", gmp_version}};
}

namespace cli_detail {
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double number_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }
inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  return config_detail::shortest(v);
}
}  // namespace cli_detail

inline json report_to_json(const ConvergenceReport& r, const PlotMetadata& meta = {}) {
  using cli_detail::number_or_null;
  json rows = json::array();
  for (std::size_t i = 0; i < r.size(); ++i) {
    json row = {{"n", r.n_values[i]},
                {"sup_error", number_or_null(r.sup_errors[i])},
                {"max_coeff_magnitude", number_or_null(r.coefficient_max_magnitudes[i])},
                {"bits", r.precision_bits_used[i]},
                {"dual_route_discrepancy", r.dual_route_discrepancies[i] ? json(*r.dual_route_discrepancies[i]) : json(nullptr)}};
    if (r.failures[i]) row["failure"] = *r.failures[i];
    rows.push_back(row);
  }
  return {{"schema", "superosc.convergence/1"},
          {"config_hash", meta.config_hash},
          {"versions", {{"superosc", meta.tool_version}, {"libraries", library_versions()}}},
          {"rows", rows},
          {"dual_route_max_discrepancy",
           r.dual_route_max_discrepancy ? json(*r.dual_route_max_discrepancy) : json(nullptr)}};
}

inline ConvergenceReport report_from_json(const json& j) {
  if (j.value("schema", "") != "superosc.convergence/1")
    throw Error(ErrorKind::InvalidConfig, "not a superosc.convergence/1 document");
  ConvergenceReport r;
  for (const auto& row : j.at("rows")) {
    r.n_values.push_back(row.at("n").get<std::size_t>());
    r.sup_errors.push_back(cli_detail::number_from(row.at("sup_error")));
    r.coefficient_max_magnitudes.push_back(cli_detail::number_from(row.at("max_coeff_magnitude")));
    r.precision_bits_used.push_back(row.at("bits").get<unsigned>());
    const json& d = row.at("dual_route_discrepancy");
    r.dual_route_discrepancies.push_back(d.is_null() ? std::nullopt : std::optional<double>(d.get<double>()));
    r.failures.push_back(row.contains("failure") ? std::optional<std::string>(row.at("failure").get<std::string>())
                                                 : std::nullopt);
  }
  const json& m = j.at("dual_route_max_discrepancy");
  if (!m.is_null()) r.dual_route_max_discrepancy = m.get<double>();
  return r;
}

inline void write_plot_data(const ConvergenceReport& r, PlotFormat format, std::ostream& out,
                            const PlotMetadata& meta = {}) {
  if (format == PlotFormat::json) {
    out << report_to_json(r, meta).dump(2) << "\n";
    return;
  }
  out << "n,sup_error,max_coeff_magnitude,bits,dual_route_discrepancy\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    out << r.n_values[i] << ',' << cli_detail::csv_number(r.sup_errors[i]) << ','
        << cli_detail::csv_number(r.coefficient_max_magnitudes[i]) << ',' << r.precision_bits_used[i] << ',';
    if (r.dual_route_discrepancies[i]) out << cli_detail::csv_number(*r.dual_route_discrepancies[i]);
    out << '\n';
  }
}

/// Writes to `path`, or to `fallback` when the path is empty. IO failures raise Io.
inline void emit_plot_data(const ConvergenceReport& r, PlotFormat format, const std::string& path,
                           std::ostream& fallback, const PlotMetadata& meta = {}) {
  if (path.empty()) {
    write_plot_data(r, format, fallback, meta);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write_plot_data(r, format, f, meta);
  f.flush();
  if (!f) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

namespace cli_detail {

inline std::vector<Rational> parse_list(const std::string& text, const std::string& what) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_rational(item));
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorKind::InvalidConfig, what + ": " + e.what());
    }
  }
  if (out.empty()) throw Error(ErrorKind::InvalidConfig, what + " is empty");
  return out;
}

/// "4,8,12" or "start:step:stop".
inline std::vector<std::size_t> parse_orders(const std::string& text) {
  auto positive = [](const Rational& q) {
    if (denominator(q) != 1 || q < 1) throw Error(ErrorKind::InvalidConfig, "orders must be positive integers");
    return numerator(q).convert_to<std::size_t>();
  };
  std::vector<std::size_t> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::size_t> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(positive(parse_list(item, "--n").at(0)));
    if (parts.size() != 3) throw Error(ErrorKind::InvalidConfig, "order range is start:step:stop");
    for (std::size_t n = parts[0]; n <= parts[2]; n += parts[1]) out.push_back(n);
    return out;
  }
  for (const auto& q : parse_list(text, "--n")) out.push_back(positive(q));
  return out;
}

inline json exact_json(const Rational& q) {
  if (denominator(q) == 1 && boost::multiprecision::abs(numerator(q)) < Integer("9007199254740992"))
    return numerator(q).convert_to<long long>();
  return to_string(q);
}

inline std::string complex_text(const Complex<Real>& z, int digits = 20) {
  std::string re = to_string(z.re, digits);
  std::string im = to_string(boost::multiprecision::abs(z.im), digits);
  return re + (z.im < 0 ? "-" : "+") + im + "i";
}

inline json complex_json(const Complex<Real>& z, int digits = 30) {
  return {{"text", complex_text(z, 20)}, {"re", to_string(z.re, digits)}, {"im", to_string(z.im, digits)}};
}

inline void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

inline void write_json(const json& j, const std::string& path, std::ostream& out) {
  write_text(j.dump(2) + "\n", path, out);
}

/// {"coeffs": [...]} with entries as numbers, numeric strings or [re, im].
inline GrowthFunction<Real> taylor_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("taylor input is not valid JSON: ") + e.what());
  }
  if (!j.contains("coeffs") || !j.at("coeffs").is_array() || j.at("coeffs").empty())
    throw Error(ErrorKind::InvalidConfig, "taylor input needs a nonempty 'coeffs' list");
  std::vector<Complex<Real>> coeffs;
  for (const auto& v : j.at("coeffs")) coeffs.push_back(to_real(config_detail::complex_rational(v, "coeffs")));
  return polynomial_function<Real>(std::move(coeffs), "input");
}

struct Common {
  std::string config_path;
  std::string out_path;
  std::optional<unsigned> bits;
};

inline ProblemConfig load_checked(const Common& c) {
  if (c.config_path.empty()) throw Error(ErrorKind::InvalidConfig, "--config is required");
  ProblemConfig cfg = load_config(c.config_path);
  cfg.precision = cfg.precision.with_env_override();
  if (c.bits) {
    cfg.precision.bits = *c.bits;
    cfg.precision.max_bits = std::max(cfg.precision.max_bits, *c.bits);
  }
  cfg.validate();
  return cfg;
}

inline std::vector<Real> point_for(const ProblemConfig& cfg, const std::string& x_text) {
  const auto q = parse_list(x_text, "--x");
  if (q.size() != cfg.problem.G.size())
    throw Error(ErrorKind::InvalidConfig, "--x has " + std::to_string(q.size()) + " coordinates, G has " +
                                              std::to_string(cfg.problem.G.size()));
  return to_real_point(q);
}

}  // namespace cli_detail

/// Runs the CLI on `args` (args[0] is the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"superosc: superoscillation and supershift sequences in arbitrary precision"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* s, bool needs_config) {
    auto* opt = s->add_option("--config", common.config_path, "problem config (JSON)");
    if (needs_config) opt->required();
    s->add_option("--out", common.out_path, "output path (default stdout)");
    s->add_option("--bits", common.bits, "working precision in bits");
  };

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "interpolation coefficients Z_j(n, a) and residuals");
  add_common(coeffs, false);
  std::string scheme = "equispaced", a_text, points_text;
  std::optional<std::size_t> n_opt;
  coeffs->add_option("--scheme", scheme, "equispaced | chebyshev | custom");
  coeffs->add_option("--n", n_opt, "order n (n + 1 nodes)");
  coeffs->add_option("--a", a_text, "target a (decimal or p/q)");
  coeffs->add_option("--points", points_text, "custom nodes, comma separated");
  std::string coeffs_format = "json";
  coeffs->add_option("--format", coeffs_format, "json | csv");

  // certify
  auto* certify = app.add_subcommand("certify", "growth certificate and sampled B-norm");
  add_common(certify, false);
  std::string lambda_text, b_text, input_path;
  std::size_t horizon = 32;
  certify->add_option("--lambda", lambda_text, "certify the wave e^{i lambda xi}");
  certify->add_option("--n", n_opt, "order of the config sequence");
  certify->add_option("--input", input_path, "Taylor coefficients: {\"coeffs\": [...]}");
  certify->add_option("--B", b_text, "norm parameter B");
  certify->add_option("--horizon", horizon, "certificate horizon J");

  // eval
  auto* eval = app.add_subcommand("eval", "F_n(x) and its limit by direct summation");
  add_common(eval, true);
  std::string x_text;
  eval->add_option("--x", x_text, "point, comma separated")->required();
  eval->add_option("--n", n_opt, "order n (default nodes.n)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "sup-error table over the grid for each n");
  add_common(sweep_cmd, true);
  std::string format = "csv", n_list_text;
  bool dual = false;
  sweep_cmd->add_option("--format", format, "csv | json");
  sweep_cmd->add_option("--n-list,--n", n_list_text, "orders as 4,8,12 or 4:4:24 (default from config)");
  std::string grid_choice = "config";
  sweep_cmd->add_option("--grid", grid_choice, "config | default");
  sweep_cmd->add_flag("--dual-route", dual, "also record the operator-route discrepancy");

  // operator
  auto* op_cmd = app.add_subcommand("operator", "F_n(x) through the infinite-order operator");
  add_common(op_cmd, true);
  std::string kind_text, n_sym = "auto", report = "json";
  op_cmd->add_option("--kind", kind_text, "U | V (default from mode)");
  op_cmd->add_option("--x", x_text, "point, comma separated")->required();
  op_cmd->add_option("--N", n_sym, "symbol truncation order or 'auto'");
  op_cmd->add_option("--n", n_opt, "order n (default nodes.n)");
  op_cmd->add_option("--report", report, "json");

  // check
  auto* check = app.add_subcommand("check", "direct vs operator route over the grid");
  add_common(check, true);
  unsigned check_bits = 256;
  check->add_option("--n", n_opt, "order n (default nodes.n)");
  check->add_option("--check-bits", check_bits, "precision for the comparison");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << json{{"error", "InvalidConfig"}, {"exit_code", 2}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (coeffs->parsed()) {
      NodeSet ns;
      Rational a;
      unsigned bits = common.bits.value_or(128);
      if (!common.config_path.empty()) {
        const ProblemConfig cfg = load_checked(common);
        const std::size_t n = n_opt.value_or(cfg.problem.n);
        bits = cfg.precision.for_order(n).bits;
        ns = cfg.problem.nodes(n, bits);
        a = cfg.problem.a;
      } else {
        if (a_text.empty()) throw Error(ErrorKind::InvalidConfig, "--a is required without --config");
        a = parse_list(a_text, "--a").at(0);
        const NodeScheme s = parse_node_scheme(scheme);
        if (s == NodeScheme::custom) {
          ns = NodeSet::custom(parse_list(points_text, "--points"), bits);
        } else {
          if (!n_opt) throw Error(ErrorKind::InvalidConfig, "--n is required");
          bits = std::max(bits, PrecisionPolicy::default_bits(*n_opt));
          ns = NodeSet::generate(s, *n_opt, bits);
        }
      }
      if (coeffs_format != "json" && coeffs_format != "csv")
        throw Error(ErrorKind::InvalidConfig, "--format is json or csv");
      json j;
      if (ns.is_exact()) {
        const auto c = solve_coefficients<Rational>(ns, a);
        json z = json::array(), h = json::array(), r = json::array();
        for (const auto& v : c.values) z.push_back(exact_json(v));
        for (const auto& v : c.points) h.push_back(exact_json(v));
        for (const auto& v : verify_interpolation(c, c.order())) r.push_back(exact_json(v));
        j = {{"n", c.order()}, {"a", to_string(a)}, {"exact", true}, {"nodes", h}, {"Z", z}, {"residuals", r}};
      } else {
        PrecisionScope scope(bits);
        const auto c = solve_coefficients<Real>(ns, a);
        json z = json::array(), h = json::array(), r = json::array();
        for (const auto& v : c.values) z.push_back(to_string(v, 30));
        for (const auto& v : c.points) h.push_back(to_string(v, 30));
        for (const auto& v : verify_interpolation(c, c.order())) r.push_back(to_string(v, 6));
        j = {{"n", c.order()}, {"a", to_string(a)}, {"exact", false}, {"bits", bits},
             {"nodes", h}, {"Z", z}, {"residuals", r}};
      }
      if (coeffs_format == "csv") {
        std::ostringstream csv;
        csv << "j,h_j,Z_j,residual\n";
        auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        for (std::size_t k = 0; k < j["Z"].size(); ++k)
          csv << k << ',' << text(j["nodes"][k]) << ',' << text(j["Z"][k]) << ',' << text(j["residuals"][k]) << '\n';
        write_text(csv.str(), common.out_path, out);
        return 0;
      }
      write_json(j, common.out_path, out);
      return 0;
    }

    if (certify->parsed()) {
      const unsigned bits = common.bits.value_or(128);
      PrecisionScope scope(bits);
      GrowthFunction<Real> f;
      Certificate declared;
      const bool fit_declared = !input_path.empty();
      if (!lambda_text.empty()) {
        f = exponential_wave(Real(parse_list(lambda_text, "--lambda").at(0)));
      } else if (fit_declared) {
        f = taylor_input(input_path);
      } else {
        const ProblemConfig cfg = load_checked(common);
        const std::size_t n = n_opt.value_or(cfg.problem.n);
        f = sequence_function(cfg.problem.instantiate(n, bits).coeffs);
      }
      CertificateOptions copt;
      copt.horizon = horizon;
      const Certificate fitted = certificate_fit(f.taylor, copt);
      // Raw coefficient input carries no certificate of its own; use the fitted one.
      if (fit_declared) f.certificate = fitted;
      declared = f.certificate;
      json j = {{"label", f.label},
                {"certificate", {{"C", to_string(declared.C, 20)}, {"b", to_string(declared.b, 20)}}},
                {"fitted", {{"C", to_string(fitted.C, 20)}, {"b", to_string(fitted.b, 20)}}}};
      j["C"] = to_string(declared.C, 20);
      j["b"] = to_string(declared.b, 20);
      if (!b_text.empty()) {
        const NormEstimate e = bnorm_estimate(f, Real(parse_list(b_text, "--B").at(0)));
        j["bnorm_lower"] = to_string(e.lower, 20);
        j["bnorm_upper"] = to_string(e.upper, 20);
        j["norm"] = {{"B", b_text},
                     {"lower", to_string(e.lower, 20)},
                     {"upper", to_string(e.upper, 20)},
                     {"rho_cap", to_string(e.rho_cap, 8)},
                     {"samples", e.samples}};
      }
      write_json(j, common.out_path, out);
      return 0;
    }

    if (eval->parsed()) {
      const ProblemConfig cfg = load_checked(common);
      const std::size_t n = n_opt.value_or(cfg.problem.n);
      const unsigned bits = cfg.precision.for_order(n).bits;
      PrecisionScope scope(bits);
      const auto x = point_for(cfg, x_text);
      const MultivarProblem prob = cfg.problem.instantiate(n, bits);
      const DirectEvaluator ev(prob);
      const Evaluation f = ev.eval(x);
      const Evaluation t = ev.target(x);
      json j = {{"n", n},
                {"bits", bits},
                {"mode", std::string(name(cfg.problem.mode))},
                {"value", complex_text(f.value)},
                {"F_n", complex_json(f.value)},
                {"error_bound", to_string(f.error_bound, 6)},
                {"target", complex_json(t.value)},
                {"abs_error", to_string(abs(f.value - t.value), 12)}};
      write_json(j, common.out_path, out);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      ProblemConfig cfg = load_checked(common);
      const PlotFormat fmt = parse_plot_format(format);
      if (!n_list_text.empty()) {
        cfg.n_list = parse_orders(n_list_text);
        cfg.validate();
      }
      if (grid_choice == "default")
        cfg.grid.reset();
      else if (grid_choice != "config")
        throw Error(ErrorKind::InvalidConfig, "--grid is 'config' or 'default'");
      SweepOptions so;
      so.dual_route = dual;
      so.op = cfg.operator_options();
      const ConvergenceReport rep = sweep(cfg.problem, cfg.n_list, cfg.effective_grid(), cfg.precision, so);
      emit_plot_data(rep, fmt, common.out_path, out, PlotMetadata{config_hash(cfg)});
      for (std::size_t i = 0; i < rep.size(); ++i)
        if (rep.failures[i])
          err << json{{"warning", "sweep_point_failed"}, {"n", rep.n_values[i]}, {"message", *rep.failures[i]}}.dump()
              << "\n";
      return 0;
    }

    if (op_cmd->parsed()) {
      const ProblemConfig cfg = load_checked(common);
      if (report != "json") throw Error(ErrorKind::InvalidConfig, "--report supports json only");
      const OperatorKind expected = operator_kind_for(cfg.problem.mode);
      if (!kind_text.empty() && parse_operator_kind(kind_text) != expected)
        throw Error(ErrorKind::InvalidConfig, std::string("operator ") + kind_text + " does not match mode " +
                                                  std::string(name(cfg.problem.mode)));
      const std::size_t n = n_opt.value_or(cfg.problem.n);
      const unsigned bits = cfg.precision.for_order(n).bits;
      PrecisionScope scope(bits);
      const auto x = point_for(cfg, x_text);
      const MultivarProblem prob = cfg.problem.instantiate(n, bits);
      OperatorOptions oo = cfg.operator_options();
      if (n_sym != "auto") {
        const auto q = parse_list(n_sym, "--N").at(0);
        if (denominator(q) != 1 || q < 1) throw Error(ErrorKind::InvalidConfig, "--N must be a positive integer or auto");
        oo.n_start = oo.n_max = numerator(q).convert_to<std::size_t>();
        oo.adaptive = false;
      }
      const OperatorResult r = operator_route_Fn(prob, x, oo);
      const Evaluation f = DirectEvaluator(prob).eval(x);
      json j = {{"kind", std::string(name(expected))},
                {"n", n},
                {"bits", bits},
                {"N", r.order},
                {"value", complex_json(r.value)},
                {"tail_bound", to_string(r.tail_bound, 6)},
                {"dual_route_discrepancy", to_string(abs(r.value - f.value), 6)}};
      write_json(j, common.out_path, out);
      return 0;
    }

    if (check->parsed()) {
      const ProblemConfig cfg = load_checked(common);
      const std::size_t n = n_opt.value_or(cfg.problem.n);
      const unsigned bits = std::max(check_bits, cfg.precision.for_order(n).bits);
      const DualRouteReport r = dual_route_check(cfg.problem, n, cfg.effective_grid(), bits, cfg.operator_options());
      json j = {{"n", n},
                {"bits", r.bits},
                {"points", r.points},
                {"discrepancy", r.max_discrepancy},
                {"tail_bound", r.max_bound},
                {"limit_discrepancy", r.max_limit_discrepancy},
                {"max_symbol_order", r.max_symbol_order},
                {"within_bounds", r.within_bounds()}};
      write_json(j, common.out_path, out);
      if (!r.within_bounds()) {
        err << json{{"error", "TailNotBounded"}, {"exit_code", 3},
                    {"message", "route discrepancy exceeds the reported bounds"}}.dump()
            << "\n";
        return 3;
      }
      return 0;
    }
  } catch (const Error& e) {
    err << json{{"error", std::string(name(e.kind()))}, {"exit_code", exit_code(e.kind())}, {"message", e.what()}}.dump()
        << "\n";
    return exit_code(e.kind());
  }
  return 2;
}

}  // namespace superosc
