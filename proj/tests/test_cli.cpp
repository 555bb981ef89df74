#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "superosc/cli.hpp"
#include "support.hpp"

using namespace superosc;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "superosc");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config_path(const std::string& name) { return std::string(SUPEROSC_CONFIG_DIR) + "/" + name; }

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("superosc_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

PowerSeries random_series(std::mt19937& rng) {
  switch (rng() % 7) {
    case 0: return PowerSeries::identity();
    case 1: return PowerSeries::monomial(1 + rng() % 5);
    case 2: return PowerSeries::exp(Complex<Rational>(testing_support::random_rational(rng, 3, 2), testing_support::random_rational(rng, 3, 2)));
    case 3: return PowerSeries::sin();
    case 4: return PowerSeries::cos();
    case 5: return PowerSeries::geometric(Rational(2 + rng() % 5, 1 + rng() % 2));
    default: {
      std::vector<Complex<Rational>> c;
      for (std::size_t k = 0; k < 1 + rng() % 6; ++k)
        c.emplace_back(testing_support::random_rational(rng, 9, 7), testing_support::random_rational(rng, 2, 3));
      return PowerSeries::custom(c, Radius::infinite());
    }
  }
}

ProblemConfig random_config(std::mt19937& rng) {
  ProblemConfig c;
  ProblemSpec& p = c.problem;
  p.scheme = static_cast<NodeScheme>(rng() % 3);
  p.n = 1 + rng() % 20;
  if (p.scheme == NodeScheme::custom) {
    p.custom_points = testing_support::random_nodes(rng, 2 + rng() % 5);
    p.n = p.custom_points.size() - 1;
  }
  p.a = testing_support::random_rational(rng, 7, 4);
  for (std::size_t l = 0; l < 1 + rng() % 3; ++l) p.G.push_back(random_series(rng));
  p.mode = rng() % 2 ? Mode::supershift : Mode::superoscillation;
  if (rng() % 2) p.B = Rational(1 + rng() % 9, 10);
  if (rng() % 2) c.grid = symmetric_grid(p.G.size(), Rational(1 + rng() % 4, 4), 2 + rng() % 8);
  c.n_list.clear();
  for (std::size_t n = 1 + rng() % 3; n < 30; n += 1 + rng() % 6) c.n_list.push_back(n);
  c.precision.bits = 64 * (1 + rng() % 6);
  c.precision.escalation_factor = 2 + rng() % 2;
  c.precision.agreement_tol = std::ldexp(1.0 + (rng() % 100) / 7.0, -(int)(20 + rng() % 80));
  c.tail_tol = std::ldexp(1.0, -(int)(60 + rng() % 100));
  return c;
}

}  // namespace

TEST(Cli, CoeffsExample) {
  const auto r = run_cli({"coeffs", "--n", "2", "--a", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("Z"), json::array({3, -3, 1}));
  EXPECT_EQ(j.at("nodes"), json::array({1, 0, -1}));
  EXPECT_EQ(j.at("residuals"), json::array({0, 0, 0}));
  const auto csv = run_cli({"coeffs", "--n", "2", "--a", "2", "--format", "csv"});
  EXPECT_EQ(csv.out, "j,h_j,Z_j,residual\n0,1,3,0\n1,0,-3,0\n2,-1,1,0\n");
}

TEST(Cli, EvalAtOrigin) {
  const auto r = run_cli({"eval", "--config", config_path("so_identity.json"), "--x", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out).at("value"), "1+0i");
}

TEST(Cli, CheckPasses) {
  const auto r = run_cli({"check", "--config", config_path("so_identity.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out).at("within_bounds").get<bool>());
}

TEST(Cli, OperatorReport) {
  const auto r = run_cli({"operator", "--config", config_path("ss_geometric.json"), "--x", "1/2", "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("kind"), "V");
  EXPECT_LT(std::stod(j.at("dual_route_discrepancy").get<std::string>()), 1e-20);
  const auto fixed = run_cli({"operator", "--config", config_path("so_identity.json"), "--x", "1/2", "--N", "4"});
  ASSERT_EQ(fixed.code, 0) << fixed.err;
  EXPECT_EQ(json::parse(fixed.out).at("N"), 4);
}

TEST(Cli, CertifyWave) {
  const auto r = run_cli({"certify", "--lambda", "2", "--B", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(std::stod(j.at("fitted").at("b").get<std::string>()), 2.0, 1e-9);
  EXPECT_NEAR(std::stod(j.at("bnorm_lower").get<std::string>()), 1.0, 1e-9);
  const std::string input = write_file("taylor.json", R"({"coeffs": ["1", "1", "1/2", "1/6", "1/24", "1/120", "1/720", "1/5040", "1/40320", "1/362880"]})");
  const auto p = run_cli({"certify", "--input", input});
  ASSERT_EQ(p.code, 0) << p.err;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({"eval", "--config", "/nonexistent/x.json", "--x", "0"}).code, 5);
  EXPECT_EQ(run_cli({"eval", "--config", write_file("bad.json", "{not json"), "--x", "0"}).code, 2);
  const auto outside = run_cli({"eval", "--config", write_file("a_large.json", R"({"a": "5/2", "G": [{"builtin": "geometric", "params": {"pole": "2"}}]})"), "--x", "0"});
  EXPECT_EQ(outside.code, 2);
  const json diag = json::parse(outside.err.substr(0, outside.err.find('\n')));
  EXPECT_EQ(diag.at("error"), "InvalidConfig");
  EXPECT_EQ(diag.at("exit_code"), 2);
  EXPECT_NE(diag.at("message").get<std::string>().find("|a| < R"), std::string::npos);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"eval", "--config", config_path("so_identity.json"), "--x", "1,2"}).code, 2);
  const std::string boundary = write_file("boundary.json", R"({"a": "1/2", "nodes": {"n": 4}, "G": [{"builtin": "geometric", "params": {"pole": "1"}}]})");
  EXPECT_EQ(run_cli({"eval", "--config", boundary, "--x", "0"}).code, 4);
  EXPECT_EQ(run_cli({"sweep", "--config", config_path("so_identity.json"), "--out", "/nonexistent/dir/out.csv"}).code, 5);
  EXPECT_EQ(exit_code(ErrorKind::TailNotBounded), 3);
  EXPECT_EQ(exit_code(ErrorKind::NoConvergenceAtMaxBits), 3);
  EXPECT_EQ(exit_code(ErrorKind::NotExponentialType), 3);
  EXPECT_EQ(exit_code(ErrorKind::NormNotCertifiable), 4);
  EXPECT_EQ(exit_code(ErrorKind::DegenerateNodes), 2);
  EXPECT_EQ(exit_code(ErrorKind::OutOfRange), 2);
}

TEST(Cli, PrecisionPrecedence) {
  const std::string cfg = config_path("so_identity.json");
  ::setenv("SUPEROSC_BITS", "512", 1);
  const auto env = run_cli({"eval", "--config", cfg, "--x", "1/3"});
  const auto flag = run_cli({"eval", "--config", cfg, "--x", "1/3", "--bits", "200"});
  ::unsetenv("SUPEROSC_BITS");
  const auto plain = run_cli({"eval", "--config", cfg, "--x", "1/3"});
  ASSERT_EQ(env.code, 0) << env.err;
  EXPECT_EQ(json::parse(env.out).at("bits"), 512);
  EXPECT_EQ(json::parse(flag.out).at("bits"), 200);
  EXPECT_EQ(json::parse(plain.out).at("bits"), 128);
}

TEST(Cli, SweepWritesFile) {
  const std::string out = (scratch_dir() / "sweep.json").string();
  const auto r = run_cli({"sweep", "--config", config_path("so_identity.json"), "--n-list", "2:2:6", "--format", "json",
                          "--out", out, "--dual-route"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out);
  const json j = json::parse(in);
  const ConvergenceReport rep = report_from_json(j);
  EXPECT_EQ(rep.n_values, (std::vector<std::size_t>{2, 4, 6}));
  EXPECT_TRUE(rep.dual_route_max_discrepancy.has_value());
  EXPECT_EQ(j.at("config_hash").get<std::string>().size(), 16u);
}

TEST(Config, RoundTripProperty) {
  std::mt19937 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const ProblemConfig c = random_config(rng);
    const std::string text = serialize(c);
    const ProblemConfig back = parse_config_text(text);
    EXPECT_EQ(serialize(back), text);
    EXPECT_EQ(config_hash(back), config_hash(c));
  }
}

TEST(Config, AcceptsLooseNumbers) {
  const auto c = parse_config_text(R"({"a": 1.5, "G": [{"builtin": "exp", "params": {"scale": [0, 1]}}],
                                       "nodes": {"scheme": "chebyshev", "n": "6"}, "truncation": {"tail_tol": "1e-20"}})");
  EXPECT_EQ(c.problem.a, Rational(3, 2));
  EXPECT_EQ(c.problem.G[0].scale(), Complex<Rational>(Rational(0), Rational(1)));
  EXPECT_EQ(c.problem.n, 6u);
  EXPECT_EQ(c.tail_tol, 1e-20);
}

TEST(Config, Rejections) {
  auto kind = [](const std::string& text) {
    try {
      parse_config_text(text).validate();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind(R"({"G": [{"builtin": "sin"}]})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind(R"({"a": 2, "G": [{"builtin": "tan"}]})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind(R"({"a": 2, "G": [{"coeffs": [1, 2]}]})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind(R"({"a": 2, "G": [{"builtin": "sin"}], "n_list": [4, 4]})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind(R"({"a": 2, "G": [{"builtin": "sin"}], "nodes": {"scheme": "custom", "custom_points": [0, 0]}})"),
            ErrorKind::DegenerateNodes);
  EXPECT_EQ(kind(R"({"a": 2, "G": [{"builtin": "sin"}], "nodes": {"scheme": "custom", "custom_points": [0, 2]}})"),
            ErrorKind::OutOfRange);
  EXPECT_EQ(kind(R"({"a": 2, "G": [{"builtin": "sin"}], "grid": {"box": [[-1, 1], [-1, 1]]}})"), ErrorKind::InvalidConfig);
}

TEST(PlotData, EmptyReportIsHeaderOnly) {
  std::ostringstream os;
  write_plot_data(ConvergenceReport{}, PlotFormat::csv, os);
  EXPECT_EQ(os.str(), "n,sup_error,max_coeff_magnitude,bits,dual_route_discrepancy\n");
}

TEST(PlotData, RowsAndJsonRoundTrip) {
  ConvergenceReport r;
  r.n_values = {4, 8, 12};
  r.sup_errors = {0.5, 0.125, std::nan("")};
  r.coefficient_max_magnitudes = {3.0, 40.0, std::nan("")};
  r.precision_bits_used = {128, 128, 0};
  r.dual_route_discrepancies = {1e-40, std::nullopt, std::nullopt};
  r.failures = {std::nullopt, std::nullopt, std::string("TailNotBounded: cap")};
  r.dual_route_max_discrepancy = 1e-40;
  std::ostringstream os;
  write_plot_data(r, PlotFormat::csv, os);
  EXPECT_EQ(os.str(), "n,sup_error,max_coeff_magnitude,bits,dual_route_discrepancy\n"
                      "4,0.5,3,128,1e-40\n8,0.125,40,128,\n12,nan,nan,0,\n");
  const json j = report_to_json(r, PlotMetadata{"abc"});
  EXPECT_TRUE(j.at("rows")[2].at("sup_error").is_null());
  const ConvergenceReport back = report_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.n_values, r.n_values);
  EXPECT_EQ(back.sup_errors[1], 0.125);
  EXPECT_TRUE(std::isnan(back.sup_errors[2]));
  EXPECT_EQ(back.failures, r.failures);
  EXPECT_EQ(back.dual_route_discrepancies, r.dual_route_discrepancies);
  EXPECT_EQ(back.dual_route_max_discrepancy, r.dual_route_max_discrepancy);
  EXPECT_THROW(report_from_json(json{{"schema", "other"}}), Error);
}

TEST(PlotData, OrderParsing) {
  EXPECT_EQ(cli_detail::parse_orders("4:4:24"), (std::vector<std::size_t>{4, 8, 12, 16, 20, 24}));
  EXPECT_EQ(cli_detail::parse_orders("3,5,9"), (std::vector<std::size_t>{3, 5, 9}));
  EXPECT_THROW(cli_detail::parse_orders("0,2"), Error);
}

class ShippedConfig : public ::testing::TestWithParam<std::string> {};

TEST_P(ShippedConfig, ValidatesAndSweepsQuickly) {
  const std::string path = config_path(GetParam());
  ASSERT_NO_THROW(load_config(path).validate());
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_cli({"sweep", "--config", path});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.err.empty()) << r.err;
  EXPECT_LT(secs, 60.0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "n,sup_error,max_coeff_magnitude,bits,dual_route_discrepancy");
}

INSTANTIATE_TEST_SUITE_P(Configs, ShippedConfig,
                         ::testing::Values("so_identity.json", "so_square_identity.json", "so_square_sin.json",
                                           "so_exp_sin_square.json", "so_geometric.json",
                                           "so_geometric_identity.json", "ss_geometric.json", "ss_exp_sin.json",
                                           "ss_polynomial.json"),
                         [](const auto& info) {
                           std::string s = info.param.substr(0, info.param.find('.'));
                           return s;
                         });
