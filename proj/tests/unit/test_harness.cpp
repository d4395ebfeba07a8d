#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "clockdil/harness/config.hpp"
#include "clockdil/harness/experiments.hpp"
#include "clockdil/harness/expression.hpp"
#include "clockdil/harness/report.hpp"
#include "doctest.h"

using namespace clockdil;
using namespace clockdil::harness;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("expressions") {
  const Expression p = Expression::parse("0.5*s^3 - 2*(s - 1) + 3", "s");
  CHECK(p(2.0) == doctest::Approx(4.0 - 2.0 + 3.0));
  REQUIRE(p.polynomial());
  const auto c = *p.polynomial();
  REQUIRE(c.size() == 4);
  CHECK(c[0] == doctest::Approx(5.0));
  CHECK(c[1] == doctest::Approx(-2.0));
  CHECK(c[2] == doctest::Approx(0.0));
  CHECK(c[3] == doctest::Approx(0.5));
  CHECK(p.integral(1.0) == doctest::Approx(0.125 - 1.0 + 5.0));

  const Expression t = Expression::parse("sin(pi*t)/2 + exp(-t)");
  CHECK_FALSE(t.polynomial());
  CHECK(t(0.5) == doctest::Approx(0.5 + std::exp(-0.5)));
  CHECK(t.integral(1.0) == doctest::Approx(1.0 / std::numbers::pi + 1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(t.time_function()(0.25).real() == doctest::Approx(t(0.25)));

  CHECK(Expression::parse("-(x)^2", "x")(3.0) == doctest::Approx(-9.0));
  CHECK(Expression::parse("2^3^2", "x")(0.0) == doctest::Approx(512.0));
  CHECK(Expression::parse("(1 + x)/2", "x").polynomial().has_value());
  CHECK_FALSE(Expression::parse("1/x", "x").polynomial());

  for (const char* bad : {"", "1 +", "s*", "(s", "foo(s)", "t", "2 $ 3"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Expression::parse(bad, "s"), Error);
  }
}

TEST_CASE("config parsing and field paths") {
  const ExperimentConfig c = parse(
      "[experiment]\ntype = omega-sweep\nname = demo\n"
      "[numerics]\nN_s = 48\nomega = 0.1, 0.05, 0.02\nmethod = krylov\nclock_state = mixed\n"
      "[physics]\na = 2\ng = s^2\nT = 0.6\n"
      "[assert]\nslope_min = 1.8\n");
  CHECK(c.kind == ExperimentKind::OmegaSweep);
  CHECK(c.name == "demo");
  CHECK(c.numerics.n_s == 48);
  CHECK(c.numerics.omegas == std::vector<double>{0.1, 0.05, 0.02});
  CHECK(c.numerics.method == EvolveMethod::Krylov);
  CHECK(c.numerics.clock_state == ClockKind::MixedDiagonal);
  CHECK(c.physics.a == 2.0);
  CHECK(c.physics.t_final == doctest::Approx(0.6));
  CHECK(*c.checks.slope_min == 1.8);
  CHECK(c.physics.time_points == 21);

  CHECK(contains(config_error("[numerics]\nN_s = 8\n"), "experiment.type"));
  CHECK(contains(config_error("[experiment]\ntype = nope\n"), "experiment.type"));
  CHECK(contains(config_error("[experiment]\ntype = consistency\n[numerics]\nN_s = lots\n"), "numerics.N_s"));
  CHECK(contains(config_error("[experiment]\ntype = consistency\n[numerics]\nomgea = 0.1\n"), "numerics.omgea"));
  CHECK(contains(config_error("[experiment]\ntype = consistency\n[extra]\nx = 1\n"), "extra"));
  CHECK(contains(config_error("[experiment]\ntype = consistency\n[physics]\ng = s +\n"), "physics.g"));
  CHECK(contains(config_error("[experiment]\ntype = omega-sweep\n[numerics]\nomega = 0.1, 0.2\n"), "numerics.omega"));
  CHECK(contains(config_error("[experiment]\ntype = consistency\n[numerics]\nscale_s = -1\n"), "numerics.scale_s"));
  CHECK(contains(config_error("[experiment]\ntype = complexity\n"), "numerics.clock"));
  CHECK(contains(config_error("[experiment]\ntype = consistency\n[assert]\nslope_min = 2\n"), "assert.slope_min"));
  CHECK(contains(config_error("[experiment]\ntype = pde\n[pde]\nterm1 = 1; 1; t\n"), "pde.term1"));
}

TEST_CASE("overrides") {
  ExperimentConfig c = parse("[experiment]\ntype = fokker-planck\nname = fp\n[physics]\ncase = 2\n");
  apply_overrides(c, {.omegas = std::vector<double>{0.05}, .out_dir = "/tmp/o", .full = true});
  CHECK(c.numerics.n_s == 128);
  CHECK(c.numerics.n_eta == 128);
  CHECK(c.numerics.n_u == 64);
  CHECK(c.numerics.method == EvolveMethod::Krylov);
  CHECK(c.numerics.omegas == std::vector<double>{0.05});
  CHECK(c.output.csv == std::filesystem::path("/tmp/o/fp.csv"));
  CHECK(c.output.json == std::filesystem::path("/tmp/o/fp.json"));
  CHECK(qubit_count({128, 128, 64}) == 20);

  CHECK_THROWS_AS(parse_method("fast", "--method"), Error);
  CHECK_THROWS_AS(parse_number_list("0.1,,x", "--omega"), Error);
}

TEST_CASE("error-law fit") {
  const std::vector<double> w{0.2, 0.1, 0.05, 0.02, 0.01};
  std::vector<double> loss;
  for (double x : w) loss.push_back(0.0434 * x * x);
  const ErrorLawFit f = fit_error_law(w, loss, 0.0434);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f.prefactor == doctest::Approx(0.0434));
  CHECK(f.prefactor_ratio == doctest::Approx(1.0));
  CHECK(f.points == 5);
  CHECK(f.intercept == doctest::Approx(std::log(0.0434)));

  CHECK_THROWS_AS(fit_error_law({0.1, 0.2}, {1e-3, 4e-3}), Error);
  CHECK_THROWS_AS(fit_error_law({0.1, 0.2, 0.4}, {0.0, 1e-14, 4e-3}), Error);
}

TEST_CASE("csv output") {
  std::ostringstream out;
  ReportRow r;
  r.t = 0.5;
  r.omega = 0.1;
  r.observable = "Z";
  r.value = -0.25;
  r.exact = std::nan("");
  write_csv(out, {r});
  std::istringstream lines(out.str());
  std::string header, line;
  std::getline(lines, header);
  std::getline(lines, line);
  CHECK(header == "t,omega,observable,value,exact,abs_err,fidelity,pred_one_minus_fid,succ_prob,wall_ms");
  CHECK(header == kCsvHeader);
  CHECK(line == "0.5,0.1,Z,-0.25,nan,0,0,0,1,0");
}

TEST_CASE("two-level sweep is deterministic and follows the prediction") {
  const ExperimentConfig c = parse(
      "[experiment]\ntype = omega-sweep\nname = small\n"
      "[numerics]\nN_s = 32\nscale_s = 0.2\nomega = 0.2, 0.1, 0.05\n"
      "[physics]\ng = s\nT = 0.5\n"
      "[assert]\nslope_min = 1.8\nslope_max = 2.2\nprefactor_tol = 0.25\n");
  const ExperimentReport a = run_experiment(c);
  const ExperimentReport b = run_experiment(c);
  std::ostringstream sa, sb;
  write_csv(sa, a.rows);
  write_csv(sb, b.rows);
  CHECK(sa.str() == sb.str());
  CHECK(a.passed());
  CHECK(a.summary["C"].get<double>() == doctest::Approx(0.0434028).epsilon(1e-5));
  for (const auto& r : a.rows) CHECK(1.0 - r.fidelity == doctest::Approx(r.pred_one_minus_fid).epsilon(0.05));
  const auto j = summary_json(a);
  CHECK(j.contains("fit"));
  CHECK(j["fit"].contains("slope"));
  CHECK(j["fit"].contains("intercept"));
}

TEST_CASE("shared builders") {
  const Matrix h = two_level_h();
  CHECK((h - h.adjoint()).norm() < 1e-15);
  CHECK(plus_state().norm() == doctest::Approx(1.0));
  const auto ts = uniform_times(1.0, 5);
  CHECK(ts.front() == 0.0);
  CHECK(ts.back() == 1.0);
  CHECK(ts.size() == 5);
  CHECK(fp_preset(3).g == "0.5*s^3");
  CHECK_THROWS_AS(fp_preset(4), Error);

  const auto squares = parallel_map<int>(7, 3, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < 7; ++i) CHECK(squares[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map<int>(4, 2,
                                    [](std::size_t i) -> int {
                                      if (i == 2) throw Error(ErrorKind::InvalidArgument, "boom");
                                      return 0;
                                    }),
                  Error);
}
