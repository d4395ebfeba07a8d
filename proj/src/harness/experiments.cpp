#include "clockdil/harness/experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "clockdil/complexity_estimator.hpp"
#include "clockdil/harness/expression.hpp"
#include "clockdil/krylov.hpp"
#include "clockdil/pde_frontend.hpp"
#include "clockdil/reference_oracles.hpp"
#include "clockdil/sparse.hpp"

namespace clockdil::harness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

ReportRow row(double t, double omega, std::string name, double value, double exact, double fid = kNaN,
              double pred = kNaN, double prob = 1.0) {
  ReportRow r;
  r.t = t;
  r.omega = omega;
  r.observable = std::move(name);
  r.value = value;
  r.exact = exact;
  r.abs_err = std::isnan(exact) ? kNaN : std::abs(value - exact);
  r.fidelity = fid;
  r.pred_one_minus_fid = pred;
  r.succ_prob = prob;
  return r;
}

// Row for a recovered state compared with a pure reference.
ReportRow state_row(double t, double omega, std::string name, double value, double exact, const Matrix& rho,
                    const Vector& psi, double pred = kNaN, double prob = 1.0) {
  const double fid = fidelity(rho, psi);
  ReportRow r = row(t, omega, std::move(name), value, exact, fid, pred, prob);
  const Vector u = psi.normalized();
  r.td_margin = trace_distance(rho, u * u.adjoint()) - std::sqrt(std::max(0.0, 1.0 - fid));
  return r;
}

void stamp(std::vector<ReportRow>& rows, std::size_t from, double ms, bool timing) {
  for (std::size_t i = from; i < rows.size(); ++i) rows[i].wall_ms = timing ? ms : 0.0;
}

std::vector<std::size_t> mode_dims(const PipelineConfig& p, std::size_t system) {
  std::vector<std::size_t> dims{system, clock_dimension(p.clock)};
  if (p.eta) dims.push_back(p.eta->size);
  return dims;
}

void record_sizes(ExperimentReport& rep, const PipelineConfig& p, std::size_t system) {
  const auto dims = mode_dims(p, system);
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  rep.summary["dimension"] = total;
  rep.summary["qubits"] = qubit_count(dims);
}

// Fidelity loss of the reduced clock-dilated state for H(t) = a g(t) h at time T.
ExperimentReport run_two_level(const ExperimentConfig& c) {
  ExperimentReport rep;
  const Expression g = Expression::parse(c.physics.g, "s");
  const double a = c.physics.a;
  const double t = c.physics.t_final;
  const Matrix h = two_level_h();
  const Vector y0 = plus_state();
  const TimeFunction lambda = TimeFunction(a) * g.time_function();
  const Generator gen = Generator::from_terms(2, {{lambda, to_sparse(h)}}, {});
  const Vector exact = commuting_exact(h, [&](double s) { return a * g(s); }, t) * y0;
  const MatrixProvider hp = [&](double s) { return Matrix(a * g(s) * h); };
  const ErrorConstants k = error_constants(hp, y0, t);
  const Matrix z = pauli_z();
  const double z_exact = exact.dot(z * exact).real();
  const auto& omegas = c.numerics.omegas;

  struct Point {
    std::vector<ReportRow> rows;
    double loss = 0.0;
  };
  const auto points = parallel_map<Point>(omegas.size(), c.numerics.workers, [&](std::size_t i) {
    const auto start = Clock::now();
    const PipelineConfig p = make_pipeline(c.numerics, t, omegas[i], false);
    const PipelineResult res = full_pipeline(gen, y0, {t}, p, {{"Z", z}});
    const auto& rec = res.records.front();
    Point pt;
    pt.rows.push_back(state_row(t, omegas[i], "Z", rec.values[0], z_exact, rec.state, exact,
                                k.c * res.clock_second_moment));
    pt.loss = 1.0 - pt.rows.back().fidelity;
    stamp(pt.rows, 0, ms_since(start), c.output.timing);
    return pt;
  });
  std::vector<double> ws, losses;
  for (std::size_t i = 0; i < points.size(); ++i) {
    rep.rows.insert(rep.rows.end(), points[i].rows.begin(), points[i].rows.end());
    if ((!c.checks.fit_omega_max || omegas[i] <= *c.checks.fit_omega_max) &&
        (!c.checks.fit_omega_min || omegas[i] >= *c.checks.fit_omega_min)) {
      ws.push_back(omegas[i]);
      losses.push_back(points[i].loss);
    }
  }
  rep.summary["C"] = k.c;
  rep.summary["C_R"] = k.c_r;
  rep.summary["exact_source"] = "closed form (commuting)";
  record_sizes(rep, make_pipeline(c.numerics, t, omegas.front(), false), 2);
  if (ws.size() >= 3) {
    try {
      const ErrorLawFit f = fit_error_law(ws, losses, k.c);
      rep.summary["fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"prefactor", f.prefactor},
                            {"prefactor_ratio", f.prefactor_ratio}, {"points", f.points}};
    } catch (const Error& e) {
      rep.summary["fit"] = {{"error", e.what()}};
    }
  }
  return rep;
}

ExperimentReport run_open_ode(const ExperimentConfig& c) {
  ExperimentReport rep;
  const OpenOdeModel model;
  const Expression g = Expression::parse(c.physics.g, "s");
  const double a = c.physics.a;
  const Generator gen = model.generator(a, g.time_function());
  const auto times = uniform_times(c.physics.t_final, c.physics.time_points);
  const Matrix z = pauli_z();
  const auto& omegas = c.numerics.omegas;
  const auto per_omega = parallel_map<std::vector<ReportRow>>(omegas.size(), c.numerics.workers, [&](std::size_t i) {
    const auto start = Clock::now();
    const PipelineConfig p = make_pipeline(c.numerics, c.physics.t_final, omegas[i], true);
    const PipelineResult res = full_pipeline(gen, model.u0, times, p, {{"Z", z}});
    std::vector<ReportRow> rows;
    for (const auto& rec : res.records) {
      const Vector u = model.exact(a, g.integral(rec.t)).normalized();
      rows.push_back(state_row(rec.t, omegas[i], "Z", rec.values[0], u.dot(z * u).real(), rec.state, u, kNaN,
                               rec.success_probability));
    }
    stamp(rows, 0, ms_since(start), c.output.timing);
    return rows;
  });
  for (const auto& r : per_omega) rep.rows.insert(rep.rows.end(), r.begin(), r.end());
  rep.summary["exact_source"] = "closed form (commuting)";
  record_sizes(rep, make_pipeline(c.numerics, c.physics.t_final, omegas.front(), true), 2);
  return rep;
}

Vector gaussian_amplitude(const HermiteBasis& basis, double mean, double variance) {
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
  const StateProjection p = project_state(
      [=](double x) { return cplx(norm * std::exp(-0.5 * (x - mean) * (x - mean) / variance)); }, basis);
  return p.coefficients.normalized();
}

ExperimentReport run_fokker_planck(const ExperimentConfig& c) {
  ExperimentReport rep;
  std::string gs = c.physics.g, bs = c.physics.beta;
  if (c.physics.fp_case > 0) {
    const FpPreset preset = fp_preset(c.physics.fp_case);
    gs = preset.g;
    bs = preset.beta;
  }
  const Expression g = Expression::parse(gs, "s");
  const Expression beta = Expression::parse(bs, "s");
  const HermiteBasis ub(c.numerics.n_u, c.numerics.scale_u);
  const Generator gen = fokker_planck_generator(g.time_function(), beta.time_function(), ub,
                                                uniform_times(c.physics.t_final, 11));
  const double mu0 = c.physics.initial_mean, var0 = c.physics.initial_variance;
  const Vector u0 = gaussian_amplitude(ub, mu0, var0);
  const Matrix x = position_matrix(ub);
  const Matrix x2 = position_power_matrix(ub, 2);
  const auto times = uniform_times(c.physics.t_final, c.physics.time_points);
  const auto& omegas = c.numerics.omegas;
  const auto per_omega = parallel_map<std::vector<ReportRow>>(omegas.size(), c.numerics.workers, [&](std::size_t i) {
    const auto start = Clock::now();
    const PipelineConfig p = make_pipeline(c.numerics, c.physics.t_final, omegas[i], true);
    const PipelineResult res = full_pipeline(gen, u0, times, p, {{"x", x}, {"x2", x2}});
    std::vector<ReportRow> rows;
    for (const auto& rec : res.records) {
      const OuMoments m = ou_moments([&](double s) { return g(s); }, [&](double s) { return beta(s); }, mu0,
                                     var0 + mu0 * mu0, rec.t);
      const GaussianObservables e = gaussian_observables(m.mean, m.variance);
      const Vector ref = gaussian_amplitude(ub, m.mean, m.variance);
      rows.push_back(state_row(rec.t, omegas[i], "x", rec.values[0], e.x, rec.state, ref, kNaN, rec.success_probability));
      rows.push_back(state_row(rec.t, omegas[i], "x2", rec.values[1], e.x2, rec.state, ref, kNaN, rec.success_probability));
    }
    stamp(rows, 0, ms_since(start), c.output.timing);
    return rows;
  });
  for (const auto& r : per_omega) rep.rows.insert(rep.rows.end(), r.begin(), r.end());
  rep.summary["exact_source"] = "closed form (OU moments)";
  rep.summary["g"] = gs;
  rep.summary["beta"] = bs;
  record_sizes(rep, make_pipeline(c.numerics, c.physics.t_final, omegas.front(), true), c.numerics.n_u);
  return rep;
}

ExperimentReport run_commuting(const ExperimentConfig& c) {
  ExperimentReport rep;
  const Expression g = Expression::parse(c.physics.g, "s");
  const double t = c.physics.t_final;
  const Matrix h = c.physics.a * two_level_h();
  const Vector psi0 = plus_state();
  const Vector exact = commuting_exact(h, [&](double s) { return g(s); }, t) * psi0;
  const Matrix z = pauli_z();
  const auto& omegas = c.numerics.omegas;
  const auto per_omega = parallel_map<std::vector<ReportRow>>(omegas.size(), c.numerics.workers, [&](std::size_t i) {
    const auto start = Clock::now();
    const ClockSpec clock = make_clock(c.numerics, t, omegas[i]);
    const ClockState state = make_clock_state(c.numerics.clock_state, c.numerics.profile, omegas[i]);
    const Matrix rho = commuting_protocol(h, [&](double s) { return g(s); }, psi0, t, clock, state,
                                          {.strict_resolution = c.numerics.strict_resolution});
    std::vector<ReportRow> rows{state_row(t, omegas[i], "Z", expectation(rho, z), exact.dot(z * exact).real(), rho, exact)};
    stamp(rows, 0, ms_since(start), c.output.timing);
    return rows;
  });
  for (const auto& r : per_omega) rep.rows.insert(rep.rows.end(), r.begin(), r.end());
  rep.summary["exact_source"] = "closed form (commuting)";
  return rep;
}

ExperimentReport run_consistency(const ExperimentConfig& c) {
  ExperimentReport rep;
  const Matrix h = c.physics.a * two_level_h();
  const Vector y0 = plus_state();
  const Generator gen = Generator::from_terms(2, {{TimeFunction(1.0), to_sparse(h)}}, {});
  const auto times = uniform_times(c.physics.t_final, c.physics.time_points);
  const Matrix z = pauli_z();
  const double omega = c.numerics.omegas.front();
  const std::vector<std::pair<std::string, ClockKind>> kinds{
      {"pure", ClockKind::PureSqrtDelta}, {"uniform", ClockKind::Uniform}, {"mixed", ClockKind::MixedDiagonal}};
  const auto per_kind = parallel_map<std::vector<ReportRow>>(kinds.size(), c.numerics.workers, [&](std::size_t i) {
    const auto start = Clock::now();
    PipelineConfig p = make_pipeline(c.numerics, c.physics.t_final, omega, false);
    p.clock_state = make_clock_state(kinds[i].second, c.numerics.profile, omega);
    const PipelineResult res = full_pipeline(gen, y0, times, p, {{"Z", z}});
    std::vector<ReportRow> rows;
    for (const auto& rec : res.records) {
      const Vector u = SpectralPropagator(h).apply(y0, rec.t);
      rows.push_back(state_row(rec.t, omega, "Z[" + kinds[i].first + "]", rec.values[0], u.dot(z * u).real(),
                               rec.state, u));
    }
    stamp(rows, 0, ms_since(start), c.output.timing);
    return rows;
  });
  for (const auto& r : per_kind) rep.rows.insert(rep.rows.end(), r.begin(), r.end());
  rep.summary["exact_source"] = "closed form (time independent)";
  return rep;
}

nlohmann::json cost_json(const CostReport& r) {
  return {{"label", r.label}, {"sparsity", r.sparsity}, {"max_norm", r.max_norm}, {"T", r.time},
          {"epsilon", r.epsilon}, {"tau", r.tau}, {"qubits", r.qubits}, {"queries", r.queries},
          {"gates", r.gates}, {"units", "relative cost units"}};
}

ExperimentReport run_complexity(const ExperimentConfig& c) {
  ExperimentReport rep;
  const Expression g = Expression::parse(c.physics.g, "s");
  const double a = c.physics.a, t = c.physics.t_final;
  const Matrix h = two_level_h();
  const Generator gen = Generator::from_terms(2, {{TimeFunction(a) * g.time_function(), to_sparse(h)}}, {});
  nlohmann::json records = nlohmann::json::array();
  for (double omega : c.numerics.omegas) {
    const auto clock = std::get<GridClock>(make_clock(c.numerics, t, omega));
    const DilatedSystem sys = build_dilated(gen, clock);
    const MatrixStats hbar = matrix_stats(sys.hbar);
    std::vector<double> nodes;
    for (std::size_t i = 0; i < clock.nodes; ++i) nodes.push_back(std::max(clock.node(i), 0.0));
    const MatrixStats per_time = max_stats([&](double s) { return gen.a1(s); }, nodes);
    // the clock resolution sets the accuracy: eps ~ 1/N
    const double eps = std::min(0.5, 1.0 / static_cast<double>(clock.nodes));
    const CostReport measured = measured_estimate(hbar, t, eps, 2);
    const CostReport two = two_parameter_estimate(per_time.sparsity, per_time.max_norm, 1.0 / clock.step(), t, eps, 2);
    const CostReport collapsed = theorem4_estimate(per_time.sparsity, per_time.max_norm, t, eps, 2);
    rep.rows.push_back(row(t, omega, "tau", measured.tau, two.tau));
    rep.rows.push_back(row(t, omega, "queries", measured.queries, two.queries));
    rep.rows.back().succ_prob = kNaN;
    rep.rows[rep.rows.size() - 2].succ_prob = kNaN;
    records.push_back({{"omega", omega}, {"nodes", clock.nodes}, {"hbar_sparsity", hbar.sparsity},
                       {"hbar_max_norm", hbar.max_norm}, {"h_sparsity", per_time.sparsity},
                       {"h_max_norm", per_time.max_norm}, {"measured", cost_json(measured)},
                       {"two_parameter", cost_json(two)}, {"collapsed", cost_json(collapsed)}});
    rep.assertions.push_back({fmt::format("measured tau within bound (omega={})", omega), measured.tau <= two.tau,
                              fmt::format("{:.6g} <= {:.6g}", measured.tau, two.tau)});
    rep.assertions.push_back({fmt::format("sparsity bound (omega={})", omega),
                              hbar.sparsity <= per_time.sparsity + 2,
                              fmt::format("{} <= {} + 2", hbar.sparsity, per_time.sparsity)});
  }
  rep.summary["costs"] = records;
  rep.summary["exact_source"] = "two-parameter bound";
  return rep;
}

ExperimentReport run_pde(const ExperimentConfig& c) {
  ExperimentReport rep;
  const HermiteBasis ub(c.numerics.n_u, c.numerics.scale_u);
  auto separable = [](const PdeTerm& t) {
    const Expression time = Expression::parse(t.time_expr, "t");
    const Expression space = Expression::parse(t.space_expr, "x");
    SeparableTerm term{time.time_function(), {}};
    if (!(space.polynomial() && space.polynomial()->size() == 1 && (*space.polynomial())[0] == 1.0))
      term.space.push_back({0, space.multiplication()});
    return SeparableFunction{term};
  };
  LinearPdeSpec spec;
  spec.dim = c.physics.pde_dim;
  for (const PdeTerm& t : c.physics.pde_terms) spec.derivatives.push_back({t.order, t.axis, std::nullopt, separable(t)});
  if (c.physics.pde_potential) spec.potential = separable(*c.physics.pde_potential);
  const Generator gen = split_generator(linear_pde_generator(spec), {{axis_mode(0), ub}});
  const auto warnings = stability_warnings(spec, uniform_times(c.physics.t_final, 5), {-1.0, 0.0, 1.0});
  rep.summary["stability_warnings"] = warnings;
  const DissipationReport dr = dissipation_report(gen, uniform_times(c.physics.t_final, 5));
  rep.summary["anti_dissipative"] = dr.anti_dissipative;
  const Vector u0 = gaussian_amplitude(ub, c.physics.initial_mean, c.physics.initial_variance);
  const Matrix x = position_matrix(ub);
  const Matrix x2 = position_power_matrix(ub, 2);
  const auto times = uniform_times(c.physics.t_final, c.physics.time_points);
  const bool eta = gen.has_dissipation();
  const MatrixProvider a = [&](double t) { return gen.a(t); };
  for (double omega : c.numerics.omegas) {
    const auto start = Clock::now();
    const std::size_t first = rep.rows.size();
    const PipelineConfig p = make_pipeline(c.numerics, c.physics.t_final, omega, eta);
    const PipelineResult res = full_pipeline(gen, u0, times, p, {{"x", x}, {"x2", x2}});
    for (const auto& rec : res.records) {
      const Vector u = time_ordered_apply(a, u0, 0.0, rec.t).normalized();
      rep.rows.push_back(state_row(rec.t, omega, "x", rec.values[0], u.dot(x * u).real(), rec.state, u, kNaN,
                                   rec.success_probability));
      rep.rows.push_back(state_row(rec.t, omega, "x2", rec.values[1], u.dot(x2 * u).real(), rec.state, u, kNaN,
                                   rec.success_probability));
    }
    stamp(rep.rows, first, ms_since(start), c.output.timing);
  }
  rep.summary["exact_source"] = "oracle propagator";
  record_sizes(rep, make_pipeline(c.numerics, c.physics.t_final, c.numerics.omegas.front(), eta), c.numerics.n_u);
  return rep;
}

void check_assertions(const ExperimentConfig& c, ExperimentReport& rep) {
  const Assertions& a = c.checks;
  if (a.max_abs_err) {
    double worst = 0.0;
    for (const auto& r : rep.rows)
      if (std::isfinite(r.abs_err)) worst = std::max(worst, r.abs_err);
    rep.assertions.push_back({"max_abs_err", worst <= *a.max_abs_err, fmt::format("{:.4g} <= {:.4g}", worst, *a.max_abs_err)});
  }
  if (a.min_fidelity) {
    double worst = 1.0;
    for (const auto& r : rep.rows)
      if (std::isfinite(r.fidelity)) worst = std::min(worst, r.fidelity);
    rep.assertions.push_back({"min_fidelity", worst >= *a.min_fidelity, fmt::format("{:.10g} >= {:.10g}", worst, *a.min_fidelity)});
  }
  if (a.slope_min || a.slope_max || a.prefactor_tol) {
    const auto& fit = rep.summary.value("fit", nlohmann::json::object());
    if (!fit.contains("slope")) {
      rep.assertions.push_back({"error-law fit", false, fit.value("error", "no fit")});
      return;
    }
    const double slope = fit["slope"];
    if (a.slope_min) rep.assertions.push_back({"slope_min", slope >= *a.slope_min, fmt::format("{:.4f} >= {}", slope, *a.slope_min)});
    if (a.slope_max) rep.assertions.push_back({"slope_max", slope <= *a.slope_max, fmt::format("{:.4f} <= {}", slope, *a.slope_max)});
    if (a.prefactor_tol) {
      const double ratio = fit["prefactor_ratio"];
      rep.assertions.push_back({"prefactor", std::abs(ratio - 1.0) <= *a.prefactor_tol,
                                fmt::format("|{:.4f} - 1| <= {}", ratio, *a.prefactor_tol)});
    }
  }
}

}  // namespace

Matrix two_level_h() {
  Matrix h(2, 2);
  h << 0.25, cplx(0.5, -1.0 / 3.0), cplx(0.5, 1.0 / 3.0), -0.25;
  return h;
}

Vector plus_state() { return Vector::Constant(2, 1.0 / std::sqrt(2.0)); }

Matrix pauli_z() {
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return z;
}

OpenOdeModel::OpenOdeModel() : m1(2, 2), m2(2, 2), u0(2) {
  m1 << 0.6, 0.0, 0.0, 1.4;
  m2 << 1.25, kI, -kI, 1.25;
  u0 << std::sqrt(2.0 / 3.0), std::sqrt(1.0 / 3.0);
}

Generator OpenOdeModel::generator(double a, const TimeFunction& g) const {
  const TimeFunction lambda = TimeFunction(a) * g;
  return Generator::from_terms(2, {{lambda, to_sparse(m1)}}, {{lambda, to_sparse(m2)}});
}

Vector OpenOdeModel::exact(double a, double g_area) const {
  return dense_expm(Matrix(m1 - kI * m2), a * g_area) * u0;
}

FpPreset fp_preset(int fp_case) {
  switch (fp_case) {
    case 1: return {"0.5*s", "0.5*s"};
    case 2: return {"0.5*s", "0.3"};
    case 3: return {"0.5*s^3", "0.3*s"};
    default: throw Error(ErrorKind::Config, fmt::format("physics.case: no preset {}", fp_case));
  }
}

std::vector<double> uniform_times(double t_final, std::size_t points) {
  if (points <= 1) return {t_final};
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) out[i] = t_final * static_cast<double>(i) / static_cast<double>(points - 1);
  return out;
}

ClockSpec make_clock(const Numerics& n, double t_final, double omega) {
  if (n.clock == ClockScheme::Galerkin) return GalerkinClock{n.n_s, n.scale_s};
  const double margin = 2.0 * DeltaProfile{n.profile, omega}.support();
  return covering_grid(n.n_s, -margin, t_final + margin,
                       n.clock == ClockScheme::Upwind ? MomentumScheme::Upwind : MomentumScheme::Spectral);
}

ClockState make_clock_state(ClockKind kind, ProfileKind profile, double omega) {
  const DeltaProfile p{profile, omega};
  switch (kind) {
    case ClockKind::PureSqrtDelta: return ClockState::pure(p);
    case ClockKind::MixedDiagonal: return ClockState::mixed(p);
    case ClockKind::Uniform: return ClockState::uniform();
    case ClockKind::Custom: break;
  }
  throw Error(ErrorKind::Config, "custom clock states are not configurable from files");
}

PipelineConfig make_pipeline(const Numerics& n, double t_final, double omega, bool with_eta) {
  PipelineConfig p;
  p.clock = make_clock(n, t_final, omega);
  p.clock_state = make_clock_state(n.clock_state, n.profile, omega);
  if (with_eta) p.eta = EtaMode{n.n_eta, n.scale_eta};
  p.recovery = {.a = n.recovery_a, .b = n.recovery_b};
  p.prepare.strict_resolution = n.strict_resolution;
  p.evolve.method = n.method;
  p.evolve.krylov.tolerance = n.krylov_tol;
  return p;
}

std::size_t qubit_count(const std::vector<std::size_t>& dims) {
  std::size_t q = 0;
  for (std::size_t d : dims) q += static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(d, 1)))));
  return q;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentReport rep;
  switch (config.kind) {
    case ExperimentKind::Hamiltonian2Level:
    case ExperimentKind::OmegaSweep: rep = run_two_level(config); break;
    case ExperimentKind::OpenOde: rep = run_open_ode(config); break;
    case ExperimentKind::FokkerPlanck: rep = run_fokker_planck(config); break;
    case ExperimentKind::CommutingProtocol: rep = run_commuting(config); break;
    case ExperimentKind::Consistency: rep = run_consistency(config); break;
    case ExperimentKind::Complexity: rep = run_complexity(config); break;
    case ExperimentKind::Pde: rep = run_pde(config); break;
  }
  rep.name = config.name;
  rep.summary["experiment"] = std::string(experiment_name(config.kind));
  rep.summary["omegas"] = config.numerics.omegas;
  double margin = -std::numeric_limits<double>::infinity();
  for (const auto& r : rep.rows)
    if (std::isfinite(r.td_margin)) margin = std::max(margin, r.td_margin);
  if (std::isfinite(margin)) rep.summary["trace_distance_margin"] = margin;
  check_assertions(config, rep);
  return rep;
}

}  // namespace clockdil::harness
