#include <cmath>
#include <numbers>
#include <random>

#include "clockdil/clock_dilation.hpp"
#include "clockdil/reference_oracles.hpp"
#include "clockdil/sparse.hpp"
#include "doctest.h"

using namespace clockdil;

namespace {

Matrix paper_h() {
  Matrix h(2, 2);
  h << 0.25, cplx(0.5, -1.0 / 3.0), cplx(0.5, 1.0 / 3.0), -0.25;
  return h;
}

Vector plus_state() { return Vector::Constant(2, 1.0 / std::sqrt(2.0)); }

Generator linear_generator(const Matrix& h) {
  return Generator::from_terms(2, {{TimeFunction::polynomial({0.0, 1.0}), to_sparse(h)}}, {});
}

Generator constant_generator(const Matrix& h) {
  return Generator::from_terms(2, {{TimeFunction(1.0), to_sparse(h)}}, {});
}

Matrix reduced(const DilatedSystem& sys, const PreparedClock& clock, const Vector& psi, double t) {
  const Propagator prop(sys);
  return trace_out_clock(evolve_ensemble(prop, initial_ensemble(clock, psi), t), sys.clock_dim());
}

}  // namespace

TEST_CASE("upwind momentum kills constants and has two entries per row") {
  const std::size_t n = 16;
  const double ds = 1.0 / (n + 1);
  const SparseMatrix p = upwind_momentum(n, ds);
  CHECK((p * Vector::Ones(n)).norm() < 1e-12);
  for (Eigen::Index r = 0; r < p.outerSize(); ++r) CHECK(p.row(r).nonZeros() == 2);
  double maxabs = 0.0;
  for (Eigen::Index r = 0; r < p.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(p, r); it; ++it) maxabs = std::max(maxabs, std::abs(it.value()));
  CHECK(maxabs == doctest::Approx(n + 1.0));
  CHECK(maxabs <= std::sqrt(2.0) / ds);
}

TEST_CASE("spectral momentum is Hermitian and exact on resolvable plane waves") {
  const std::size_t n = 32;
  const GridClock g{.nodes = n};
  const Matrix p = spectral_momentum(n, g.step());
  CHECK(hermitian_defect(p) < 1e-13);
  for (int q : {-7, -1, 0, 3, 15}) {
    const double k = 2 * std::numbers::pi * q / (n * g.step());
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i) w(i) = std::polar(1.0, k * g.node(i));
    CHECK((p * w - k * w).norm() < 1e-10 * std::max(1.0, std::abs(k)) * std::sqrt(n));
  }
}

TEST_CASE("grid layout and covering") {
  const GridClock g{.nodes = 64};
  CHECK(g.node(32) == doctest::Approx(0.0));
  CHECK(g.hi() - g.lo() == doctest::Approx(63.0 / 65.0));
  const GridClock c = covering_grid(100, -0.04, 1.04);
  CHECK(c.lo() <= -0.04);
  CHECK(c.hi() >= 1.04);
  CHECK(std::abs(c.node(static_cast<std::size_t>(-c.first()))) < 1e-14);
}

TEST_CASE("clock preparation examples") {
  SUBCASE("Gaussian on a Galerkin clock") {
    const DeltaProfile p{ProfileKind::Gaussian, 0.1};
    const PreparedClock c = prepare_clock(GalerkinClock{32, 0.2}, ClockState::pure(p));
    CHECK(c.pure);
    CHECK(c.leakage < 1e-3);
    // (2 pi w^2)^(-1/4) exp(-s^2/(4 w^2)) projected by a plain trapezoid
    const HermiteBasis b(32, 0.2);
    Vector ref = Vector::Zero(32);
    const double h = 1e-4;
    for (double s = -1.5; s <= 1.5; s += h) {
      const double a = std::pow(2 * std::numbers::pi * 0.01, -0.25) * std::exp(-s * s / 0.04);
      ref += (h * a * b.column(s)).cast<cplx>();
    }
    CHECK((c.components[0].vector - ref.normalized()).norm() < 1e-6);
    CHECK(c.mean == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(c.second_moment == doctest::Approx(0.01).epsilon(0.02));
  }
  SUBCASE("triangular on a grid") {
    const GridClock g{.nodes = 64};
    const DeltaProfile p{ProfileKind::Triangular, 2 * g.step()};
    const PreparedClock c = prepare_clock(g, ClockState::mixed(p));
    REQUIRE(c.components.size() == 3);
    double total = 0.0;
    for (const auto& e : c.components) total += e.weight;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.components[0].weight == doctest::Approx(c.components[2].weight));
    CHECK(c.components[1].weight == doctest::Approx(0.5));
  }
  SUBCASE("uniform") {
    const PreparedClock c = prepare_clock(GridClock{.nodes = 20}, ClockState::uniform());
    CHECK(c.components.size() == 20);
    for (const auto& e : c.components) CHECK(e.weight == doctest::Approx(0.05));
  }
  SUBCASE("mixed Galerkin weights are a density") {
    const PreparedClock c = prepare_clock(GalerkinClock{32, 0.2},
                                          ClockState::mixed({ProfileKind::Cosine, 0.1}));
    double total = 0.0;
    for (const auto& e : c.components) {
      CHECK(e.weight >= 0.0);
      total += e.weight;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("under-resolved") {
    const GridClock g{.nodes = 64};
    CHECK_THROWS_AS(prepare_clock(g, ClockState::pure({ProfileKind::Gaussian, 0.5 * g.step()})), Error);
    CHECK_THROWS_AS(prepare_clock(GalerkinClock{32, 0.2}, ClockState::mixed({ProfileKind::Gaussian, 0.01})),
                    Error);
    CHECK_NOTHROW(prepare_clock(GalerkinClock{32, 0.2}, ClockState::mixed({ProfileKind::Gaussian, 0.01}),
                                {.strict_resolution = false}));
  }
}

TEST_CASE("dilated Hamiltonian structure") {
  const Matrix h = paper_h();
  SUBCASE("time-independent h on the Galerkin clock") {
    const GalerkinClock c{16, 0.3};
    const DilatedSystem sys = build_dilated(constant_generator(h), c);
    const Matrix expect = kron(Matrix::Identity(2, 2), momentum_matrix(c.basis())) +
                          kron(h, Matrix::Identity(16, 16));
    CHECK((sys.dense() - expect).norm() < 1e-12);
    CHECK(sys.layout == std::vector<std::size_t>{2, 16});
  }
  SUBCASE("adiabatic interpolation is the literal substitution") {
    const Matrix h0 = paper_h();
    Matrix hf(2, 2);
    hf << 1.0, 0.0, 0.0, -1.0;
    OperatorExpr e({{"q", ModeKind::Finite}});
    e.add(TimeFunction::polynomial({1.0, -1.0}), {on("q", PrimitiveOp::finite(h0))});
    e.add(TimeFunction::polynomial({0.0, 1.0}), {on("q", PrimitiveOp::finite(hf))});
    const GalerkinClock c{12, 0.5};
    const DilatedSystem sys = build_dilated(e, BasisMap{{"q", std::size_t{2}}}, c);
    const HermiteBasis b = c.basis();
    const Matrix expect = kron(Matrix::Identity(2, 2), momentum_matrix(b)) +
                          kron(h0, Matrix::Identity(12, 12)) + kron(Matrix(hf - h0), position_matrix(b));
    CHECK((sys.dense() - expect).norm() < 1e-12);
  }
  SUBCASE("two-level example dimensions and Hermiticity") {
    const DilatedSystem sys = build_dilated(linear_generator(h), GalerkinClock{32, 0.2});
    CHECK(sys.dim() == 64);
    CHECK(sys.hermitian_defect < 1e-12);
    const DilatedSystem grid = build_dilated(linear_generator(h), GridClock{.nodes = 64});
    CHECK(grid.hermitian_defect < 1e-12);
    const DilatedSystem up =
        build_dilated(linear_generator(h), GridClock{.nodes = 64, .scheme = MomentumScheme::Upwind});
    CHECK(up.hermitian_defect > 1e-3);
  }
  SUBCASE("grid clock switches the Hamiltonian off for negative s") {
    const GridClock g{.nodes = 8};
    const DilatedSystem sys = build_dilated(constant_generator(h), g);
    const Matrix d = sys.dense() - kron(Matrix::Identity(2, 2), spectral_momentum(8, g.step()));
    for (std::size_t i = 0; i < 8; ++i) {
      const double expect = g.node(i) < 0.0 ? 0.0 : h.norm();
      const Eigen::Index k = static_cast<Eigen::Index>(i);
      Matrix block(2, 2);
      block << d(k, k), d(k, 8 + k), d(8 + k, k), d(8 + k, 8 + k);
      CHECK(block.norm() == doctest::Approx(expect));
    }
  }
  SUBCASE("errors") {
    const Generator opaque = Generator::from_hermitian(2, [&](double t) { return Matrix(t * h); });
    CHECK_THROWS_AS(build_dilated(opaque, GalerkinClock{8, 0.3}), Error);
    CHECK_NOTHROW(build_dilated(opaque, GridClock{.nodes = 8}));
    const Generator lossy =
        Generator::from_terms(2, {}, {{TimeFunction(1.0), to_sparse(Matrix::Identity(2, 2))}});
    CHECK_THROWS_AS(build_dilated(lossy, GalerkinClock{8, 0.3}), Error);
    DilatedSystem big = build_dilated(constant_generator(h), GalerkinClock{8, 0.3},
                                      {.dense_cap = 8});
    CHECK_THROWS_AS(big.dense(), Error);
  }
}

TEST_CASE("evolution methods") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> d;
  Matrix m(256, 256);
  for (auto& z : m.reshaped()) z = {d(rng), d(rng)};
  DilatedSystem sys;
  sys.hbar = to_sparse(Matrix(0.5 * (m + m.adjoint()) / 16.0));
  sys.layout = {16, 16};
  sys.clock = GalerkinClock{16, 1.0};
  sys.hermitian_defect = hermitian_defect(sys.hbar);
  Vector psi(256);
  for (auto& z : psi) z = {d(rng), d(rng)};
  psi.normalize();

  const Vector a = evolve(sys, psi, 1.0, {.method = EvolveMethod::DenseEig});
  const Vector b = evolve(sys, psi, 1.0, {.method = EvolveMethod::Krylov});
  CHECK((a - b).norm() < 1e-8);
  CHECK(std::abs(a.norm() - 1.0) < 1e-9);
  CHECK((evolve(sys, psi, 0.0) - psi).norm() == 0.0);

  const DilatedSystem up = build_dilated(constant_generator(paper_h()),
                                         GridClock{.nodes = 16, .scheme = MomentumScheme::Upwind});
  CHECK_THROWS_AS(Propagator(up, {.method = EvolveMethod::DenseEig}), Error);
  CHECK(Propagator(up).method() == EvolveMethod::Krylov);
  CHECK_THROWS_AS(evolve(up, Vector::Zero(32), 5.0), Error);
}

TEST_CASE("time-independent h is unaffected by the clock") {
  const Matrix h = paper_h();
  const Vector y0 = plus_state();
  const double t = 0.5;
  const Vector exact = SpectralPropagator(h).apply(y0, t);
  const GalerkinClock c{32, 0.2};
  const DilatedSystem sys = build_dilated(constant_generator(h), c);
  for (const ClockState& st : {ClockState::pure({ProfileKind::Gaussian, 0.05}),
                               ClockState::mixed({ProfileKind::Gaussian, 0.05}), ClockState::uniform()}) {
    const Matrix rho = reduced(sys, prepare_clock(c, st), y0, t);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
    CHECK(fidelity(rho, exact) >= 1.0 - 1e-8);
  }
  // conditional state at any clock point
  const auto ens = evolve_ensemble(Propagator(sys), initial_ensemble(prepare_clock(c, ClockState::uniform()), y0), t);
  CHECK(fidelity(measure_clock_at(ens, t, c).state, exact) >= 1.0 - 1e-10);
}

TEST_CASE("product state traces out exactly") {
  const Vector y0 = plus_state();
  const PreparedClock c = prepare_clock(GalerkinClock{16, 0.3}, ClockState::pure({ProfileKind::Gaussian, 0.1}));
  const Matrix rho = trace_out_clock(initial_ensemble(c, y0).front().vector, 16);
  CHECK((rho - y0 * y0.adjoint()).norm() < 1e-14);
  CHECK_THROWS_AS(trace_out_clock(Vector::Ones(10), 4), Error);
}

TEST_CASE("linear ramp: reduced-state fidelity obeys the error law") {
  const Matrix h = paper_h();
  const Vector y0 = plus_state();
  const double t = 0.5;
  const auto hfun = [&](double s) { return Matrix(s * h); };
  const Vector exact = time_ordered_apply(hfun, y0, 0.0, t);
  const ErrorConstants k = error_constants(hfun, y0, t);
  const GalerkinClock c{32, 0.2};
  const DilatedSystem sys = build_dilated(linear_generator(h), c);
  const double w = 0.05;
  const Matrix rho = reduced(sys, prepare_clock(c, ClockState::pure({ProfileKind::Gaussian, w})), y0, t);
  const double loss = 1.0 - fidelity(rho, exact);
  CHECK(loss <= 2.0 * k.c * w * w);
  CHECK(loss > 0.5 * k.c * w * w);
  CHECK(trace_distance(rho, exact * exact.adjoint()) <= std::sqrt(loss) + 1e-12);
}

TEST_CASE("measuring the clock at s = t") {
  const Matrix h = paper_h();
  const Vector y0 = plus_state();
  const double t = 0.5;
  const auto hfun = [&](double s) { return Matrix(s * h); };
  const Vector exact = time_ordered_apply(hfun, y0, 0.0, t);
  const GridClock g = covering_grid(256, -1.0, 1.5);
  const DilatedSystem sys = build_dilated(linear_generator(h), g);
  const Propagator prop(sys);
  std::vector<double> prob;
  for (double w : {0.1, 0.2, 0.4}) {
    const auto ens = evolve_ensemble(prop, initial_ensemble(prepare_clock(g, ClockState::pure({ProfileKind::Gaussian, w})), y0), t);
    const ClockMeasurement m = measure_clock_at(ens, t, g);
    CHECK(m.probability > 0.0);
    CHECK(m.probability <= 1.0);
    prob.push_back(m.probability * w);
    if (w == 0.1) CHECK(fidelity(m.state, exact) > 1.0 - 0.05);
  }
  CHECK(prob[1] / prob[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(prob[2] / prob[0] == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("commuting protocol") {
  const Matrix h = paper_h();
  const Vector y0 = plus_state();
  const GridClock g = covering_grid(256, -0.05, 1.05);
  SUBCASE("constant g reduces to exp(-iht)") {
    const Matrix rho = commuting_protocol(h, [](double) { return 1.0; }, y0, 0.7, g,
                                          ClockState::pure({ProfileKind::Gaussian, 0.01}));
    CHECK(fidelity(rho, SpectralPropagator(h).apply(y0, 0.7)) > 1.0 - 1e-10);
  }
  SUBCASE("linear g") {
    const Matrix rho = commuting_protocol(h, [](double s) { return s; }, y0, 1.0, g,
                                          ClockState::pure({ProfileKind::Gaussian, 0.01}));
    CHECK(fidelity(rho, SpectralPropagator(h).apply(y0, 0.5)) >= 1.0 - 1e-4);
  }
  SUBCASE("agrees with the dilated Hamiltonian route") {
    const double t = 0.5, w = 0.05;
    const Matrix a = commuting_protocol(h, [](double s) { return s; }, y0, t, GalerkinClock{32, 0.2},
                                        ClockState::pure({ProfileKind::Gaussian, w}));
    const GalerkinClock c{32, 0.2};
    const DilatedSystem sys = build_dilated(linear_generator(h), c);
    const Matrix b = reduced(sys, prepare_clock(c, ClockState::pure({ProfileKind::Gaussian, w})), y0, t);
    const Vector exact = commuting_exact(h, [](double s) { return s; }, t) * y0;
    const double la = 1.0 - fidelity(a, exact), lb = 1.0 - fidelity(b, exact);
    CHECK(trace_distance(a, b) <= 2.0 * (std::sqrt(la) + std::sqrt(lb)));
  }
}
