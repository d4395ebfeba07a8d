#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "clockdil/galerkin_basis.hpp"
#include "doctest.h"

using namespace clockdil;

namespace {

// Independent oracle: the closed form with std::hermite and log-factorials.
double closed_form(std::size_t n, double scale, double x) {
  const double y = x / scale;
  const double log_c = 0.25 * std::log(std::numbers::pi * scale * scale) +
                       0.5 * std::lgamma(n + 1.0) + 0.5 * n * std::log(2.0);
  return std::hermite(static_cast<unsigned>(n), y) * std::exp(-0.5 * y * y - log_c);
}

// Plain trapezoid on a fine grid; spectrally accurate for smooth decaying integrands.
template <class F>
double trapezoid(F f, double a, double b, int n = 200000) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

}  // namespace

TEST_CASE("basis values at the origin") {
  HermiteBasis b(8, 1.0);
  CHECK(b.eval(0, 0.0) == doctest::Approx(0.7511255444649425).epsilon(1e-14));
  CHECK(std::abs(HermiteBasis(8, 3.0).eval(1, 0.0)) < 1e-300);
}

TEST_CASE("recurrence matches the closed form") {
  for (double scale : {0.2, 1.0, 2.0}) {
    HermiteBasis b(40, scale);
    for (double y : {-4.0, -1.3, 0.0, 0.7, 2.5, 6.0}) {
      const double x = y * scale;
      const RealVector col = b.column(x);
      for (std::size_t n = 0; n < 40; ++n) {
        const double ref = closed_form(n, scale, x);
        CHECK(col(static_cast<Eigen::Index>(n)) == doctest::Approx(ref).epsilon(1e-10).scale(1e-12));
        CHECK(b.eval(n, x) == doctest::Approx(ref).epsilon(1e-10).scale(1e-12));
      }
    }
  }
}

TEST_CASE("table and per-point evaluation agree, including far points") {
  HermiteBasis b(512, 1.0);
  std::vector<double> x{-40.0, -31.0, -10.0, 0.0, 0.3, 12.0, 27.5, 33.0};
  const RealMatrix t = b.table(x);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const RealVector col = b.column(x[j]);
    CHECK((t.col(static_cast<Eigen::Index>(j)) - col).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(col.allFinite());
  }
}

TEST_CASE("Gram matrix is the identity") {
  for (std::size_t n : {2u, 16u, 64u, 256u}) {
    HermiteBasis b(n, 0.7);
    const RealMatrix g = gram_matrix(b);
    CHECK((g - RealMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Gauss-Hermite rule integrates polynomial times Gaussian exactly") {
  const QuadratureRule& r = gauss_hermite(10);
  // int y^{2k} e^{-y^2} dy = Gamma(k + 1/2)
  for (int k = 0; k <= 9; ++k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.nodes.size(); ++i) s += r.weights(i) * std::pow(r.nodes(i), 2 * k);
    CHECK(s == doctest::Approx(std::tgamma(k + 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("orthogonality of phi_3 and phi_5") {
  HermiteBasis b(8, 1.3);
  const QuadratureRule& r = gauss_hermite_folded(16);
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.nodes.size(); ++i) {
    const double x = b.scale() * r.nodes(i);
    s += b.scale() * r.weights(i) * b.eval(3, x) * b.eval(5, x);
  }
  CHECK(std::abs(s) < 1e-12);
}

TEST_CASE("position and momentum matrices") {
  HermiteBasis b2(2, 1.0);
  const double oracle = trapezoid([&](double x) { return b2.eval(0, x) * x * b2.eval(1, x); }, -20, 20);
  CHECK(position_matrix(b2)(0, 1).real() == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(position_matrix(b2)(0, 1).real() == doctest::Approx(std::sqrt(0.5)));

  for (double scale : {0.2, 1.0, 2.0}) {
    HermiteBasis b(24, scale);
    const Matrix x = position_matrix(b);
    const Matrix p = momentum_matrix(b);
    CHECK(hermitian_defect(x) == 0.0);
    CHECK(hermitian_defect(p) == 0.0);
    const Matrix comm = x * p - p * x;
    const Eigen::Index m = 23;
    CHECK((comm.topLeftCorner(m, m) - kI * Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
  }

  const Matrix x1 = position_matrix(HermiteBasis(10, 1.0));
  const Matrix x2 = position_matrix(HermiteBasis(10, 2.0));
  const Matrix p1 = momentum_matrix(HermiteBasis(10, 1.0));
  const Matrix p2 = momentum_matrix(HermiteBasis(10, 2.0));
  CHECK((x2 - 2.0 * x1).norm() < 1e-14);
  CHECK((p2 - 0.5 * p1).norm() < 1e-14);
}

TEST_CASE("momentum matrix matches -i d/dx by quadrature") {
  HermiteBasis b(12, 0.8);
  const double h = 1e-5;
  const Matrix p = momentum_matrix(b);
  for (std::size_t n = 0; n < 11; ++n) {
    // <phi_n | -i d/dx | phi_{n+1}>
    const double integral = trapezoid(
        [&](double x) {
          return b.eval(n, x) * (b.eval(n + 1, x + h) - b.eval(n + 1, x - h)) / (2 * h);
        },
        -15, 15, 40000);
    CHECK(p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n + 1)).imag() ==
          doctest::Approx(-integral).epsilon(1e-6));
  }
}

TEST_CASE("multiplication operator") {
  HermiteBasis b(16, 1.0);
  const Matrix one = multiplication_operator([](double) { return cplx(1.0); }, b);
  CHECK((one - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix x = multiplication_operator([](double s) { return cplx(s); }, b);
  CHECK((x - position_matrix(b)).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix x2 = multiplication_operator([](double s) { return cplx(s * s); }, b);
  CHECK(x2(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hermitian_defect(x2) < 1e-14);

  HermiteBasis b32(32, 1.0);
  const Matrix pos = position_matrix(b32);
  Matrix power = Matrix::Identity(32, 32);
  for (int k = 1; k <= 4; ++k) {
    power = power * pos;
    const Matrix m = multiplication_operator([k](double s) { return cplx(std::pow(s, k)); }, b32);
    const Eigen::Index keep = 32 - k;
    CHECK((m - power).topLeftCorner(keep, keep).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("complex multiplication operator is the sum of its parts") {
  HermiteBasis b(10, 0.5);
  auto f = [](double s) { return cplx(std::cos(s), s * s); };
  const Matrix m = multiplication_operator(f, b);
  const Matrix re = multiplication_operator([](double s) { return cplx(std::cos(s)); }, b);
  const Matrix im = multiplication_operator([](double s) { return cplx(s * s); }, b);
  CHECK((m - re - kI * im).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unresolved multiplication functions are flagged") {
  HermiteBasis b(32, 0.2);
  // Oscillation far beyond what 256 nodes can see.
  auto spike = [](double s) { return cplx(std::cos(900.0 * s)); };
  QuadratureOptions opts;
  opts.max_order = 256;
  CHECK_THROWS_AS(multiplication_operator(spike, b, opts), Error);
  opts.throw_on_flag = false;
  const GalerkinMatrix g = galerkin_matrix(spike, b, opts);
  CHECK_FALSE(g.converged);
}

TEST_CASE("state projection") {
  HermiteBasis b(16, 1.2);
  const StateProjection e2 = project_state([&](double x) { return cplx(b.eval(2, x)); }, b, 1.0);
  Vector expect = Vector::Zero(16);
  expect(2) = 1.0;
  CHECK((e2.coefficients - expect).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(e2.leakage) < 1e-10);

  // Gaussian density of mean 0.8 and width 0.3, as an amplitude vector.
  auto density = [](double x) {
    return cplx(std::exp(-(x - 0.8) * (x - 0.8) / 0.18) / std::sqrt(2 * std::numbers::pi * 0.09));
  };
  const double norm_sq = 1.0 / (2.0 * std::sqrt(std::numbers::pi) * 0.3);
  HermiteBasis wide(64, 2.0);
  const StateProjection at_two = project_state(density, wide, norm_sq);
  // Oracle: trapezoid projection of the same function.
  double leak_oracle = 0.0;
  {
    double captured = 0.0;
    for (std::size_t n = 0; n < 64; ++n) {
      const double c = trapezoid([&](double x) { return wide.eval(n, x) * density(x).real(); },
                                 -12, 12, 24000);
      captured += c * c;
    }
    leak_oracle = 1.0 - captured / norm_sq;
  }
  CHECK(at_two.leakage == doctest::Approx(leak_oracle).epsilon(1e-6));
  // With a length scale matched to the 0.3 width the projection is essentially exact.
  const StateProjection at_half = project_state(density, HermiteBasis(64, 0.5), norm_sq);
  CHECK(at_half.leakage < 1e-6);

  const StateProjection xi = project_state([](double x) { return cplx(std::exp(-std::abs(x))); }, wide, 1.0);
  CHECK(xi.coefficients.squaredNorm() >= 0.99);
  CHECK(xi.coefficients.squaredNorm() <= 1.0);
  for (Eigen::Index n = 1; n < 64; n += 2) CHECK(std::abs(xi.coefficients(n)) < 1e-10);
}

TEST_CASE("overlap of e^{-|x|} with phi_0 against the erf closed form") {
  const double s = 2.0;
  HermiteBasis b(64, s);
  const StateProjection xi = project_state([](double x) { return cplx(std::exp(-std::abs(x))); }, b);
  // int phi_0(x) e^{-|x|} dx = 2 (pi s^2)^{-1/4} int_0^inf e^{-x^2/(2s^2) - x} dx
  const double half = s * std::sqrt(std::numbers::pi / 2.0) * std::exp(s * s / 2.0) *
                      std::erfc(s / std::sqrt(2.0));
  const double expect = 2.0 * std::pow(std::numbers::pi * s * s, -0.25) * half;
  CHECK(xi.coefficients(0).real() == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("Fourier conjugate") {
  HermiteBasis b(8, 2.0);
  Vector e0 = Vector::Zero(8);
  e0(0) = 1.0;
  auto f0 = fourier_conjugate(e0, b, FourierDirection::Forward);
  CHECK((f0.coefficients - e0).norm() == 0.0);
  CHECK(f0.basis.scale() == doctest::Approx(0.5));

  Vector e1 = Vector::Zero(8);
  e1(1) = 1.0;
  CHECK(fourier_conjugate(e1, b, FourierDirection::Forward).coefficients(1) == kI);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  Vector c(8);
  for (auto& v : c) v = {d(rng), d(rng)};
  Vector four = c;
  HermiteBasis cur = b;
  for (int k = 0; k < 4; ++k) {
    auto r = fourier_conjugate(four, cur, FourierDirection::Forward);
    four = r.coefficients;
    cur = r.basis;
  }
  CHECK((four - c).norm() == 0.0);
  CHECK(cur == b);
  auto back = fourier_conjugate(fourier_conjugate(c, b, FourierDirection::Forward).coefficients,
                                b.conjugate(), FourierDirection::Inverse);
  CHECK((back.coefficients - c).norm() == 0.0);
  auto twice = fourier_conjugate(fourier_conjugate(c, b, FourierDirection::Forward).coefficients,
                                 b.conjugate(), FourierDirection::Forward);
  for (Eigen::Index n = 0; n < 8; ++n) CHECK(twice.coefficients(n) == (n % 2 ? -c(n) : c(n)));
  CHECK(fourier_conjugate(c, b, FourierDirection::Forward).coefficients.norm() == c.norm());
}

TEST_CASE("interval projection") {
  HermiteBasis b(32, 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  const IntervalProjection full = interval_projection(-inf, inf, b);
  CHECK((full.matrix - Matrix::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-10);
  const IntervalProjection pos = interval_projection(0.0, inf, b);
  const IntervalProjection neg = interval_projection(-inf, 0.0, b);
  CHECK((pos.matrix + neg.matrix - Matrix::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(hermitian_defect(pos.matrix) < 1e-14);
  CHECK(pos.idempotency_defect > 0.0);

  HermiteBasis b64(64, 2.0);
  const IntervalProjection p02 = interval_projection(0.0, 2.0, b64);
  CHECK(p02.refinement_delta < 1e-8);
  const double trace_oracle = trapezoid(
      [&](double x) { return b64.column(x).squaredNorm(); }, 0.0, 2.0, 20000);
  CHECK(p02.matrix.trace().real() == doctest::Approx(trace_oracle).epsilon(1e-8));
  Eigen::SelfAdjointEigenSolver<Matrix> es(p02.matrix);
  CHECK(es.eigenvalues().minCoeff() >= -1e-6);
  CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-6);
}

TEST_CASE("invalid bases are rejected") {
  CHECK_THROWS_AS(HermiteBasis(1, 1.0), Error);
  CHECK_THROWS_AS(HermiteBasis(4, 0.0), Error);
  CHECK_THROWS_AS(HermiteBasis(4, 1.0).eval(4, 0.0), Error);
  CHECK_THROWS_AS(interval_projection(1.0, 1.0, HermiteBasis(4, 1.0)), Error);
}
