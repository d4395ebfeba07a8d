#include <random>

#include "clockdil/operator_algebra.hpp"
#include "clockdil/sparse.hpp"
#include "doctest.h"

using namespace clockdil;

namespace {

Matrix pauli_x() { return (Matrix(2, 2) << 0, 1, 1, 0).finished(); }
Matrix pauli_y() { return (Matrix(2, 2) << 0, -kI, kI, 0).finished(); }
Matrix pauli_z() { return (Matrix(2, 2) << 1, 0, 0, -1).finished(); }

Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {d(rng), d(rng)};
  return m;
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("time functions keep polynomial structure") {
  const TimeFunction a = TimeFunction::polynomial({1.0, 2.0});
  const TimeFunction b = TimeFunction::polynomial({0.0, kI});
  const TimeFunction p = a * b;
  REQUIRE(p.is_polynomial());
  CHECK(p(0.5) == a(0.5) * b(0.5));
  CHECK((a + b)(2.0) == a(2.0) + b(2.0));
  CHECK(b.real_part().is_zero());
  CHECK(b.imag_part()(3.0) == cplx(3.0));
  const TimeFunction g = TimeFunction::general([](double t) { return cplx(std::sin(t)); });
  CHECK_FALSE((g * a).is_polynomial());
  CHECK((g * a)(0.3).real() == doctest::Approx(std::sin(0.3) * 1.6));
  CHECK(TimeFunction(2.0).is_constant());
}

TEST_CASE("materialize identity and finite matrices") {
  OperatorExpr id = OperatorExpr::identity({{"q", ModeKind::Finite}});
  CHECK((materialize(id, {{"q", std::size_t{4}}}, 0.0) - Matrix::Identity(4, 4)).norm() == 0.0);

  OperatorExpr h({{"q", ModeKind::Finite}});
  h.add(0.5, {on("q", PrimitiveOp::finite(pauli_x()))});
  h.add(1.0 / 3.0, {on("q", PrimitiveOp::finite(pauli_y()))});
  h.add(0.25, {on("q", PrimitiveOp::finite(pauli_z()))});
  Matrix expect(2, 2);
  expect << 0.25, cplx(0.5, -1.0 / 3.0), cplx(0.5, 1.0 / 3.0), -0.25;
  CHECK(max_abs(materialize(h, {{"q", std::size_t{2}}}, 0.0) - expect) < 1e-15);

  OperatorExpr bad({{"q", ModeKind::Finite}});
  bad.add(1.0, {on("q", PrimitiveOp::finite(pauli_x()))});
  CHECK_THROWS_AS(materialize(bad, {{"q", std::size_t{3}}}, 0.0), Error);
  CHECK_THROWS_AS(materialize(bad, {{"other", std::size_t{2}}}, 0.0), Error);
  CHECK_THROWS_AS(bad.add(1.0, {on("missing", PrimitiveOp::position())}), Error);
}

TEST_CASE("position squared against direct quadrature") {
  HermiteBasis b(8, 1.0);
  OperatorExpr x2({{"x"}});
  x2.add(1.0, {on("x", PrimitiveOp::position_power(2))});
  const Matrix m = materialize(x2, {{"x", b}}, 0.0);
  const Matrix quad = multiplication_operator([](double s) { return cplx(s * s); }, b);
  CHECK(max_abs(m - quad) < 1e-12);
  const Matrix xx = position_matrix(b) * position_matrix(b);
  CHECK(max_abs((m - xx).topLeftCorner(6, 6)) < 1e-14);
  // the padded power is exact even in the last row, where the plain square is not
  CHECK(max_abs((m - xx).bottomRightCorner(1, 1)) > 0.1);
}

TEST_CASE("power one equals the plain primitive") {
  HermiteBasis b(12, 0.7);
  CHECK(max_abs(primitive_matrix(PrimitiveOp::position_power(1), b) -
                primitive_matrix(PrimitiveOp::position(), b)) == 0.0);
  CHECK(max_abs(primitive_matrix(PrimitiveOp::momentum_power(1), b) -
                primitive_matrix(PrimitiveOp::momentum(), b)) == 0.0);
  const Matrix poly = primitive_matrix(PrimitiveOp::multiplication_polynomial({1.0, 0.0, 2.0}), b);
  const Matrix quad = primitive_matrix(
      PrimitiveOp::multiplication([](double s) { return cplx(1.0 + 2.0 * s * s); }), b);
  CHECK(max_abs(poly - quad) < 1e-11);
}

TEST_CASE("adjoint of x p is p x") {
  HermiteBasis b(16, 1.0);
  BasisMap bases{{"x", b}};
  OperatorExpr xp({{"x"}});
  xp.add(1.0, {on("x", PrimitiveOp::position()), on("x", PrimitiveOp::momentum())});
  const Matrix m = materialize(xp, bases, 0.0);
  CHECK(max_abs(m - position_matrix(b) * momentum_matrix(b)) < 1e-14);
  const Matrix adj = materialize(adjoint(xp), bases, 0.0);
  CHECK(max_abs(adj - m.adjoint()) < 1e-14);
  CHECK(max_abs(adj - momentum_matrix(b) * position_matrix(b)) < 1e-14);

  OperatorExpr ix({{"x"}});
  ix.add(kI, {on("x", PrimitiveOp::position())});
  CHECK(adjoint(ix).terms()[0].coefficient(0.0) == -kI);
  CHECK(max_abs(materialize(adjoint(OperatorExpr::identity({{"x"}})), bases, 0.0) -
                Matrix::Identity(16, 16)) == 0.0);
}

TEST_CASE("adjoint involution and linearity on a mixed expression") {
  std::mt19937_64 rng(21);
  HermiteBasis b(10, 0.5);
  BasisMap bases{{"u", b}, {"q", std::size_t{3}}};
  const Matrix f = random_matrix(3, rng);
  OperatorExpr e1({{"u"}, {"q", ModeKind::Finite}});
  e1.add(TimeFunction::polynomial({kI, 2.0}),
         {on("u", PrimitiveOp::momentum_power(2)), on("q", PrimitiveOp::finite(f))});
  e1.add(TimeFunction::general([](double t) { return cplx(std::cos(t), t); }),
         {on("u", PrimitiveOp::multiplication([](double x) { return cplx(x, std::sin(x)); }))});
  OperatorExpr e2({{"u"}, {"q", ModeKind::Finite}});
  e2.add(0.3, {on("u", PrimitiveOp::position()), on("u", PrimitiveOp::momentum()),
               on("q", PrimitiveOp::finite(f.adjoint()))});
  for (double t : {0.0, 0.37, 1.0}) {
    const Matrix m1 = materialize(e1, bases, t);
    const Matrix m2 = materialize(e2, bases, t);
    CHECK(max_abs(materialize(adjoint(adjoint(e1)), bases, t) - m1) < 1e-12);
    CHECK(max_abs(materialize(adjoint(e1), bases, t) - m1.adjoint()) < 1e-12);
    CHECK(max_abs(materialize(e1 + e2, bases, t) - (m1 + m2)) < 1e-12);
    CHECK(max_abs(materialize(e1 - e2, bases, t) - (m1 - m2)) < 1e-12);
    CHECK(max_abs(materialize(e1 * e2, bases, t) - m1 * m2) < 1e-10);
  }
}

TEST_CASE("Kronecker order follows the declared modes") {
  BasisMap bases{{"a", std::size_t{2}}, {"b", std::size_t{3}}};
  std::mt19937_64 rng(4);
  const Matrix ma = random_matrix(2, rng);
  const Matrix mb = random_matrix(3, rng);
  OperatorExpr e({{"a", ModeKind::Finite}, {"b", ModeKind::Finite}});
  e.add(1.0, {on("b", PrimitiveOp::finite(mb)), on("a", PrimitiveOp::finite(ma))});
  CHECK(max_abs(materialize(e, bases, 0.0) - kron(ma, mb)) < 1e-14);
  OperatorExpr only_b({{"a", ModeKind::Finite}, {"b", ModeKind::Finite}});
  only_b.add(1.0, {on("b", PrimitiveOp::finite(mb))});
  CHECK(max_abs(materialize(only_b, bases, 0.0) - kron(Matrix::Identity(2, 2), mb)) < 1e-14);
}

TEST_CASE("hermitian split") {
  std::mt19937_64 rng(9);
  const Matrix a = random_matrix(3, rng);
  const auto [a1, a2] = hermitian_split(a);
  CHECK(hermitian_defect(a1) < 1e-15);
  CHECK(hermitian_defect(a2) < 1e-15);
  CHECK(max_abs(a1 - kI * a2 - a) < 1e-15);

  const Matrix h = a + a.adjoint();
  const auto hs = hermitian_split(h);
  CHECK(max_abs(hs.a1 - h) == 0.0);
  CHECK(max_abs(hs.a2) == 0.0);

  const Matrix m = a * a.adjoint();
  const auto ms = hermitian_split(-kI * m);
  CHECK(max_abs(ms.a1) < 1e-15);
  CHECK(max_abs(ms.a2 - m) < 1e-14);
  CHECK_THROWS_AS(hermitian_split(Matrix(2, 3)), Error);

  OperatorExpr e({{"q", ModeKind::Finite}});
  e.add(1.0, {on("q", PrimitiveOp::finite(a))});
  const Generator g = split_generator(e, {{"q", std::size_t{3}}});
  CHECK(max_abs(g.a1(0.4) - a1) < 1e-15);
  CHECK(max_abs(g.a2(0.4) - a2) < 1e-15);
}

TEST_CASE("open-system example splits into the published pair") {
  // V = a g(s) (A1 - i A2) with g(s) = 1 - s.
  const double a = 0.3;
  Matrix a1(2, 2), a2(2, 2);
  a1 << 0.6, 0, 0, 1.4;
  a2 << 1.25, kI, -kI, 1.25;
  const Matrix v = a1 - kI * a2;
  OperatorExpr e({{"q", ModeKind::Finite}});
  e.add(TimeFunction::polynomial({a, -a}), {on("q", PrimitiveOp::finite(v))});
  const Generator g = split_generator(e, {{"q", std::size_t{2}}});
  for (double s : {0.0, 0.5, 1.0}) {
    CHECK(max_abs(g.a1(s) - a * (1 - s) * a1) < 1e-15);
    CHECK(max_abs(g.a2(s) - a * (1 - s) * a2) < 1e-15);
  }
  CHECK(g.separable());
  CHECK(g.has_dissipation());
}

TEST_CASE("generator split invariants on a time-dependent transport expression") {
  HermiteBasis b(32, 1.0);
  BasisMap bases{{"x", b}};
  // A = a(t) x p + b(t) (real transport) plus complex source c(t)
  OperatorExpr e({{"x"}});
  e.add(TimeFunction::polynomial({0.0, 0.5}),
        {on("x", PrimitiveOp::position()), on("x", PrimitiveOp::momentum())});
  e.add(TimeFunction::general([](double t) { return cplx(std::exp(-t), 0.2); }), {});
  e.add(TimeFunction::polynomial({0.1, 0.0, 1.0}), {on("x", PrimitiveOp::momentum_power(2))});
  const Generator g = split_generator(e, bases);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 2);
  for (int k = 0; k < 20; ++k) {
    const double t = u(rng);
    const Matrix a1 = g.a1(t);
    const Matrix a2 = g.a2(t);
    CHECK(hermitian_defect(a1) < 1e-12);
    CHECK(hermitian_defect(a2) < 1e-12);
    CHECK(max_abs(a1 - kI * a2 - materialize(e, bases, t)) < 1e-12);
  }
}

TEST_CASE("numeric split matches the commutator form for real transport") {
  // A = a(x) p with real a: A2 = (i/2)[a, p] = -a'/2, checked on the interior block.
  const std::size_t n = 32;
  HermiteBasis b(n, 1.0);
  BasisMap bases{{"x", b}};
  OperatorExpr e({{"x"}});
  e.add(TimeFunction::polynomial({0.0, 1.0}),
        {on("x", PrimitiveOp::multiplication_polynomial({0.3, 1.0, 0.0, -0.2})),
         on("x", PrimitiveOp::momentum())});
  const Generator g = split_generator(e, bases);
  const Matrix oracle =
      multiplication_operator([](double x) { return cplx(-0.5 * (1.0 - 0.6 * x * x)); }, b);
  const auto keep = static_cast<Eigen::Index>(n - 4);
  CHECK(max_abs((g.a2(1.0) - oracle).topLeftCorner(keep, keep)) < 1e-6);

  // constant real drift has no dissipative part at all
  OperatorExpr conv({{"x"}});
  conv.add(TimeFunction::polynomial({0.0, 2.0}), {on("x", PrimitiveOp::momentum())});
  const Generator gc = split_generator(conv, bases);
  CHECK(gc.a2_terms().empty());
  CHECK(max_abs(gc.a2(0.7)) == 0.0);
  CHECK_NOTHROW(hamiltonian_generator(conv, bases));
  CHECK_THROWS_AS(hamiltonian_generator(e, bases), Error);
}

TEST_CASE("pointwise generators are not separable") {
  const Generator g = Generator::from_function(2, [](double t) {
    Matrix m(2, 2);
    m << t, kI, 0.0, 1.0;
    return m;
  });
  CHECK_FALSE(g.separable());
  CHECK(max_abs(g.a(0.3) - (Matrix(2, 2) << 0.3, kI, 0.0, 1.0).finished()) < 1e-15);
}
