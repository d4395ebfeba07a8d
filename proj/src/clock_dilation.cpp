#include "clockdil/clock_dilation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "clockdil/quadrature.hpp"
#include "clockdil/sparse.hpp"

namespace clockdil {
namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};

QuadratureOptions profile_quadrature(const DeltaProfile& p, QuadratureOptions base) {
  base.kind = QuadratureKind::Panels;
  base.breakpoints.clear();
  const double r = p.support();
  for (int k = -4; k <= 4; ++k) base.breakpoints.push_back(p.bias + k * r / 4.0);
  return base;
}

void check_width(const ClockState& state, double resolution, bool strict, const char* what) {
  if (state.kind != ClockKind::PureSqrtDelta && state.kind != ClockKind::MixedDiagonal) return;
  const double w = state.profile.width;
  if (!(w > 0.0)) throw Error(ErrorKind::InvalidArgument, "clock profile width must be positive");
  if (strict && w < resolution)
    throw Error(ErrorKind::UnderResolved,
                fmt::format("under-resolved clock: width {:.3g} below {} {:.3g}", w, what,
                            resolution));
}

void finish_moments(PreparedClock& out, const std::vector<double>& s_mean,
                    const std::vector<double>& s2_mean) {
  double m = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < out.components.size(); ++k) {
    m += out.components[k].weight * s_mean[k];
    m2 += out.components[k].weight * s2_mean[k];
  }
  out.mean = m;
  out.second_moment = m2 - m * m;
}

PreparedClock prepare_grid(const GridClock& g, const ClockState& state, const PrepareOptions& opts) {
  check_width(state, g.step(), opts.strict_resolution, "grid spacing");
  const auto n = static_cast<Eigen::Index>(g.nodes);
  const double ds = g.step();
  PreparedClock out;
  RealVector w(n);
  Vector amp;
  switch (state.kind) {
    case ClockKind::PureSqrtDelta:
    case ClockKind::MixedDiagonal:
      for (Eigen::Index i = 0; i < n; ++i) w(i) = state.profile(g.node(i)) * ds;
      break;
    case ClockKind::Uniform:
      w.setConstant(1.0);
      break;
    case ClockKind::Custom:
      if (state.amplitudes.size() > 0) {
        amp = state.amplitudes;
      } else {
        w = state.weights;
      }
      break;
  }
  if (amp.size() == 0 && w.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "clock weights do not match the grid");
  if (amp.size() != 0 && amp.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "clock amplitudes do not match the grid");
  if (amp.size() == 0 && (w.array() < 0.0).any())
    throw Error(ErrorKind::InvalidArgument, "clock weights must be nonnegative");

  std::vector<double> s1, s2;
  if (state.kind == ClockKind::PureSqrtDelta || amp.size() != 0) {
    if (amp.size() == 0) {
      out.leakage = std::max(0.0, 1.0 - w.sum());
      amp = w.cwiseSqrt().cast<cplx>();
    }
    const double nrm = amp.norm();
    if (!(nrm > 0.0)) throw Error(ErrorKind::InvalidArgument, "clock state is zero");
    amp /= nrm;
    out.pure = true;
    double m = 0.0, m2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = std::norm(amp(i));
      m += p * g.node(i);
      m2 += p * g.node(i) * g.node(i);
    }
    out.components.push_back({1.0, amp});
    s1.push_back(m);
    s2.push_back(m2);
  } else {
    const double total = w.sum();
    if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "clock weights are zero");
    out.pure = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w(i) <= 0.0) continue;
      Vector e = Vector::Zero(n);
      e(i) = 1.0;
      out.components.push_back({w(i) / total, std::move(e)});
      s1.push_back(g.node(i));
      s2.push_back(g.node(i) * g.node(i));
    }
  }
  finish_moments(out, s1, s2);
  return out;
}

PreparedClock prepare_galerkin(const GalerkinClock& c, const ClockState& state,
                               const PrepareOptions& opts) {
  const HermiteBasis basis = c.basis();
  check_width(state, basis.resolution(), opts.strict_resolution, "basis resolution");
  const auto n = static_cast<Eigen::Index>(c.size);
  PreparedClock out;
  Matrix rho;
  Vector amp;
  switch (state.kind) {
    case ClockKind::PureSqrtDelta: {
      const DeltaProfile p = state.profile;
      auto proj = project_state([p](double s) { return cplx(std::sqrt(p(s))); }, basis, 1.0,
                                profile_quadrature(p, opts.quadrature));
      out.leakage = proj.leakage;
      amp = std::move(proj.coefficients);
      break;
    }
    case ClockKind::MixedDiagonal: {
      const DeltaProfile p = state.profile;
      rho = multiplication_operator([p](double s) { return cplx(p(s)); }, basis,
                                    profile_quadrature(p, opts.quadrature));
      break;
    }
    case ClockKind::Uniform:
      rho = Matrix::Identity(n, n);
      break;
    case ClockKind::Custom:
      if (state.amplitudes.size() > 0) {
        amp = state.amplitudes;
      } else {
        if (state.weights.size() != n)
          throw Error(ErrorKind::DimensionMismatch, "clock weights do not match the basis");
        if ((state.weights.array() < 0.0).any())
          throw Error(ErrorKind::InvalidArgument, "clock weights must be nonnegative");
        rho = state.weights.cast<cplx>().asDiagonal();
      }
      break;
  }

  const Matrix x = position_matrix(basis);
  const Matrix x2 = position_power_matrix(basis, 2);
  std::vector<double> s1, s2;
  auto moments = [&](const Vector& v) {
    s1.push_back(v.dot(x * v).real());
    s2.push_back(v.dot(x2 * v).real());
  };
  if (amp.size() != 0) {
    if (amp.size() != n) throw Error(ErrorKind::DimensionMismatch, "clock amplitudes do not match the basis");
    const double nrm = amp.norm();
    if (!(nrm > 0.0)) throw Error(ErrorKind::InvalidArgument, "clock state is zero");
    amp /= nrm;
    out.pure = true;
    moments(amp);
    out.components.push_back({1.0, std::move(amp)});
  } else {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    if (!(tr > 0.0)) throw Error(ErrorKind::InvalidArgument, "clock density has zero trace");
    rho /= tr;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(rho);
    const RealVector& lam = eig.eigenvalues();
    const double cut = 1e-14 * lam.maxCoeff();
    double kept = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
      if (lam(k) > cut) kept += lam(k);
    out.pure = false;
    for (Eigen::Index k = n - 1; k >= 0; --k) {
      if (lam(k) <= cut) continue;
      Vector v = eig.eigenvectors().col(k);
      moments(v);
      out.components.push_back({lam(k) / kept, std::move(v)});
    }
  }
  finish_moments(out, s1, s2);
  return out;
}

Matrix clock_momentum(const ClockSpec& clock) {
  return std::visit(Overloaded{[](const GalerkinClock& c) { return momentum_matrix(c.basis()); },
                               [](const GridClock& g) -> Matrix {
                                 if (g.scheme == MomentumScheme::Spectral)
                                   return spectral_momentum(g.nodes, g.step());
                                 return Matrix(upwind_momentum(g.nodes, g.step()));
                               }},
                    clock);
}

// lambda(S) for a real time coefficient on the Galerkin clock.
Matrix lambda_of_clock(const TimeFunction& f, const HermiteBasis& basis,
                       const QuadratureOptions& quad) {
  if (f.is_polynomial()) {
    std::vector<cplx> c;
    for (cplx v : *f.coefficients()) c.emplace_back(v.real());
    return polynomial_in_position(basis, c);
  }
  const ComplexFunction& fn = f.function();
  return multiplication_operator([fn](double s) { return cplx(fn(s).real()); }, basis, quad);
}

DilatedSystem assemble_galerkin(const Generator& gen, const GalerkinClock& c,
                                const DilationOptions& opts) {
  if (!gen.separable())
    throw Error(ErrorKind::NonSeparable,
                "Galerkin clock needs a generator written as a finite sum lambda_k(t) h_k");
  const HermiteBasis basis = c.basis();
  const auto ns = static_cast<Eigen::Index>(gen.dim());
  const Eigen::Index ne = opts.eta ? static_cast<Eigen::Index>(opts.eta->size()) : 1;
  const SparseMatrix eta_id = sparse_identity(ne);
  const SparseMatrix eta_x = opts.eta ? to_sparse(position_matrix(*opts.eta)) : eta_id;

  SparseMatrix hbar = kron(sparse_identity(ne * ns), to_sparse(momentum_matrix(basis)));
  auto add_terms = [&](const std::vector<HermitianTerm>& terms, const SparseMatrix& left) {
    for (const auto& term : terms) {
      const SparseMatrix lam = to_sparse(lambda_of_clock(term.coefficient, basis, opts.quadrature));
      hbar += kron_all({left, term.matrix, lam});
    }
  };
  add_terms(gen.a1_terms(), eta_id);
  add_terms(gen.a2_terms(), eta_x);
  hbar.prune(cplx(0.0), 0.0);

  DilatedSystem sys;
  sys.hbar = std::move(hbar);
  if (opts.eta) sys.layout.push_back(opts.eta->size());
  sys.layout.push_back(gen.dim());
  sys.layout.push_back(c.size);
  sys.clock = c;
  return sys;
}

DilatedSystem assemble_grid(const Generator& gen, const GridClock& g, const DilationOptions& opts) {
  const auto nc = static_cast<Eigen::Index>(g.nodes);
  const auto ns = static_cast<Eigen::Index>(gen.dim());
  const Eigen::Index ne = opts.eta ? static_cast<Eigen::Index>(opts.eta->size()) : 1;
  const Eigen::Index nr = ne * ns;
  const Matrix eta_x = opts.eta ? position_matrix(*opts.eta) : Matrix::Identity(1, 1);

  std::vector<Eigen::Triplet<cplx>> trip;
  const Matrix p = clock_momentum(g);
  for (Eigen::Index r = 0; r < nr; ++r)
    for (Eigen::Index i = 0; i < nc; ++i)
      for (Eigen::Index j = 0; j < nc; ++j)
        if (p(i, j) != cplx(0.0)) trip.emplace_back(r * nc + i, r * nc + j, p(i, j));

  for (Eigen::Index i = 0; i < nc; ++i) {
    const double s = g.node(static_cast<std::size_t>(i));
    if (s < 0.0) continue;
    Matrix block = kron(Matrix::Identity(ne, ne), gen.a1(s));
    if (opts.eta) block += kron(eta_x, gen.a2(s));
    for (Eigen::Index r = 0; r < nr; ++r)
      for (Eigen::Index q = 0; q < nr; ++q)
        if (block(r, q) != cplx(0.0)) trip.emplace_back(r * nc + i, q * nc + i, block(r, q));
  }
  DilatedSystem sys;
  sys.hbar.resize(nr * nc, nr * nc);
  sys.hbar.setFromTriplets(trip.begin(), trip.end());
  if (opts.eta) sys.layout.push_back(opts.eta->size());
  sys.layout.push_back(gen.dim());
  sys.layout.push_back(g.nodes);
  sys.clock = g;
  return sys;
}

void check_window(const ClockSpec& clock, double t) {
  if (const auto* g = std::get_if<GridClock>(&clock); g && t > g->hi())
    throw Error(ErrorKind::WindowExceeded,
                fmt::format("clock window exceeded: t = {} beyond s_max = {}", t, g->hi()));
}

Vector localized_vector(const ClockSpec& clock, double s) {
  return std::visit(
      Overloaded{[s](const GalerkinClock& c) -> Vector {
                   RealVector v = c.basis().column(s);
                   const double nrm = v.norm();
                   if (!(nrm > 0.0))
                     throw Error(ErrorKind::RecoveryFailure, "clock basis vanishes at s");
                   return (v / nrm).cast<cplx>();
                 },
                 [s](const GridClock& g) -> Vector {
                   const double pos = (s - g.lo()) / g.step();
                   if (pos < -0.5 || pos > g.nodes - 0.5)
                     throw Error(ErrorKind::WindowExceeded, "measurement point outside the clock window");
                   const auto i = static_cast<Eigen::Index>(
                       std::clamp<double>(std::round(pos), 0.0, g.nodes - 1.0));
                   Vector v = Vector::Zero(static_cast<Eigen::Index>(g.nodes));
                   v(i) = 1.0;
                   return v;
                 }},
      clock);
}

}  // namespace

GridClock covering_grid(std::size_t nodes, double lo, double hi, MomentumScheme scheme) {
  if (nodes < 3 || !(lo <= 0.0 && hi >= 0.0 && hi > lo))
    throw Error(ErrorKind::InvalidArgument, "covering_grid: need nodes >= 3 and lo <= 0 <= hi");
  const double ds = (hi - lo) / (nodes - 2.0);
  GridClock g;
  g.nodes = nodes;
  g.spacing = ds;
  g.first_index = static_cast<long>(std::floor(lo / ds));
  g.scheme = scheme;
  return g;
}

std::size_t clock_dimension(const ClockSpec& clock) {
  return std::visit(Overloaded{[](const GalerkinClock& c) { return c.size; },
                               [](const GridClock& g) { return g.nodes; }},
                    clock);
}

PreparedClock prepare_clock(const ClockSpec& clock, const ClockState& state,
                            const PrepareOptions& opts) {
  return std::visit(
      Overloaded{[&](const GalerkinClock& c) { return prepare_galerkin(c, state, opts); },
                 [&](const GridClock& g) { return prepare_grid(g, state, opts); }},
      clock);
}

SparseMatrix upwind_momentum(std::size_t n, double ds) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "upwind_momentum: need n >= 2");
  std::vector<Eigen::Triplet<cplx>> trip;
  const cplx d = -kI / ds;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    trip.emplace_back(row, row, d);
    trip.emplace_back(row, static_cast<Eigen::Index>((i + n - 1) % n), -d);
  }
  SparseMatrix p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

Matrix spectral_momentum(std::size_t n, double ds) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "spectral_momentum: need n >= 2");
  const auto m = static_cast<Eigen::Index>(n);
  const double two_pi = 2.0 * std::numbers::pi;
  // Row of the circulant: c_d = (1/n) sum_q k_q e^{2 pi i q d / n}.
  Vector c = Vector::Zero(m);
  for (Eigen::Index d = 0; d < m; ++d) {
    cplx acc = 0.0;
    for (Eigen::Index q = 0; q < m; ++q) {
      const Eigen::Index qs = 2 * q < m ? q : q - m;
      const double k = two_pi * qs / (m * ds);
      acc += k * std::polar(1.0, two_pi * static_cast<double>((q * d) % m) / m);
    }
    c(d) = acc / static_cast<double>(m);
  }
  Matrix p(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) p(i, j) = c(((i - j) % m + m) % m);
  return p;
}

Matrix DilatedSystem::dense() const {
  if (dim() > dense_cap)
    throw Error(ErrorKind::Unsupported,
                fmt::format("dense assembly refused: dimension {} above cap {}", dim(), dense_cap));
  return Matrix(hbar);
}

DilatedSystem build_dilated(const Generator& gen, const ClockSpec& clock,
                            const DilationOptions& opts) {
  if (!opts.eta && gen.has_dissipation())
    throw Error(ErrorKind::InvalidArgument,
                "generator has a dissipative part; include the eta mode");
  DilatedSystem sys = std::visit(
      Overloaded{[&](const GalerkinClock& c) { return assemble_galerkin(gen, c, opts); },
                 [&](const GridClock& g) { return assemble_grid(gen, g, opts); }},
      clock);
  sys.dense_cap = opts.dense_cap;
  sys.hermitian_defect = hermitian_defect(sys.hbar);
  return sys;
}

DilatedSystem build_dilated(const OperatorExpr& expr, const BasisMap& bases,
                            const ClockSpec& clock, const DilationOptions& opts) {
  return build_dilated(split_generator(expr, bases, opts.quadrature), clock, opts);
}

Propagator::Propagator(const DilatedSystem& sys, const EvolveOptions& opts)
    : sys_(&sys), method_(opts.method), krylov_(opts.krylov) {
  if (method_ == EvolveMethod::Auto)
    method_ = sys.hermitian() && sys.dim() <= opts.dense_threshold ? EvolveMethod::DenseEig
                                                                   : EvolveMethod::Krylov;
  if (method_ == EvolveMethod::DenseEig) {
    if (!sys.hermitian())
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("dense eigen-propagation needs a Hermitian matrix (defect {:.3g})",
                              sys.hermitian_defect));
    spectral_.emplace(sys.dense());
  }
  krylov_.hermitian = sys.hermitian();
}

Vector Propagator::apply(const Vector& psi, double t) const {
  if (static_cast<std::size_t>(psi.size()) != sys_->dim())
    throw Error(ErrorKind::DimensionMismatch, "state does not match the dilated system");
  check_window(sys_->clock, t);
  if (t == 0.0) return psi;
  if (spectral_) return spectral_->apply(psi, t);
  return krylov_expmv(sys_->hbar, psi, t, krylov_).state;
}

Vector evolve(const DilatedSystem& sys, const Vector& psi, double t, const EvolveOptions& opts) {
  return Propagator(sys, opts).apply(psi, t);
}

std::vector<WeightedVector> initial_ensemble(const PreparedClock& clock, const Vector& rest) {
  std::vector<WeightedVector> out;
  out.reserve(clock.components.size());
  for (const auto& c : clock.components) {
    const Eigen::Index nc = c.vector.size();
    Vector v(rest.size() * nc);
    for (Eigen::Index r = 0; r < rest.size(); ++r) v.segment(r * nc, nc) = rest(r) * c.vector;
    out.push_back({c.weight, std::move(v)});
  }
  return out;
}

std::vector<WeightedVector> evolve_ensemble(const Propagator& prop,
                                            const std::vector<WeightedVector>& ensemble, double t) {
  std::vector<WeightedVector> out;
  out.reserve(ensemble.size());
  for (const auto& e : ensemble) out.push_back({e.weight, prop.apply(e.vector, t)});
  return out;
}

Matrix trace_out_clock(const std::vector<WeightedVector>& ensemble, std::size_t clock_dim) {
  const auto nc = static_cast<Eigen::Index>(clock_dim);
  if (ensemble.empty()) throw Error(ErrorKind::InvalidArgument, "empty ensemble");
  const Eigen::Index n = ensemble.front().vector.size();
  if (nc == 0 || n % nc != 0)
    throw Error(ErrorKind::DimensionMismatch, "state size is not a multiple of the clock dimension");
  const Eigen::Index nr = n / nc;
  Matrix rho = Matrix::Zero(nr, nr);
  for (const auto& e : ensemble) {
    if (e.vector.size() != n) throw Error(ErrorKind::DimensionMismatch, "ensemble sizes differ");
    // column r holds the clock amplitudes of rest index r
    Eigen::Map<const Matrix> m(e.vector.data(), nc, nr);
    rho.noalias() += e.weight * (m.transpose() * m.conjugate());
  }
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw Error(ErrorKind::RecoveryFailure, "reduced state has zero trace");
  return rho / tr;
}

Matrix trace_out_clock(const Vector& state, std::size_t clock_dim) {
  return trace_out_clock(std::vector<WeightedVector>{{1.0, state}}, clock_dim);
}

ClockMeasurement measure_clock_at(const std::vector<WeightedVector>& ensemble, double s,
                                  const ClockSpec& clock) {
  const Vector v = localized_vector(clock, s);
  const Eigen::Index nc = v.size();
  if (ensemble.empty()) throw Error(ErrorKind::InvalidArgument, "empty ensemble");
  const Eigen::Index n = ensemble.front().vector.size();
  if (n % nc != 0) throw Error(ErrorKind::DimensionMismatch, "state does not match the clock");
  const Eigen::Index nr = n / nc;
  ClockMeasurement out;
  out.state = Matrix::Zero(nr, nr);
  double total = 0.0;
  for (const auto& e : ensemble) {
    Eigen::Map<const Matrix> m(e.vector.data(), nc, nr);
    const Vector cond = m.transpose() * v.conjugate();
    out.state.noalias() += e.weight * cond * cond.adjoint();
    out.probability += e.weight * cond.squaredNorm();
    total += e.weight * e.vector.squaredNorm();
  }
  out.probability /= total;
  if (!(out.probability > 1e-300))
    throw Error(ErrorKind::RecoveryFailure, "clock outcome has zero probability");
  out.state /= out.state.trace().real();
  return out;
}

Matrix commuting_protocol(const Matrix& h, const RealFunction& g, const Vector& psi0, double t,
                          const ClockSpec& clock, const ClockState& state,
                          const PrepareOptions& opts) {
  if (h.rows() != psi0.size()) throw Error(ErrorKind::DimensionMismatch, "h and psi0 differ in size");
  check_window(clock, t);
  const PreparedClock prepared = prepare_clock(clock, state, opts);

  const Matrix p = clock_momentum(clock);
  const Matrix u1 = hermitian_defect(p) < 1e-12 ? SpectralPropagator(p).unitary(t)
                                                : dense_expm(p, t);
  auto big_g = [&g](double s) {
    if (std::abs(s) < 1e-14) return g(0.0);
    return integrate(g, 0.0, s) / s;
  };
  // Eigenbasis of G(S) on the clock: nodes for the grid, a Galerkin matrix otherwise.
  Matrix v;
  RealVector gamma;
  std::visit(Overloaded{[&](const GalerkinClock& c) {
                          const Matrix gm = multiplication_operator(
                              [&](double s) { return cplx(big_g(s)); }, c.basis(), opts.quadrature);
                          Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (gm + gm.adjoint()));
                          v = eig.eigenvectors();
                          gamma = eig.eigenvalues();
                        },
                        [&](const GridClock& gc) {
                          const auto n = static_cast<Eigen::Index>(gc.nodes);
                          v = Matrix::Identity(n, n);
                          gamma.resize(n);
                          for (Eigen::Index i = 0; i < n; ++i) gamma(i) = big_g(gc.node(i));
                        }},
             clock);

  Eigen::SelfAdjointEigenSolver<Matrix> heig(0.5 * (h + h.adjoint()));
  const Vector psi_h = heig.eigenvectors().adjoint() * psi0;
  const Eigen::Index nr = h.rows();
  Matrix rho = Matrix::Zero(nr, nr);
  Vector weight = Vector::Zero(gamma.size());
  for (const auto& c : prepared.components)
    weight += (c.weight * (v.adjoint() * (u1 * c.vector)).cwiseAbs2()).cast<cplx>();
  for (Eigen::Index j = 0; j < gamma.size(); ++j) {
    const double wj = weight(j).real();
    if (wj < 1e-300) continue;
    Vector phase(nr);
    for (Eigen::Index k = 0; k < nr; ++k)
      phase(k) = std::polar(1.0, -gamma(j) * t * heig.eigenvalues()(k));
    const Vector phi = heig.eigenvectors() * phase.cwiseProduct(psi_h);
    rho.noalias() += wj * phi * phi.adjoint();
  }
  return rho / rho.trace().real();
}

}  // namespace clockdil
