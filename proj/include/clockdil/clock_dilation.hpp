#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "clockdil/delta_profile.hpp"
#include "clockdil/galerkin_basis.hpp"
#include "clockdil/krylov.hpp"
#include "clockdil/operator_algebra.hpp"
#include "clockdil/types.hpp"

namespace clockdil {

enum class MomentumScheme { Upwind, Spectral };

struct GalerkinClock {
  std::size_t size = 32;
  double scale = 0.2;
  HermiteBasis basis() const { return HermiteBasis(size, scale); }
};

// Nodes s_i = (first_index + i) * spacing for i = 0..nodes-1, periodic.
struct GridClock {
  std::size_t nodes = 64;
  double spacing = 0.0;  // 0 -> 1/(nodes+1)
  std::optional<long> first_index{};  // default -nodes/2
  MomentumScheme scheme = MomentumScheme::Spectral;

  double step() const noexcept { return spacing > 0.0 ? spacing : 1.0 / (nodes + 1.0); }
  long first() const noexcept { return first_index ? *first_index : -static_cast<long>(nodes / 2); }
  double node(std::size_t i) const noexcept { return (first() + static_cast<long>(i)) * step(); }
  double lo() const noexcept { return node(0); }
  double hi() const noexcept { return node(nodes - 1); }
};

// Smallest spacing whose nodes cover [lo, hi] with the origin on a node.
GridClock covering_grid(std::size_t nodes, double lo, double hi,
                        MomentumScheme scheme = MomentumScheme::Spectral);

using ClockSpec = std::variant<GalerkinClock, GridClock>;

std::size_t clock_dimension(const ClockSpec& clock);

enum class ClockKind { PureSqrtDelta, MixedDiagonal, Uniform, Custom };

struct ClockState {
  ClockKind kind = ClockKind::PureSqrtDelta;
  DeltaProfile profile{};
  Vector amplitudes{};     // Custom pure
  RealVector weights{};    // Custom diagonal

  static ClockState pure(DeltaProfile p) { return {ClockKind::PureSqrtDelta, p, {}, {}}; }
  static ClockState mixed(DeltaProfile p) { return {ClockKind::MixedDiagonal, p, {}, {}}; }
  static ClockState uniform() { return {ClockKind::Uniform, {}, {}, {}}; }
  static ClockState custom(Vector a) { return {ClockKind::Custom, {}, std::move(a), {}}; }
  static ClockState custom_diagonal(RealVector w) { return {ClockKind::Custom, {}, {}, std::move(w)}; }
};

struct WeightedVector {
  double weight = 1.0;
  Vector vector;
};

// Initial clock as a convex combination of unit vectors in the clock space.
struct PreparedClock {
  std::vector<WeightedVector> components;
  bool pure = true;
  double mean = 0.0;
  double second_moment = 0.0;  // about the mean
  double leakage = 0.0;        // pure Galerkin only
};

struct PrepareOptions {
  bool strict_resolution = true;
  QuadratureOptions quadrature{};
};

PreparedClock prepare_clock(const ClockSpec& clock, const ClockState& state,
                            const PrepareOptions& opts = {});

// P = -i D with (D w)_i = (w_i - w_{i-1}) / ds, periodic.
SparseMatrix upwind_momentum(std::size_t n, double ds);
// F^dag diag(k) F, Hermitian.
Matrix spectral_momentum(std::size_t n, double ds);

struct DilationOptions {
  std::optional<HermiteBasis> eta{};  // set to include the eta mode
  std::size_t dense_cap = 16384;
  QuadratureOptions quadrature{};
};

struct DilatedSystem {
  SparseMatrix hbar;
  std::vector<std::size_t> layout;  // (eta?), system, clock
  ClockSpec clock;
  double hermitian_defect = 0.0;
  std::size_t dense_cap = 16384;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(hbar.rows()); }
  std::size_t clock_dim() const noexcept { return layout.back(); }
  std::size_t rest_dim() const noexcept { return dim() / clock_dim(); }
  bool hermitian() const noexcept { return hermitian_defect < 1e-12; }
  // Throws Unsupported above dense_cap.
  Matrix dense() const;
};

DilatedSystem build_dilated(const Generator& gen, const ClockSpec& clock,
                            const DilationOptions& opts = {});
DilatedSystem build_dilated(const OperatorExpr& expr, const BasisMap& bases,
                            const ClockSpec& clock, const DilationOptions& opts = {});

enum class EvolveMethod { Auto, DenseEig, Krylov };

struct EvolveOptions {
  EvolveMethod method = EvolveMethod::Auto;
  std::size_t dense_threshold = 512;  // Auto picks DenseEig up to here
  KrylovOptions krylov{};
};

// Reuses one decomposition (dense) or the sparse matrix (Krylov) for many applications.
class Propagator {
 public:
  explicit Propagator(const DilatedSystem& sys, const EvolveOptions& opts = {});
  Vector apply(const Vector& psi, double t) const;
  EvolveMethod method() const noexcept { return method_; }

 private:
  const DilatedSystem* sys_;
  EvolveMethod method_;
  KrylovOptions krylov_;
  std::optional<SpectralPropagator> spectral_;
};

Vector evolve(const DilatedSystem& sys, const Vector& psi, double t, const EvolveOptions& opts = {});

// psi_rest (x) clock component for every component.
std::vector<WeightedVector> initial_ensemble(const PreparedClock& clock, const Vector& rest);

std::vector<WeightedVector> evolve_ensemble(const Propagator& prop,
                                            const std::vector<WeightedVector>& ensemble, double t);

// Reduced state on everything but the clock (last factor), unit trace.
Matrix trace_out_clock(const Vector& state, std::size_t clock_dim);
Matrix trace_out_clock(const std::vector<WeightedVector>& ensemble, std::size_t clock_dim);

struct ClockMeasurement {
  Matrix state;  // conditional state, unit trace
  double probability = 0.0;
};

// Project the clock onto the node nearest s (grid) or onto the normalized vector
// sum_n phi_n(s)|n> (Galerkin).
ClockMeasurement measure_clock_at(const std::vector<WeightedVector>& ensemble, double s,
                                  const ClockSpec& clock);

// Reduced system state after exp(-i t h (x) G(S)) exp(-i t 1 (x) P) applied to
// psi0 (x) clock, with G(s) = (1/s) int_0^s g.
Matrix commuting_protocol(const Matrix& h, const RealFunction& g, const Vector& psi0, double t,
                          const ClockSpec& clock, const ClockState& state,
                          const PrepareOptions& opts = {});

}  // namespace clockdil
