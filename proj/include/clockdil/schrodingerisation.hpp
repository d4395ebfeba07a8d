#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "clockdil/clock_dilation.hpp"
#include "clockdil/galerkin_basis.hpp"
#include "clockdil/operator_algebra.hpp"
#include "clockdil/types.hpp"

namespace clockdil {

// The warped-phase ancilla. States are stored in the eta representation; `scale` is the
// Hermite scale of the xi representation, so the eta basis has scale 1/scale.
struct EtaMode {
  std::size_t size = 64;
  double scale = 2.0;

  HermiteBasis xi_basis() const { return HermiteBasis(size, scale); }
  HermiteBasis eta_basis() const { return xi_basis().conjugate(); }
};

// t -> eta (x) A2(t) + I (x) A1(t) on eta (x) system.
MatrixProvider extend_generator(const Generator& gen, const EtaMode& eta);

struct XiState {
  Vector eta_coefficients;
  Vector xi_coefficients;
  double leakage = 0.0;  // 1 - |c|^2, the exact norm being 1
};

// exp(-|xi|) projected in xi and mapped to eta. Leakage above 0.05 is UnderResolved.
XiState xi_state(const EtaMode& eta);

enum class RecoveryMode { ProjectAndNormalize, PointSlice };

struct RecoverySpec {
  double a = 0.0;
  double b = 2.0;  // may be +infinity
  RecoveryMode mode = RecoveryMode::ProjectAndNormalize;
  double xi0 = 1.0;  // PointSlice only
};

struct Recovered {
  Matrix state;  // unit trace
  double probability = 0.0;
};

// Density (or pure state) on eta (x) system in the eta representation.
Recovered recover(const Matrix& rho, const EtaMode& eta, const RecoverySpec& spec = {});
Recovered recover(const Vector& psi, const EtaMode& eta, const RecoverySpec& spec = {});

struct Observable {
  std::string name;
  Matrix op;
};

double expectation(const Matrix& rho, const Matrix& op);

struct PipelineConfig {
  ClockSpec clock = GalerkinClock{};
  ClockState clock_state = ClockState::pure({ProfileKind::Gaussian, 0.05});
  std::optional<EtaMode> eta{};  // required when the generator is dissipative
  RecoverySpec recovery{};
  PrepareOptions prepare{};
  EvolveOptions evolve{};
  std::size_t dense_cap = 16384;
  QuadratureOptions quadrature{};
};

struct PipelineRecord {
  double t = 0.0;
  Matrix state;                  // recovered system state
  double success_probability = 1.0;
  double dilated_norm = 1.0;     // mean ensemble norm after evolution
  std::vector<double> values;    // one per observable
};

struct PipelineResult {
  std::size_t dimension = 0;
  double hermitian_defect = 0.0;
  double clock_leakage = 0.0;
  double clock_second_moment = 0.0;
  double xi_leakage = 0.0;
  std::vector<PipelineRecord> records;
};

// Schrodingerise (when eta is set), dilate, prepare the clock, evolve to each time in
// increasing order, trace out the clock, recover, evaluate observables.
PipelineResult full_pipeline(const Generator& gen, const Vector& u0, const std::vector<double>& times,
                             const PipelineConfig& config,
                             const std::vector<Observable>& observables = {});

}  // namespace clockdil
