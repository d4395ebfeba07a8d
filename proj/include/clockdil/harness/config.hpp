#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clockdil/clock_dilation.hpp"
#include "clockdil/delta_profile.hpp"

namespace clockdil::harness {

enum class ExperimentKind {
  Hamiltonian2Level,
  OpenOde,
  FokkerPlanck,
  OmegaSweep,
  CommutingProtocol,
  Consistency,
  Complexity,
  Pde,
};

std::string_view experiment_name(ExperimentKind kind) noexcept;

enum class ClockScheme { Galerkin, Spectral, Upwind };

struct Numerics {
  std::size_t n_s = 32;
  double scale_s = 0.2;
  std::size_t n_eta = 64;
  double scale_eta = 2.0;
  std::size_t n_u = 32;
  double scale_u = 0.5;
  ClockScheme clock = ClockScheme::Galerkin;
  ClockKind clock_state = ClockKind::PureSqrtDelta;
  ProfileKind profile = ProfileKind::Gaussian;
  std::vector<double> omegas{0.2, 0.1, 0.05, 0.02, 0.01};
  EvolveMethod method = EvolveMethod::Auto;
  double krylov_tol = 1e-10;
  bool strict_resolution = true;
  double recovery_a = 0.0;
  double recovery_b = 2.0;
  std::size_t workers = 0;  // 0 -> hardware concurrency
};

// One linear term of a custom PDE: order, axis, lambda(t), f(x).
struct PdeTerm {
  unsigned order = 1;
  std::size_t axis = 0;
  std::string time_expr = "1";
  std::string space_expr = "1";
};

struct Physics {
  double a = 1.0;
  std::string g = "s";
  std::string beta = "0";
  int fp_case = 0;  // 1..3 selects a preset (g, beta)
  double t_final = 0.5;
  std::size_t time_points = 21;
  std::vector<std::string> observables{};
  double initial_mean = 0.8;
  double initial_variance = 0.09;
  // custom PDE
  std::size_t pde_dim = 1;
  std::vector<PdeTerm> pde_terms{};
  std::optional<PdeTerm> pde_potential{};
};

struct Output {
  std::filesystem::path csv{};
  std::filesystem::path json{};
  std::uint64_t seed = 1;
  bool timing = false;  // fill wall_ms in the CSV (breaks byte-identical reruns)
};

struct Assertions {
  std::optional<double> max_abs_err{};
  std::optional<double> min_fidelity{};
  std::optional<double> slope_min{};
  std::optional<double> slope_max{};
  std::optional<double> prefactor_tol{};
  std::optional<double> fit_omega_min{};  // fit uses omega in [min, max]
  std::optional<double> fit_omega_max{};
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::Hamiltonian2Level;
  Numerics numerics{};
  Physics physics{};
  Output output{};
  Assertions checks{};
  bool full = false;
};

// INI text with sections experiment, numerics, physics, pde, output, assert.
// Errors name the offending field as section.key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<std::vector<double>> omegas{};
  std::optional<EvolveMethod> method{};
  std::optional<std::filesystem::path> out_dir{};
  bool full = false;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

// Checks cross-field constraints; throws Config with a field path.
void validate(const ExperimentConfig& config);

std::vector<double> parse_number_list(const std::string& text, const std::string& field);
EvolveMethod parse_method(const std::string& text, const std::string& field);

}  // namespace clockdil::harness
