#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

namespace clockdil::harness {

inline constexpr const char* kCsvHeader =
    "t,omega,observable,value,exact,abs_err,fidelity,pred_one_minus_fid,succ_prob,wall_ms";

// Missing quantities are NaN and print as "nan".
struct ReportRow {
  double t = 0.0;
  double omega = 0.0;
  std::string observable;
  double value = 0.0;
  double exact = 0.0;
  double abs_err = 0.0;
  double fidelity = 0.0;
  double pred_one_minus_fid = 0.0;
  double succ_prob = 1.0;
  double wall_ms = 0.0;
  // trace distance minus sqrt(1 - fidelity); not part of the CSV
  double td_margin = std::numeric_limits<double>::quiet_NaN();
};

struct AssertionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string name;
  std::vector<ReportRow> rows;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<AssertionResult> assertions;

  bool passed() const;
};

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows);
// Summary plus assertion outcomes.
nlohmann::json summary_json(const ExperimentReport& report);
void write_json(const std::filesystem::path& path, const ExperimentReport& report);

struct ErrorLawFit {
  double slope = 0.0;
  double intercept = 0.0;         // log(1 - Fid) at log(omega) = 0
  double prefactor = 0.0;         // geometric mean of (1 - Fid)/omega^2
  double prefactor_ratio = 0.0;   // prefactor / C when C is given
  std::size_t points = 0;
};

// Least squares of log(1 - Fid) on log(omega) over the points with 1 - Fid > 1e-12.
// Fewer than three such points is a DegenerateFit error.
ErrorLawFit fit_error_law(const std::vector<double>& omegas, const std::vector<double>& one_minus_fid,
                          double c = 0.0);

}  // namespace clockdil::harness
