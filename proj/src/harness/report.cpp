#include "clockdil/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "clockdil/types.hpp"

namespace clockdil::harness {
namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.12g}", v);
}

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

bool ExperimentReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.passed; });
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kCsvHeader << '\n';
  for (const ReportRow& r : rows)
    out << num(r.t) << ',' << num(r.omega) << ',' << r.observable << ',' << num(r.value) << ','
        << num(r.exact) << ',' << num(r.abs_err) << ',' << num(r.fidelity) << ',' << num(r.pred_one_minus_fid)
        << ',' << num(r.succ_prob) << ',' << num(r.wall_ms) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Config, fmt::format("cannot write '{}'", path.string()));
  write_csv(out, rows);
}

nlohmann::json summary_json(const ExperimentReport& report) {
  nlohmann::json j = report.summary;
  j["name"] = report.name;
  j["rows"] = report.rows.size();
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& a : report.assertions) checks.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  j["assertions"] = checks;
  j["passed"] = report.passed();
  double worst = 0.0;
  for (const auto& r : report.rows)
    if (std::isfinite(r.abs_err)) worst = std::max(worst, r.abs_err);
  j["max_abs_err"] = finite_or_null(worst);
  return j;
}

void write_json(const std::filesystem::path& path, const ExperimentReport& report) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Config, fmt::format("cannot write '{}'", path.string()));
  out << summary_json(report).dump(2) << '\n';
}

ErrorLawFit fit_error_law(const std::vector<double>& omegas, const std::vector<double>& one_minus_fid, double c) {
  if (omegas.size() != one_minus_fid.size())
    throw Error(ErrorKind::DimensionMismatch, "one error per omega");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < omegas.size(); ++i)
    if (one_minus_fid[i] > 1e-12 && omegas[i] > 0.0) {
      x.push_back(std::log(omegas[i]));
      y.push_back(std::log(one_minus_fid[i]));
    }
  if (x.size() < 3)
    throw Error(ErrorKind::DegenerateFit,
                fmt::format("error-law fit needs three points above the 1e-12 floor, have {}", x.size()));
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-14) throw Error(ErrorKind::DegenerateFit, "error-law fit needs distinct widths");
  ErrorLawFit f;
  f.points = x.size();
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double fixed = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) fixed += y[i] - 2.0 * x[i];
  f.prefactor = std::exp(fixed / n);
  f.prefactor_ratio = c > 0.0 ? f.prefactor / c : 0.0;
  return f;
}

}  // namespace clockdil::harness
