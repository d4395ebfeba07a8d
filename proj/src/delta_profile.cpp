#include "clockdil/delta_profile.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "clockdil/types.hpp"

namespace clockdil {

std::string_view profile_name(ProfileKind kind) noexcept {
  switch (kind) {
    case ProfileKind::Triangular: return "triangular";
    case ProfileKind::Cosine: return "cosine";
    case ProfileKind::Gaussian: return "gaussian";
  }
  return "?";
}

ProfileKind parse_profile(std::string_view name) {
  if (name == "triangular") return ProfileKind::Triangular;
  if (name == "cosine") return ProfileKind::Cosine;
  if (name == "gaussian") return ProfileKind::Gaussian;
  throw Error(ErrorKind::InvalidArgument, "unknown delta profile '" + std::string(name) + "'");
}

double DeltaProfile::operator()(double x) const {
  const double w = width;
  const double y = (x - bias) / w;
  switch (kind) {
    case ProfileKind::Triangular: return std::abs(y) <= 1.0 ? (1.0 - std::abs(y)) / w : 0.0;
    case ProfileKind::Cosine:
      return std::abs(y) <= 1.0 ? 0.5 * (1.0 + std::cos(std::numbers::pi * y)) / w : 0.0;
    case ProfileKind::Gaussian:
      return std::exp(-0.5 * y * y) / (std::sqrt(2.0 * std::numbers::pi) * w);
  }
  return 0.0;
}

double DeltaProfile::support() const {
  return kind == ProfileKind::Gaussian ? 12.0 * width : width;
}

double DeltaProfile::second_moment() const {
  const double w2 = width * width;
  switch (kind) {
    case ProfileKind::Triangular: return w2 / 6.0;
    case ProfileKind::Cosine: return w2 * (1.0 / 3.0 - 2.0 / (std::numbers::pi * std::numbers::pi));
    case ProfileKind::Gaussian: return w2;
  }
  return w2;
}

}  // namespace clockdil
