#pragma once

#include <string_view>

namespace clockdil {

enum class ProfileKind { Triangular, Cosine, Gaussian };

std::string_view profile_name(ProfileKind kind) noexcept;
ProfileKind parse_profile(std::string_view name);

// Regularized delta of width omega, optionally shifted by a bias.
// Triangular: (1 - |x/w|)/w, Cosine: (1 + cos(pi x/w))/(2w), both supported on |x| <= w.
// Gaussian: normal density with standard deviation w.
struct DeltaProfile {
  ProfileKind kind = ProfileKind::Gaussian;
  double width = 0.1;
  double bias = 0.0;

  double operator()(double x) const;
  // Half-width of the region that holds all but ~1e-30 of the mass.
  double support() const;
  // int x^2 delta(x) dx about the centre; this is the omega^2 of the error law.
  double second_moment() const;
};

}  // namespace clockdil
