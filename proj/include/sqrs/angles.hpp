#pragma once

#include <cmath>
#include <numbers>

namespace sqrs {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double pi = std::numbers::pi;
inline constexpr double half_pi = std::numbers::pi / 2.0;

/// Reduce an angle to [0, 2*pi). Branchless remainder; exact for multiples.
inline double wrap_angle(double x) {
  double r = x - two_pi * std::floor(x / two_pi);
  return (r >= two_pi) ? 0.0 : r;
}

/// Reduce an angle to (-pi, pi].
inline double wrap_signed(double x) {
  double r = wrap_angle(x);
  return (r > pi) ? r - two_pi : r;
}

/// Shortest distance between two angles on the circle, in [0, pi].
inline double angular_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return (d > pi) ? two_pi - d : d;
}

}  // namespace sqrs
