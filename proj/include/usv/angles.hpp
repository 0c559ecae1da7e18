#pragma once

#include <cmath>

namespace usv {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) {
    a += 2.0 * kPi;
  }
  return a - kPi;
}

/// Shortest signed difference a - b, wrapped into (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace usv
