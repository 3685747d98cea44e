// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <numbers>

namespace selfsteer {

// Azimuth state: unwrapped angle plus instantaneous angular velocity.
struct AzimuthState {
  double theta = 0.0;      // rad, unwrapped
  double theta_dot = 0.0;  // rad/s
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrap to (-pi, pi].
inline double wrap_pi(double a) {
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

// Wrap to [0, 2*pi).
inline double wrap_two_pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

}  // namespace selfsteer
