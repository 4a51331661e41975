#pragma once

#include <numbers>

namespace mirrorsim {

inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Mirror tilt direction. Positive angles tilt toward the right electrode.
enum class Side : int { left = -1, none = 0, right = 1 };

constexpr double sign_of(Side s) { return static_cast<double>(static_cast<int>(s)); }

}  // namespace mirrorsim
