#pragma once

#include "mirrorsim/constants.hpp"
#include "mirrorsim/model.hpp"

namespace mirrorsim {

/// Everything the strip-model torque needs. Each strip of the electrode at
/// distance r from the axis acts as a parallel plate at local gap d0 − r·θ.
struct TorqueContext {
  double d0 = 0.0;         // m, gap_h + t_ox/eps_r
  double width = 0.0;      // m
  double r1 = 0.0;         // m
  double r2 = 0.0;         // m
  double theta_max = 0.0;  // rad
  double vacuum_permittivity = kVacuumPermittivity;

  /// Throws ConfigError unless d0 > gap_h and d0 − r2·theta_max > 0.
  static TorqueContext from(const DeviceConfig& device);

  /// |θ| below which the power series replaces the closed form.
  double series_threshold() const { return 1e-4 * theta_max; }
};

/// Electrostatic torque of one electrode at tilt `theta` toward it.
/// Negative angles (tilting away) are allowed down to −theta_max.
double torque_closed_form(double theta, double volts, const TorqueContext& ctx);

/// Independent oracle: adaptive Gauss–Kronrod integration of the strip integrand.
/// The Kronrod error estimate bottoms out near 4e-12 relative from roundoff, so
/// tolerances below ~1e-11 only burn subdivisions.
double torque_quadrature(double theta, double volts, const TorqueContext& ctx, double rel_tol = 1e-10);

/// Analytic ∂T/∂θ of torque_closed_form.
double dtorque_dtheta(double theta, double volts, const TorqueContext& ctx);

/// Net torque on the plate with both electrodes and their trapped charge.
/// Positive values rotate toward the right electrode.
double net_torque(double theta_signed, double v_left, double v_right, double sigma_left, double sigma_right,
                  const DeviceConfig& device);

/// Same as above with a prebuilt context (hot path of the integrator).
double net_torque(double theta_signed, double v_left, double v_right, double sigma_left, double sigma_right,
                  const DeviceConfig& device, const TorqueContext& ctx);

/// Field across the oxide in the landed contact region, V/m.
double contact_field(double v_effective, const OxideParams& oxide);

}  // namespace mirrorsim
