#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mirrorsim/electrostatics.hpp"
#include "mirrorsim/model.hpp"

namespace mirrorsim {

/// Single-electrode static balance g(θ) = k·θ − T(θ, V − Vsh(σ)).
/// The opposite electrode is grounded throughout this module.

struct EquilibriumPoint {
  double theta = 0.0;
  bool stable = false;
};

struct QuasiStaticOptions {
  int scan_points = 2048;
  double angle_tol_frac = 1e-9;  // bisection width, fraction of theta_max
  double voltage_tol = 1e-8;     // V
  double voltage_cap = 1e4;      // V
};

struct PullIn {
  double voltage = 0.0;  // V_pi
  double theta = 0.0;    // fold angle theta_pin
};

/// Release (maintaining) voltage on a falling sweep. `voltage` is always the
/// landed-balance voltage Vsh + V_m,0; `stuck` reports that the trapped charge
/// alone holds the mirror at V = 0, so release from a grounded state is impossible.
struct Release {
  double voltage = 0.0;
  bool stuck = false;
};

struct HysteresisResult {
  std::vector<std::pair<double, double>> up_branch;    // (V, θ)
  std::vector<std::pair<double, double>> down_branch;  // (V, θ), V decreasing
  std::optional<double> v_pi;       // first swept voltage found landed
  std::optional<double> theta_pin;  // last stable angle before the jump
  std::optional<double> v_m;        // lowest swept voltage still holding on the way down
  bool commutation_observed = false;
};

struct SmallSignalFit {
  double slope = 0.0;  // rad/V²
  double r_squared = 0.0;
};

/// g(θ) residual.
double static_residual(double theta, double v_eff, const DeviceConfig& device, const TorqueContext& ctx);

/// Grid scan over [0, theta_max) refined by bisection. Empty means no interior equilibrium.
std::vector<EquilibriumPoint> equilibria(double volts, const DeviceConfig& device, double sigma,
                                         const QuasiStaticOptions& options = {});

/// Angle maximising g at the given effective voltage (g is strictly concave in θ).
double fold_angle(double v_eff, const DeviceConfig& device, const TorqueContext& ctx);

/// Smallest (stable) root of g, if a stable interior equilibrium exists.
std::optional<double> stable_root(double v_eff, const DeviceConfig& device, const TorqueContext& ctx,
                                  const QuasiStaticOptions& options = {});

/// True while the electrostatic torque at the stop holds the landed plate.
bool holds_landed(double v_eff, const DeviceConfig& device, const TorqueContext& ctx);

/// Throws NumericalError if no pull-in occurs below options.voltage_cap.
PullIn find_pull_in(const DeviceConfig& device, double sigma, const QuasiStaticOptions& options = {});

Release find_release(const DeviceConfig& device, double sigma, const QuasiStaticOptions& options = {});

/// 0 → v_max → 0 sweep with `steps` increments each way.
HysteresisResult hysteresis_sweep(const DeviceConfig& device, double v_max, int steps, double sigma,
                                  const QuasiStaticOptions& options = {});

/// Least-squares line of θ against V² on the stable branch over
/// [0, range_fraction·V_pi], σ = 0.
SmallSignalFit small_signal_fit(const DeviceConfig& device, double range_fraction = 0.3, int samples = 41);

/// Limit dθ/d(V²) as V → 0: ε0·w·(r2²−r1²)/(4·d0²·k).
double small_signal_slope_limit(const DeviceConfig& device);

}  // namespace mirrorsim
