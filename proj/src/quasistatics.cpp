#include "mirrorsim/quasistatics.hpp"

#include <cmath>
#include <string>

#include "mirrorsim/charging.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/kernels.hpp"

namespace mirrorsim {
namespace {

constexpr int kMaxBisection = 200;

// Bisects a sign change of g on [lo, hi] down to the angle tolerance and, where
// g is steep, further until |g| meets the residual bound.
double refine_root(double lo, double hi, double v_eff, const DeviceConfig& device, const TorqueContext& ctx,
                   const QuasiStaticOptions& options) {
  const double theta_max = device.geometry.theta_max;
  const double angle_tol = options.angle_tol_frac * theta_max;
  const double residual_tol = 1e-8 * device.mechanics.stiffness_k * theta_max;
  double g_lo = static_residual(lo, v_eff, device, ctx);
  for (int i = 0; i < kMaxBisection; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = static_residual(mid, v_eff, device, ctx);
    if (g_mid == 0.0) return mid;
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= angle_tol && std::abs(static_residual(0.5 * (lo + hi), v_eff, device, ctx)) <= residual_tol) {
      break;
    }
  }
  return 0.5 * (lo + hi);
}

// Last voltage with a stable interior equilibrium and first without, in
// effective-voltage space (σ-independent by construction).
std::pair<double, double> bracket_pull_in(const DeviceConfig& device, const TorqueContext& ctx,
                                          const QuasiStaticOptions& options) {
  auto has_stable = [&](double v) { return stable_root(v, device, ctx, options).has_value(); };
  double lo = 0.0;
  double hi = 1.0;
  while (has_stable(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > options.voltage_cap) {
      throw NumericalError("no pull-in below cap of " + std::to_string(options.voltage_cap) + " V");
    }
  }
  while (hi - lo > options.voltage_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (has_stable(mid) ? lo : hi) = mid;
  }
  return {lo, hi};
}

double landed_balance_voltage(const DeviceConfig& device, const TorqueContext& ctx,
                              const QuasiStaticOptions& options) {
  double lo = 0.0;
  double hi = 1.0;
  while (!holds_landed(hi, device, ctx)) {
    lo = hi;
    hi *= 2.0;
    if (hi > options.voltage_cap) throw NumericalError("landed balance not reached below voltage cap");
  }
  while (hi - lo > options.voltage_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (holds_landed(mid, device, ctx) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

double static_residual(double theta, double v_eff, const DeviceConfig& device, const TorqueContext& ctx) {
  return device.mechanics.stiffness_k * theta - torque_closed_form(theta, v_eff, ctx);
}

std::vector<EquilibriumPoint> equilibria(double volts, const DeviceConfig& device, double sigma,
                                         const QuasiStaticOptions& options) {
  const auto ctx = TorqueContext::from(device);
  const double v_eff = volts - voltage_shift(sigma, device.oxide);
  const double theta_max = device.geometry.theta_max;
  const int n = options.scan_points;
  const double k = device.mechanics.stiffness_k;

  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = theta_max * i / n;
  const auto residual = kernels::parallel::residual_grid(device, ctx, v_eff, grid);

  std::vector<EquilibriumPoint> points;
  auto classify = [&](double theta) {
    points.push_back({theta, k - dtorque_dtheta(theta, v_eff, ctx) > 0.0});
  };
  for (int i = 0; i < n; ++i) {
    if (residual[i] == 0.0) {
      classify(grid[i]);
    } else if (i + 1 < n && residual[i + 1] != 0.0 && (residual[i] < 0.0) != (residual[i + 1] < 0.0)) {
      classify(refine_root(grid[i], grid[i + 1], v_eff, device, ctx, options));
    }
  }
  return points;
}

double fold_angle(double v_eff, const DeviceConfig& device, const TorqueContext& ctx) {
  const double k = device.mechanics.stiffness_k;
  const double theta_max = device.geometry.theta_max;
  if (dtorque_dtheta(0.0, v_eff, ctx) >= k) return 0.0;
  if (dtorque_dtheta(theta_max, v_eff, ctx) <= k) return theta_max;
  double lo = 0.0;
  double hi = theta_max;
  for (int i = 0; i < kMaxBisection; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (dtorque_dtheta(mid, v_eff, ctx) < k ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> stable_root(double v_eff, const DeviceConfig& device, const TorqueContext& ctx,
                                  const QuasiStaticOptions& options) {
  if (v_eff == 0.0) return 0.0;
  const double peak = fold_angle(v_eff, device, ctx);
  if (!(static_residual(peak, v_eff, device, ctx) > 0.0)) return std::nullopt;
  return refine_root(0.0, peak, v_eff, device, ctx, options);
}

bool holds_landed(double v_eff, const DeviceConfig& device, const TorqueContext& ctx) {
  const double theta_max = device.geometry.theta_max;
  return torque_closed_form(theta_max, v_eff, ctx) >= device.mechanics.stiffness_k * theta_max;
}

PullIn find_pull_in(const DeviceConfig& device, double sigma, const QuasiStaticOptions& options) {
  const auto ctx = TorqueContext::from(device);
  const auto [last_stable, first_landed] = bracket_pull_in(device, ctx, options);
  PullIn result;
  result.voltage = voltage_shift(sigma, device.oxide) + first_landed;
  result.theta = fold_angle(last_stable, device, ctx);
  return result;
}

Release find_release(const DeviceConfig& device, double sigma, const QuasiStaticOptions& options) {
  const auto ctx = TorqueContext::from(device);
  const double shift = voltage_shift(sigma, device.oxide);
  Release result;
  result.voltage = shift + landed_balance_voltage(device, ctx, options);
  result.stuck = holds_landed(-shift, device, ctx);
  return result;
}

HysteresisResult hysteresis_sweep(const DeviceConfig& device, double v_max, int steps, double sigma,
                                  const QuasiStaticOptions& options) {
  if (steps < 1 || !(v_max > 0.0)) throw ConfigError("sweep", "need v_max > 0 and steps >= 1");
  const auto ctx = TorqueContext::from(device);
  const double shift = voltage_shift(sigma, device.oxide);
  const double theta_max = device.geometry.theta_max;

  std::vector<double> volts(steps + 1);
  std::vector<double> v_eff(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    volts[i] = v_max * i / steps;
    v_eff[i] = volts[i] - shift;
  }
  const auto roots = kernels::parallel::stable_branch(device, ctx, v_eff, options);

  HysteresisResult result;
  bool landed = false;
  for (int i = 0; i <= steps; ++i) {
    if (!landed && !roots[i]) {
      landed = true;
      result.v_pi = volts[i];
      result.commutation_observed = true;
    }
    if (!landed) result.theta_pin = roots[i];
    result.up_branch.emplace_back(volts[i], landed ? theta_max : *roots[i]);
  }
  if (!result.commutation_observed) result.theta_pin.reset();

  for (int i = steps; i >= 0; --i) {
    if (landed && !holds_landed(v_eff[i], device, ctx) && roots[i]) {
      landed = false;
      if (result.commutation_observed && i < steps) result.v_m = volts[i + 1];
    }
    if (!landed && !roots[i]) landed = true;  // re-capture on the negative side of a large shift
    result.down_branch.emplace_back(volts[i], landed ? theta_max : *roots[i]);
  }
  return result;
}

SmallSignalFit small_signal_fit(const DeviceConfig& device, double range_fraction, int samples) {
  if (samples < 20) throw ConfigError("samples", "small-signal fit needs at least 20 samples");
  const auto ctx = TorqueContext::from(device);
  const double v_top = range_fraction * find_pull_in(device, 0.0).voltage;

  std::vector<double> x(samples);
  std::vector<double> y(samples);
  for (int i = 0; i < samples; ++i) {
    const double v = v_top * i / (samples - 1);
    x[i] = v * v;
    y[i] = stable_root(v, device, ctx).value();
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < samples; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= samples;
  my /= samples;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < samples; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  SmallSignalFit fit;
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = y[i] - (intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = 1.0 - ss_res / syy;
  return fit;
}

double small_signal_slope_limit(const DeviceConfig& device) {
  const auto& g = device.geometry;
  const double d0 = effective_gap(device);
  return kVacuumPermittivity * g.width_w * (g.electrode_outer_r2 * g.electrode_outer_r2 -
                                            g.electrode_inner_r1 * g.electrode_inner_r1) /
         (4.0 * d0 * d0 * device.mechanics.stiffness_k);
}

}  // namespace mirrorsim
