#include "mirrorsim/electrostatics.hpp"

#include <array>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mirrorsim/charging.hpp"
#include "mirrorsim/errors.hpp"

namespace mirrorsim {
namespace {

constexpr int kSeriesTerms = 6;

void check_angle(double theta, const TorqueContext& ctx) {
  // Small slack so that exactly ±theta_max (and its float neighbours) is accepted.
  if (!(std::abs(theta) <= ctx.theta_max * (1.0 + 1e-12))) {
    throw DomainError("tilt angle " + std::to_string(theta) + " rad outside [-theta_max, theta_max]");
  }
}

// f(x) = ln(1−x) + x/(1−x) = Σ_{n≥2} (n−1)/n·xⁿ
double strip_potential(double x) { return std::log1p(-x) + x / (1.0 - x); }

// f'(x) = x/(1−x)²
double strip_potential_slope(double x) {
  const double u = 1.0 - x;
  return x / (u * u);
}

// Series coefficients of ∫ r/(d0−rθ)² dr = Σ c_n θⁿ over [r1, r2].
std::array<double, kSeriesTerms> series_coefficients(const TorqueContext& ctx) {
  std::array<double, kSeriesTerms> c{};
  double r1_pow = ctx.r1 * ctx.r1;
  double r2_pow = ctx.r2 * ctx.r2;
  double d0_pow = ctx.d0 * ctx.d0;
  for (int n = 0; n < kSeriesTerms; ++n) {
    c[n] = (n + 1.0) / (n + 2.0) * (r2_pow - r1_pow) / d0_pow;
    r1_pow *= ctx.r1;
    r2_pow *= ctx.r2;
    d0_pow *= ctx.d0;
  }
  return c;
}

}  // namespace

TorqueContext TorqueContext::from(const DeviceConfig& device) {
  TorqueContext ctx;
  ctx.d0 = effective_gap(device);
  ctx.width = device.geometry.width_w;
  ctx.r1 = device.geometry.electrode_inner_r1;
  ctx.r2 = device.geometry.electrode_outer_r2;
  ctx.theta_max = device.geometry.theta_max;
  if (!(ctx.d0 > device.geometry.gap_h)) {
    throw ConfigError("oxide", "effective gap must exceed the air gap");
  }
  if (!(ctx.d0 - ctx.r2 * ctx.theta_max > 0.0)) {
    throw ConfigError("geometry.electrode_outer_r2", "torque singular inside the allowed angle range");
  }
  return ctx;
}

double torque_closed_form(double theta, double volts, const TorqueContext& ctx) {
  check_angle(theta, ctx);
  const double scale = 0.5 * ctx.vacuum_permittivity * ctx.width * volts * volts;
  if (scale == 0.0) return 0.0;

  if (std::abs(theta) < ctx.series_threshold()) {
    const auto c = series_coefficients(ctx);
    double sum = 0.0;
    for (int n = kSeriesTerms - 1; n >= 0; --n) sum = sum * theta + c[n];
    return scale * sum;
  }
  const double x1 = ctx.r1 * theta / ctx.d0;
  const double x2 = ctx.r2 * theta / ctx.d0;
  return scale * (strip_potential(x2) - strip_potential(x1)) / (theta * theta);
}

double torque_quadrature(double theta, double volts, const TorqueContext& ctx, double rel_tol) {
  check_angle(theta, ctx);
  const double scale = 0.5 * ctx.vacuum_permittivity * ctx.width * volts * volts;
  if (scale == 0.0) return 0.0;
  auto integrand = [&](double r) {
    const double gap = ctx.d0 - r * theta;
    return r / (gap * gap);
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, ctx.r1, ctx.r2, 8, rel_tol);
  return scale * integral;
}

double dtorque_dtheta(double theta, double volts, const TorqueContext& ctx) {
  check_angle(theta, ctx);
  const double scale = 0.5 * ctx.vacuum_permittivity * ctx.width * volts * volts;
  if (scale == 0.0) return 0.0;

  if (std::abs(theta) < ctx.series_threshold()) {
    const auto c = series_coefficients(ctx);
    double sum = 0.0;
    for (int n = kSeriesTerms - 1; n >= 1; --n) sum = sum * theta + n * c[n];
    return scale * sum;
  }
  const double x1 = ctx.r1 * theta / ctx.d0;
  const double x2 = ctx.r2 * theta / ctx.d0;
  const double bracket = strip_potential(x2) - strip_potential(x1);
  const double bracket_slope =
      (ctx.r2 * strip_potential_slope(x2) - ctx.r1 * strip_potential_slope(x1)) / ctx.d0;
  const double theta2 = theta * theta;
  return scale * (bracket_slope / theta2 - 2.0 * bracket / (theta2 * theta));
}

double net_torque(double theta_signed, double v_left, double v_right, double sigma_left, double sigma_right,
                  const DeviceConfig& device, const TorqueContext& ctx) {
  const double v_eff_right = v_right - voltage_shift(sigma_right, device.oxide);
  const double v_eff_left = v_left - voltage_shift(sigma_left, device.oxide);
  return torque_closed_form(theta_signed, v_eff_right, ctx) - torque_closed_form(-theta_signed, v_eff_left, ctx);
}

double net_torque(double theta_signed, double v_left, double v_right, double sigma_left, double sigma_right,
                  const DeviceConfig& device) {
  return net_torque(theta_signed, v_left, v_right, sigma_left, sigma_right, device, TorqueContext::from(device));
}

double contact_field(double v_effective, const OxideParams& oxide) { return std::abs(v_effective) / oxide.thickness; }

}  // namespace mirrorsim
