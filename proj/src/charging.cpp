#include "mirrorsim/charging.hpp"

#include <cmath>

#include "mirrorsim/electrostatics.hpp"
#include "mirrorsim/errors.hpp"

namespace mirrorsim {
namespace {

double injection_term(double e_signed, const ChargeModelParams& params, bool landed) {
  if (!landed || params.landing_electrode_grounded || params.k_inj == 0.0) return 0.0;
  const double excess = std::abs(e_signed) - params.e_threshold;
  if (!(excess > 0.0)) return 0.0;
  const double magnitude = params.exponent_p == 1.0 ? excess : std::pow(excess, params.exponent_p);
  return std::copysign(params.k_inj * magnitude, e_signed);
}

double advance(double sigma, double injection, double dt, double tau) {
  if (std::isinf(tau)) return sigma + injection * dt;
  const double decay = std::exp(-dt / tau);
  return sigma * decay + injection * tau * (-std::expm1(-dt / tau));
}

}  // namespace

double voltage_shift(double sigma, const OxideParams& oxide) {
  return sigma * oxide.thickness / (oxide.eps_r * kVacuumPermittivity);
}

double sigma_for_shift(double volts, const OxideParams& oxide) {
  return volts * oxide.eps_r * kVacuumPermittivity / oxide.thickness;
}

double injection_rate(double e_signed, double sigma, const ChargeModelParams& params, bool landed) {
  const double decay = std::isinf(params.tau_decay) ? 0.0 : sigma / params.tau_decay;
  return injection_term(e_signed, params, landed) - decay;
}

ChargeState step_charge(const ChargeState& state, const SideFields& fields, double dt, Side landed_side,
                        const ChargeModelParams& params) {
  if (!(dt > 0.0)) throw IntegrationError("charge step requires dt > 0");
  if (std::isfinite(params.tau_decay) && dt > params.tau_decay / 10.0) {
    throw IntegrationError("charge step dt exceeds tau_decay/10");
  }
  ChargeState next;
  next.sigma_left = advance(state.sigma_left, injection_term(fields.left, params, landed_side == Side::left), dt,
                            params.tau_decay);
  next.sigma_right = advance(state.sigma_right, injection_term(fields.right, params, landed_side == Side::right),
                             dt, params.tau_decay);
  return next;
}

bool stuck_check(double sigma, const DeviceConfig& device) {
  const auto ctx = TorqueContext::from(device);
  const double theta_max = device.geometry.theta_max;
  const double holding = torque_closed_form(theta_max, std::abs(voltage_shift(sigma, device.oxide)), ctx);
  return holding >= device.mechanics.stiffness_k * theta_max;
}

double stuck_threshold(const DeviceConfig& device) {
  const auto ctx = TorqueContext::from(device);
  const double theta_max = device.geometry.theta_max;
  // T is quadratic in V, so the holding shift follows from the 1 V torque.
  const double unit = torque_closed_form(theta_max, 1.0, ctx);
  return sigma_for_shift(std::sqrt(device.mechanics.stiffness_k * theta_max / unit), device.oxide);
}

}  // namespace mirrorsim
