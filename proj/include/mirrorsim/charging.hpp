#pragma once

#include "mirrorsim/constants.hpp"
#include "mirrorsim/model.hpp"

namespace mirrorsim {

/// Areal trapped-charge equivalent per electrode side (C/m²). Positive σ raises
/// the voltage needed on that side.
struct ChargeState {
  double sigma_left = 0.0;
  double sigma_right = 0.0;

  double& on(Side side) { return side == Side::left ? sigma_left : sigma_right; }
  double on(Side side) const { return side == Side::left ? sigma_left : sigma_right; }

  friend bool operator==(const ChargeState&, const ChargeState&) = default;
};

/// Oxide field per electrode side, V/m.
struct SideFields {
  double left = 0.0;
  double right = 0.0;
};

/// Flat-band-style voltage offset Vsh = σ·t_ox/(ε_r·ε0).
double voltage_shift(double sigma, const OxideParams& oxide);

/// Inverse of voltage_shift.
double sigma_for_shift(double volts, const OxideParams& oxide);

/// dσ/dt for one side. The injection term is active only while landed on a
/// live (not grounded-landing) electrode above threshold; decay always acts.
double injection_rate(double e_signed, double sigma, const ChargeModelParams& params, bool landed);

/// Advances both sides by `dt` with the fields held constant. Decay is
/// integrated exactly (exponential Euler), so a constant injection rate with
/// no decay accumulates exactly R·dt.
///
/// Throws IntegrationError if dt <= 0 or dt > tau_decay/10.
ChargeState step_charge(const ChargeState& state, const SideFields& fields, double dt, Side landed_side,
                        const ChargeModelParams& params);

/// True iff the trapped charge alone holds the landed mirror at zero bias:
/// T(theta_max, |Vsh(σ)|) >= k·theta_max.
bool stuck_check(double sigma, const DeviceConfig& device);

/// Smallest σ >= 0 for which stuck_check holds (closed form; the tests
/// cross-check it by bisection).
double stuck_threshold(const DeviceConfig& device);

}  // namespace mirrorsim
