#pragma once

#include <limits>
#include <string>

#include "mirrorsim/constants.hpp"

namespace mirrorsim {

/// Rigid plate geometry. All lengths in metres, angles in radians.
///
/// `half_length_a` is the plate half-extent perpendicular to the torsion axis,
/// `width_w` the extent along it. `gap_h` is the rest distance from the plate
/// underside to the oxide surface, and `theta_max` the stop angle at which the
/// plate tip touches down.
struct MirrorGeometry {
  double half_length_a = 0.0;
  double width_w = 0.0;
  double thickness_t = 0.0;
  double electrode_inner_r1 = 0.0;
  double electrode_outer_r2 = 0.0;
  double gap_h = 0.0;      // 0 = derive from theta_max
  double theta_max = 0.0;
};

/// Torsional mechanics. `inertia_J`, `stiffness_k` and `damping_b` are derived
/// by validate() when left at zero; resonance and damping ratio are the inputs.
struct MechanicalParams {
  double inertia_J = 0.0;
  double stiffness_k = 0.0;
  double damping_b = 0.0;
  double resonance_f0 = 0.0;
  double damping_ratio_zeta = 0.0;
};

struct OxideParams {
  double thickness = 0.0;
  double eps_r = 1.0;
};

/// Trapped-charge kinetics: dσ/dt = sign(E)·k_inj·max(|E|−E_th, 0)^p − σ/τ
/// while landed on an active electrode.
struct ChargeModelParams {
  /// Calibrated so that the default compressed DC-cycling run shifts V_pi by 26 V.
  static constexpr double kDefaultInjection = 1.4698681765e-12;

  double k_inj = kDefaultInjection;     // (C/m²)/s per (V/m)^p
  double e_threshold = 5.0e7;           // V/m
  double exponent_p = 1.0;
  double tau_decay = std::numeric_limits<double>::infinity();  // s
  bool landing_electrode_grounded = false;
};

struct DeviceConfig {
  MirrorGeometry geometry;
  MechanicalParams mechanics;
  OxideParams oxide;
  ChargeModelParams charge;
  double density_rho = 2329.0;
};

/// J = ρ·w·t·(2a)³/12 for a uniform plate about its central in-plane axis.
double derive_inertia(const MirrorGeometry& geometry, double density_rho);

/// Gap that puts the plate tip on the lower surface at `alpha_max`.
double derive_gap(double half_length_a, double alpha_max);

/// k = J·(2π·f0)².
double derive_stiffness(double inertia_J, double resonance_f0);

/// b = 2·ζ·sqrt(k·J).
double derive_damping(double inertia_J, double stiffness_k, double damping_ratio_zeta);

/// Populates derived fields and checks every invariant; throws ConfigError
/// naming the offending field. Derived fields left at zero are filled in,
/// nonzero ones must agree with the derivation.
DeviceConfig validate(DeviceConfig config);

/// Inputs of the canonical device before validation (600×600 µm² plate,
/// 10 µm thick, 1.6° stop angle).
DeviceConfig default_mirror_inputs();

/// Validated canonical device.
DeviceConfig default_mirror();

/// Effective electrostatic gap at zero tilt: gap plus the oxide's series thickness.
inline double effective_gap(const DeviceConfig& device) {
  return device.geometry.gap_h + device.oxide.thickness / device.oxide.eps_r;
}

}  // namespace mirrorsim
