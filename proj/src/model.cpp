#include "mirrorsim/model.hpp"

#include <cmath>

#include "mirrorsim/errors.hpp"

namespace mirrorsim {
namespace {

constexpr double kConsistencyTol = 1e-9;

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(field, "must be finite and > 0");
  }
}

bool consistent(double given, double derived) {
  return std::abs(given - derived) <= kConsistencyTol * std::abs(derived);
}

}  // namespace

double derive_inertia(const MirrorGeometry& geometry, double density_rho) {
  require_positive(geometry.half_length_a, "geometry.half_length_a");
  require_positive(geometry.width_w, "geometry.width_w");
  require_positive(geometry.thickness_t, "geometry.thickness_t");
  require_positive(density_rho, "density_rho");
  const double length = 2.0 * geometry.half_length_a;
  return density_rho * geometry.width_w * geometry.thickness_t * length * length * length / 12.0;
}

double derive_gap(double half_length_a, double alpha_max) {
  require_positive(half_length_a, "geometry.half_length_a");
  if (!(alpha_max > 0.0 && alpha_max < kPi / 2.0)) {
    throw ConfigError("geometry.theta_max", "stop angle must lie in (0, pi/2)");
  }
  return half_length_a * std::tan(alpha_max);
}

double derive_stiffness(double inertia_J, double resonance_f0) {
  require_positive(inertia_J, "mechanics.inertia_J");
  require_positive(resonance_f0, "mechanics.resonance_f0");
  const double omega0 = 2.0 * kPi * resonance_f0;
  return inertia_J * omega0 * omega0;
}

double derive_damping(double inertia_J, double stiffness_k, double damping_ratio_zeta) {
  require_positive(inertia_J, "mechanics.inertia_J");
  require_positive(stiffness_k, "mechanics.stiffness_k");
  if (!(damping_ratio_zeta >= 0.0) || !std::isfinite(damping_ratio_zeta)) {
    throw ConfigError("mechanics.damping_ratio_zeta", "must be finite and >= 0");
  }
  return 2.0 * damping_ratio_zeta * std::sqrt(stiffness_k * inertia_J);
}

DeviceConfig validate(DeviceConfig config) {
  auto& g = config.geometry;
  auto& m = config.mechanics;

  require_positive(g.half_length_a, "geometry.half_length_a");
  require_positive(g.width_w, "geometry.width_w");
  require_positive(g.thickness_t, "geometry.thickness_t");
  require_positive(config.density_rho, "density_rho");

  if (!(g.electrode_inner_r1 >= 0.0)) {
    throw ConfigError("geometry.electrode_inner_r1", "must be >= 0");
  }
  if (!(g.electrode_inner_r1 < g.electrode_outer_r2)) {
    throw ConfigError("geometry.electrode_inner_r1/electrode_outer_r2",
                      "electrode extents require r1 < r2");
  }
  if (!(g.electrode_outer_r2 <= g.half_length_a)) {
    throw ConfigError("geometry.electrode_outer_r2", "electrode must not extend past the plate (r2 <= a)");
  }

  if (g.gap_h == 0.0) {
    g.gap_h = derive_gap(g.half_length_a, g.theta_max);
  } else {
    require_positive(g.gap_h, "geometry.gap_h");
    if (g.theta_max == 0.0) {
      g.theta_max = std::atan(g.gap_h / g.half_length_a);
    }
  }
  const double stop = std::atan(g.gap_h / g.half_length_a);
  if (!consistent(g.theta_max, stop)) {
    throw ConfigError("geometry.gap_h", "inconsistent with theta_max = atan(gap_h / half_length_a)");
  }

  require_positive(config.oxide.thickness, "oxide.thickness");
  if (!(config.oxide.eps_r >= 1.0) || !std::isfinite(config.oxide.eps_r)) {
    throw ConfigError("oxide.eps_r", "relative permittivity must be >= 1");
  }
  if (!(effective_gap(config) - g.electrode_outer_r2 * g.theta_max > 0.0)) {
    throw ConfigError("geometry.electrode_outer_r2", "electrode edge reaches the field singularity within the stop angle");
  }

  const double inertia = derive_inertia(g, config.density_rho);
  if (m.inertia_J == 0.0) {
    m.inertia_J = inertia;
  } else if (!consistent(m.inertia_J, inertia)) {
    throw ConfigError("mechanics.inertia_J", "inconsistent with geometry and density");
  }

  if (m.resonance_f0 == 0.0 && m.stiffness_k > 0.0) {
    m.resonance_f0 = std::sqrt(m.stiffness_k / m.inertia_J) / (2.0 * kPi);
  }
  const double stiffness = derive_stiffness(m.inertia_J, m.resonance_f0);
  if (m.stiffness_k == 0.0) {
    m.stiffness_k = stiffness;
  } else if (!consistent(m.stiffness_k, stiffness)) {
    throw ConfigError("mechanics.stiffness_k", "inconsistent with inertia and resonance");
  }

  const double damping = derive_damping(m.inertia_J, m.stiffness_k, m.damping_ratio_zeta);
  if (m.damping_b == 0.0) {
    m.damping_b = damping;
  } else if (!consistent(m.damping_b, damping)) {
    throw ConfigError("mechanics.damping_b", "inconsistent with damping ratio");
  }

  const auto& c = config.charge;
  if (!(c.k_inj >= 0.0) || !std::isfinite(c.k_inj)) throw ConfigError("charge.k_inj", "must be finite and >= 0");
  if (!(c.e_threshold >= 0.0) || !std::isfinite(c.e_threshold)) {
    throw ConfigError("charge.e_th_v_per_m", "must be finite and >= 0");
  }
  if (!(c.exponent_p >= 1.0) || !std::isfinite(c.exponent_p)) throw ConfigError("charge.exponent_p", "must be >= 1");
  if (!(c.tau_decay > 0.0)) throw ConfigError("charge.tau_decay_s", "must be > 0 or inf");

  return config;
}

DeviceConfig default_mirror_inputs() {
  DeviceConfig config;
  config.geometry.half_length_a = 300e-6;
  config.geometry.width_w = 600e-6;
  config.geometry.thickness_t = 10e-6;
  config.geometry.electrode_inner_r1 = 30e-6;
  config.geometry.electrode_outer_r2 = 240e-6;
  config.geometry.theta_max = deg_to_rad(1.6);
  config.density_rho = 2329.0;
  config.oxide = {0.5e-6, 3.9};
  config.mechanics.resonance_f0 = 7.0e3;
  config.mechanics.damping_ratio_zeta = 0.5;
  return config;
}

DeviceConfig default_mirror() { return validate(default_mirror_inputs()); }

}  // namespace mirrorsim
