#pragma once

#include <cmath>

#include "mirrorsim/model.hpp"

namespace testing {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// Device with the originally proposed electrode and mechanics inputs
// (r2 = 290 um, f0 = 3 kHz, zeta = 1.5), kept for the hand-evaluated oracles.
inline mirrorsim::DeviceConfig original_inputs() {
  auto d = mirrorsim::default_mirror_inputs();
  d.geometry.electrode_outer_r2 = 290e-6;
  d.mechanics.resonance_f0 = 3000.0;
  d.mechanics.damping_ratio_zeta = 1.5;
  return d;
}

// Full-width electrode with a vanishing oxide: the textbook parallel-plate mirror.
inline mirrorsim::DeviceConfig canonical_full_electrode() {
  auto d = mirrorsim::default_mirror_inputs();
  d.geometry.electrode_inner_r1 = 0.0;
  d.geometry.electrode_outer_r2 = d.geometry.half_length_a;
  d.oxide.thickness = 1e-12;
  return mirrorsim::validate(d);
}

}  // namespace testing
