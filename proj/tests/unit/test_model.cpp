#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mirrorsim/constants.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/model.hpp"

using namespace mirrorsim;
using testing::rel;

TEST_CASE("inertia of the 600x600x10 um plate") {
  const auto g = default_mirror_inputs().geometry;
  // 2329 * 600e-6 * 10e-6 * (600e-6)^3 / 12, evaluated by hand
  CHECK(rel(derive_inertia(g, 2329.0), 2.51532e-16) < 1e-12);

  auto thick = g;
  thick.thickness_t *= 2.0;
  CHECK(rel(derive_inertia(thick, 2329.0), 2.0 * derive_inertia(g, 2329.0)) < 1e-15);
  CHECK_THROWS_AS(derive_inertia(g, 0.0), ConfigError);
}

TEST_CASE("gap from stop angle") {
  CHECK(rel(derive_gap(300e-6, deg_to_rad(1.6)), 8.37975875897625e-6) < 1e-12);
  CHECK(derive_gap(300e-6, 1e-9) < 1e-12);
  CHECK(derive_gap(1.0, deg_to_rad(45.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(derive_gap(300e-6, 0.0), ConfigError);
  CHECK_THROWS_AS(derive_gap(300e-6, kPi / 2), ConfigError);
}

TEST_CASE("stiffness from resonance") {
  CHECK(rel(derive_stiffness(2.515e-16, 3000.0), 8.94e-8) < 1e-3);
  CHECK(rel(derive_stiffness(2.515e-16, 12000.0), 16.0 * derive_stiffness(2.515e-16, 3000.0)) < 1e-14);
  CHECK_THROWS_AS(derive_stiffness(2.515e-16, 0.0), ConfigError);
}

TEST_CASE("validate fills the derived mechanics") {
  const auto d = default_mirror();
  const auto& m = d.mechanics;
  CHECK(m.inertia_J > 0.0);
  CHECK(rel(std::sqrt(m.stiffness_k / m.inertia_J) / (2 * kPi), m.resonance_f0) < 1e-12);
  CHECK(rel(m.damping_b, 2 * m.damping_ratio_zeta * std::sqrt(m.stiffness_k * m.inertia_J)) < 1e-12);
  CHECK(rel(std::atan(d.geometry.gap_h / d.geometry.half_length_a), d.geometry.theta_max) < 1e-12);
  CHECK(rel(m.stiffness_k, 4.86574181506102e-7) < 1e-12);
}

TEST_CASE("original input set is also a valid device") {
  const auto d = validate(testing::original_inputs());
  CHECK(rel(d.mechanics.stiffness_k, 8.93707680317331e-8) < 1e-12);
  CHECK(rel(effective_gap(d), 8.50796388718138e-6) < 1e-12);
}

TEST_CASE("validate reports the offending field") {
  auto d = default_mirror_inputs();
  d.geometry.electrode_inner_r1 = 250e-6;  // beyond r2
  try {
    validate(d);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field().find("electrode") != std::string::npos);
  }

  d = default_mirror_inputs();
  d.geometry.gap_h = 9e-6;
  try {
    validate(d);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "geometry.gap_h");
  }

  d = default_mirror_inputs();
  d.geometry.electrode_outer_r2 = 310e-6;
  CHECK_THROWS_AS(validate(d), ConfigError);

  d = default_mirror_inputs();
  d.oxide.eps_r = 0.5;
  CHECK_THROWS_AS(validate(d), ConfigError);

  d = default_mirror_inputs();
  d.mechanics.stiffness_k = 1.0;  // disagrees with f0
  CHECK_THROWS_AS(validate(d), ConfigError);

  d = default_mirror_inputs();
  d.charge.exponent_p = 0.5;
  CHECK_THROWS_AS(validate(d), ConfigError);

  d = default_mirror_inputs();
  d.charge.k_inj = -1.0;
  CHECK_THROWS_AS(validate(d), ConfigError);
}

TEST_CASE("property: resonance round trip over a parameter sample") {
  for (double f0 : {100.0, 1234.5, 7000.0, 4.2e4}) {
    for (double t : {2e-6, 10e-6, 35e-6}) {
      auto d = default_mirror_inputs();
      d.mechanics.resonance_f0 = f0;
      d.geometry.thickness_t = t;
      const auto v = validate(d);
      CHECK(rel(std::sqrt(v.mechanics.stiffness_k / v.mechanics.inertia_J) / (2 * kPi), f0) < 1e-12);
    }
  }
}
