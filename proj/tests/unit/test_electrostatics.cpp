#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mirrorsim/charging.hpp"
#include "mirrorsim/electrostatics.hpp"
#include "mirrorsim/errors.hpp"

using namespace mirrorsim;
using testing::rel;

namespace {
const DeviceConfig& device() {
  static const DeviceConfig d = default_mirror();
  return d;
}
const TorqueContext& ctx() {
  static const TorqueContext c = TorqueContext::from(device());
  return c;
}
}  // namespace

TEST_CASE("zero voltage gives zero torque") {
  for (double f : {0.0, 0.3, 1.0}) {
    CHECK(torque_closed_form(f * ctx().theta_max, 0.0, ctx()) == 0.0);
    CHECK(torque_quadrature(f * ctx().theta_max, 0.0, ctx()) == 0.0);
    CHECK(dtorque_dtheta(f * ctx().theta_max, 0.0, ctx()) == 0.0);
  }
}

TEST_CASE("small-angle limit at 10 V, original electrode extents") {
  const auto c = TorqueContext::from(validate(testing::original_inputs()));
  // eps0*w*V^2*(r2^2 - r1^2)/(4*d0^2) with d0 = 8.508 um, by hand: 1.5266e-10 N*m
  CHECK(rel(torque_closed_form(0.0, 10.0, c), 1.52655353608355e-10) < 1e-12);
  CHECK(rel(torque_quadrature(0.0, 10.0, c), 1.52655353608355e-10) < 1e-9);
}

TEST_CASE("frozen high-precision torque values, current defaults") {
  // 30-digit quadrature of the strip integrand
  CHECK(rel(torque_closed_form(0.0, 10.0, ctx()), 1.04033155644155e-10) < 1e-12);
  CHECK(rel(torque_closed_form(0.5 * ctx().theta_max, 10.0, ctx()), 2.01450724687719e-10) < 1e-11);
  CHECK(rel(torque_closed_form(ctx().theta_max, 1.0, ctx()), 7.34282709413380e-12) < 1e-11);
}

TEST_CASE("closed form agrees with quadrature on a 20x20 grid") {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double th = 0.98 * ctx().theta_max * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      const double v = 1.0 + 99.0 * j / 19.0;
      worst = std::max(worst, rel(torque_closed_form(th, v, ctx()), torque_quadrature(th, v, ctx())));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("series band and its switch") {
  const double s = ctx().series_threshold();
  for (double th : {0.1 * s, 0.5 * s, 0.99 * s, -0.7 * s}) {
    CHECK(rel(torque_closed_form(th, 50.0, ctx()), torque_quadrature(th, 50.0, ctx())) < 1e-7);
  }
  const double below = torque_closed_form(std::nextafter(s, 0.0), 50.0, ctx());
  const double above = torque_closed_form(s, 50.0, ctx());
  CHECK(rel(below, above) < 1e-9);
}

TEST_CASE("quadratic voltage scaling") {
  for (double th : {0.0, 0.2 * ctx().theta_max, 0.9 * ctx().theta_max}) {
    const double t1 = torque_closed_form(th, 7.0, ctx());
    for (double c : {0.5, 3.0, 11.0}) CHECK(rel(torque_closed_form(th, c * 7.0, ctx()), c * c * t1) < 1e-14);
  }
}

TEST_CASE("monotone in angle and in |V|") {
  double prev = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double th = ctx().theta_max * i / 200.0;
    const double t = torque_closed_form(th, 30.0, ctx());
    CHECK(t > prev);
    prev = t;
    CHECK(torque_closed_form(th, 31.0, ctx()) > t);
    CHECK(torque_closed_form(th, -30.0, ctx()) == t);
  }
}

TEST_CASE("derivative matches central differences") {
  const double h = 1e-6 * ctx().theta_max;
  for (double f : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    const double th = f * ctx().theta_max;
    const double fd = (torque_closed_form(th + h, 10.0, ctx()) - torque_closed_form(th - h, 10.0, ctx())) / (2 * h);
    CHECK(rel(dtorque_dtheta(th, 10.0, ctx()), fd) < 1e-6);
    CHECK(dtorque_dtheta(th, 10.0, ctx()) > 0.0);
  }
}

TEST_CASE("angle outside the stop is a domain error") {
  CHECK_THROWS_AS(torque_closed_form(1.01 * ctx().theta_max, 10.0, ctx()), DomainError);
  CHECK_THROWS_AS(torque_closed_form(-1.01 * ctx().theta_max, 10.0, ctx()), DomainError);
  CHECK_THROWS_AS(dtorque_dtheta(1.01 * ctx().theta_max, 10.0, ctx()), DomainError);
  CHECK_THROWS_AS(net_torque(1.01 * ctx().theta_max, 0, 10, 0, 0, device()), DomainError);
}

TEST_CASE("net torque reductions and odd symmetry") {
  const auto& d = device();
  const double tm = ctx().theta_max;
  CHECK(net_torque(0.3 * tm, 0, 0, 0, 0, d) == 0.0);
  CHECK(net_torque(0.0, 40, 40, 0, 0, d) == 0.0);
  CHECK(net_torque(0.4 * tm, 0, 40, 0, 0, d) == torque_closed_form(0.4 * tm, 40, ctx()));

  const double s1 = sigma_for_shift(3.0, d.oxide);
  const double s2 = sigma_for_shift(-1.5, d.oxide);
  for (double f : {-0.9, -0.2, 0.0, 0.5, 1.0}) {
    const double th = f * tm;
    CHECK(net_torque(-th, 55, 20, s2, s1, d) == doctest::Approx(-net_torque(th, 20, 55, s1, s2, d)).epsilon(1e-14));
  }
}

TEST_CASE("contact field") {
  CHECK(contact_field(50.0, {0.5e-6, 3.9}) == doctest::Approx(1e8).epsilon(1e-14));
  CHECK(contact_field(0.0, {0.5e-6, 3.9}) == 0.0);
  CHECK(contact_field(100.0, {1e-6, 3.9}) == doctest::Approx(1e8).epsilon(1e-14));
  CHECK(contact_field(-50.0, {0.5e-6, 3.9}) == doctest::Approx(1e8).epsilon(1e-14));
}
