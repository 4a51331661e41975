#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mirrorsim/charging.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/quasistatics.hpp"

using namespace mirrorsim;
using testing::rel;

namespace {
const DeviceConfig& device() {
  static const DeviceConfig d = default_mirror();
  return d;
}

// Dense continuation: V(theta) = sqrt(k*theta/T(theta, 1)) peaks at the fold.
PullIn continuation_oracle(const DeviceConfig& d, int n) {
  const auto ctx = TorqueContext::from(d);
  PullIn best;
  for (int i = 1; i < n; ++i) {
    const double th = d.geometry.theta_max * i / n;
    const double v = std::sqrt(d.mechanics.stiffness_k * th / torque_closed_form(th, 1.0, ctx));
    if (v > best.voltage) best = {v, th};
  }
  return best;
}

DeviceConfig with_stiffness_scale(double c2) {
  auto d = device();
  d.mechanics.stiffness_k *= c2;
  d.mechanics.resonance_f0 *= std::sqrt(c2);
  d.mechanics.damping_b = 0.0;
  return validate(d);
}
}  // namespace

TEST_CASE("pull-in against the high-precision oracle") {
  const auto p = find_pull_in(device(), 0.0);
  // 30-digit root of T - theta*T' = 0
  CHECK(rel(p.voltage, 58.3371394686952) < 1e-9);
  CHECK(rel(p.theta, 0.0155462533878598) < 1e-6);
  CHECK(p.theta < device().geometry.theta_max);

  const auto o = continuation_oracle(device(), 100000);
  CHECK(rel(p.voltage, o.voltage) < 1e-6);
}

TEST_CASE("equilibria around the fold") {
  const auto at0 = equilibria(0.0, device(), 0.0);
  REQUIRE(at0.size() == 1);
  CHECK(at0[0].theta == 0.0);
  CHECK(at0[0].stable);

  const double v_pi = find_pull_in(device(), 0.0).voltage;
  const auto near = equilibria(0.99 * v_pi, device(), 0.0);
  REQUIRE(near.size() == 2);
  CHECK(near[0].stable);
  CHECK_FALSE(near[1].stable);
  const auto ctx = TorqueContext::from(device());
  const double scale = device().mechanics.stiffness_k * device().geometry.theta_max;
  for (const auto& e : near) CHECK(std::abs(static_residual(e.theta, 0.99 * v_pi, device(), ctx)) <= 1e-8 * scale);

  for (const auto& e : equilibria(1.01 * v_pi, device(), 0.0)) CHECK_FALSE(e.stable);
}

TEST_CASE("stiffness scaling") {
  const auto base_pi = find_pull_in(device(), 0.0);
  const auto base_m = find_release(device(), 0.0).voltage;
  const auto d4 = with_stiffness_scale(4.0);
  const auto p4 = find_pull_in(d4, 0.0);
  CHECK(rel(p4.voltage, 2.0 * base_pi.voltage) < 1e-9);
  CHECK(rel(p4.theta, base_pi.theta) < 1e-9);
  CHECK(rel(find_release(d4, 0.0).voltage, 2.0 * base_m) < 1e-9);
}

TEST_CASE("trapped charge shifts both thresholds rigidly") {
  const double sigma = sigma_for_shift(26.0, device().oxide);
  const double dpi = find_pull_in(device(), sigma).voltage - find_pull_in(device(), 0.0).voltage;
  const double dm = find_release(device(), sigma).voltage - find_release(device(), 0.0).voltage;
  CHECK(std::abs(dpi - 26.0) < 1e-9);
  CHECK(std::abs(dm - 26.0) < 1e-9);
}

TEST_CASE("release and the stuck signal") {
  const auto r = find_release(device(), 0.0);
  CHECK(rel(r.voltage, 43.0171421542087) < 1e-9);
  CHECK_FALSE(r.stuck);
  CHECK(r.voltage < find_pull_in(device(), 0.0).voltage);

  const double sigma = sigma_for_shift(r.voltage + 1.0, device().oxide);
  const auto stuck = find_release(device(), sigma);
  CHECK(stuck.stuck);
  CHECK(stuck.stuck == stuck_check(sigma, device()));
}

TEST_CASE("hysteresis sweep to 100 V") {
  const auto h = hysteresis_sweep(device(), 100.0, 1000, 0.0);
  REQUIRE(h.commutation_observed);
  const double tm = device().geometry.theta_max;
  const double step = 100.0 / 1000;
  CHECK(std::abs(*h.v_pi - find_pull_in(device(), 0.0).voltage) <= step);
  CHECK(std::abs(*h.v_m - find_release(device(), 0.0).voltage) <= step);
  CHECK(*h.v_m < *h.v_pi);
  CHECK(*h.theta_pin < tm);

  double prev = -1.0;
  bool jumped = false;
  for (const auto& [v, th] : h.up_branch) {
    CHECK(th >= prev);
    prev = th;
    if (v >= *h.v_pi) {
      CHECK(th == tm);
      jumped = true;
    }
  }
  CHECK(jumped);
  for (const auto& [v, th] : h.down_branch) {
    if (v >= *h.v_m) CHECK(th == tm);
  }

  const auto low = hysteresis_sweep(device(), 40.0, 400, 0.0);
  CHECK_FALSE(low.commutation_observed);
}

TEST_CASE("sweep step refinement converges to the bisected pull-in") {
  const double v_pi = find_pull_in(device(), 0.0).voltage;
  double prev_err = INFINITY;
  for (int steps : {100, 1000, 10000}) {
    const double err = std::abs(*hysteresis_sweep(device(), 100.0, steps, 0.0).v_pi - v_pi);
    CHECK(err <= 100.0 / steps);
    CHECK(err <= prev_err);
    prev_err = err;
  }
}

TEST_CASE("charged sweep is the uncharged one shifted by Vsh") {
  const double sigma = sigma_for_shift(10.0, device().oxide);
  const auto a = hysteresis_sweep(device(), 100.0, 500, 0.0);
  const auto b = hysteresis_sweep(device(), 100.0, 500, sigma);
  CHECK(std::abs((*b.v_pi - *a.v_pi) - 10.0) <= 0.2 + 1e-9);
  CHECK(std::abs((*b.v_m - *a.v_m) - 10.0) <= 0.2 + 1e-9);
}

TEST_CASE("small-signal fit") {
  const auto f = small_signal_fit(device());
  CHECK(f.r_squared >= 0.999);
  CHECK(small_signal_fit(device(), 0.1).r_squared >= f.r_squared);
  // eps0*w*(r2^2 - r1^2)/(4*d0^2*k), 30-digit evaluation
  CHECK(rel(small_signal_slope_limit(device()), 2.13807389701894e-6) < 1e-12);
  CHECK(rel(small_signal_fit(device(), 0.02).slope, small_signal_slope_limit(device())) < 1e-3);
}

TEST_CASE("forbidden region holds no stable equilibrium") {
  const auto p = find_pull_in(device(), 0.0);
  const auto ctx = TorqueContext::from(device());
  const double tm = device().geometry.theta_max;
  for (int i = 1; i <= 200; ++i) {
    const double v = p.voltage * 1.3 * i / 200.0;
    if (const auto root = stable_root(v, device(), ctx)) CHECK(*root <= p.theta * (1 + 1e-9));
  }
  for (int i = 1; i < 100; ++i) {
    const double th = p.theta + (tm - p.theta) * i / 100.0;
    // the balance voltage at th is unstable: T' exceeds k there
    CHECK(dtorque_dtheta(th, std::sqrt(device().mechanics.stiffness_k * th / torque_closed_form(th, 1.0, ctx)), ctx) >
          device().mechanics.stiffness_k);
  }
}

// Devices whose fold lies past the stop reach it continuously: no hysteresis, V_m == V_pi.
TEST_CASE("property: V_m < V_pi over random devices with a fold before the stop") {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int folded = 0;
  for (int i = 0; i < 40; ++i) {
    auto d = default_mirror_inputs();
    d.geometry.electrode_inner_r1 = 60e-6 * u(rng);
    d.geometry.electrode_outer_r2 = 120e-6 + 170e-6 * u(rng);
    d.oxide.thickness = 0.1e-6 + 1.5e-6 * u(rng);
    d.mechanics.resonance_f0 = 1e3 + 2e4 * u(rng);
    const auto v = validate(d);
    const auto p = find_pull_in(v, 0.0);
    const double vm = find_release(v, 0.0).voltage;
    if (p.theta < v.geometry.theta_max) {
      ++folded;
      CHECK(vm < p.voltage);
    } else {
      CHECK(std::abs(vm - p.voltage) <= 1e-6);
    }
  }
  CHECK(folded >= 20);
}

TEST_CASE("canonical full-electrode pull-in fraction") {
  const auto d = testing::canonical_full_electrode();
  const auto p = find_pull_in(d, 0.0);
  const double frac = p.theta / d.geometry.theta_max;
  CHECK(frac >= 0.43);
  CHECK(frac <= 0.45);
  const auto o = continuation_oracle(d, 100000);
  CHECK(rel(p.theta, o.theta) < 1e-3);
  CHECK(rel(p.voltage, o.voltage) < 1e-6);
}

TEST_CASE("no pull-in below the cap") {
  QuasiStaticOptions o;
  o.voltage_cap = 20.0;
  CHECK_THROWS_AS(find_pull_in(device(), 0.0, o), NumericalError);
}
