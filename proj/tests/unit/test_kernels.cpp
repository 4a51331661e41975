#include <doctest.h>

#include <vector>

#include "mirrorsim/kernels.hpp"
#include "mirrorsim/quasistatics.hpp"

using namespace mirrorsim;

namespace {
std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}
}  // namespace

TEST_CASE("serial and parallel kernels agree bit for bit") {
  const auto d = default_mirror();
  const auto ctx = TorqueContext::from(d);
  const auto thetas = linspace(-ctx.theta_max, ctx.theta_max, 257);
  const auto volts = linspace(0.0, 100.0, 129);

  for (int threads : {1, 2, 4}) {
    kernels::set_thread_count(threads);
    CHECK(kernels::serial::torque_grid(ctx, thetas, volts) == kernels::parallel::torque_grid(ctx, thetas, volts));

    const auto pos = linspace(0.0, 0.999 * ctx.theta_max, 2048);
    CHECK(kernels::serial::residual_grid(d, ctx, 55.0, pos) == kernels::parallel::residual_grid(d, ctx, 55.0, pos));

    const auto v_eff = linspace(0.0, 70.0, 301);
    CHECK(kernels::serial::stable_branch(d, ctx, v_eff) == kernels::parallel::stable_branch(d, ctx, v_eff));
  }
  kernels::set_thread_count(0);
}

TEST_CASE("torque grid layout is row-major over angles") {
  const auto d = default_mirror();
  const auto ctx = TorqueContext::from(d);
  const std::vector<double> th{0.0, 0.5 * ctx.theta_max};
  const std::vector<double> v{1.0, 2.0, 3.0};
  const auto g = kernels::serial::torque_grid(ctx, th, v);
  REQUIRE(g.size() == 6);
  CHECK(g[1 * 3 + 2] == torque_closed_form(th[1], v[2], ctx));
}

TEST_CASE("stable branch ends at the fold") {
  const auto d = default_mirror();
  const auto ctx = TorqueContext::from(d);
  const double v_pi = find_pull_in(d, 0.0).voltage;
  const std::vector<double> v{0.5 * v_pi, 0.999 * v_pi, 1.001 * v_pi};
  const auto b = kernels::parallel::stable_branch(d, ctx, v);
  CHECK(b[0].has_value());
  CHECK(b[1].has_value());
  CHECK_FALSE(b[2].has_value());
}
