#include "mirrorsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "mirrorsim/errors.hpp"

namespace mirrorsim {
namespace {

constexpr double kStepSlack = 1e-9;
constexpr double kEventResolution = 1e-6;  // landing time, fraction of the step

double clamp_angle(double theta, double theta_max) { return std::clamp(theta, -theta_max, theta_max); }

Side side_of(double theta) { return theta >= 0.0 ? Side::right : Side::left; }

}  // namespace

SimState SimState::landed_on(Side side, const DeviceConfig& device, double t) {
  SimState s;
  s.t = t;
  s.theta = sign_of(side) * device.geometry.theta_max;
  s.landed = side;
  return s;
}

Simulator::Simulator(DeviceConfig device, Schedule schedule, double dt)
    : device_(std::move(device)), schedule_(std::move(schedule)), ctx_(TorqueContext::from(device_)) {
  double bound = 1.0 / (50.0 * device_.mechanics.resonance_f0);
  const double f_drive = schedule_.max_frequency();
  if (f_drive > 0.0) bound = std::min(bound, 1.0 / (20.0 * f_drive));
  if (dt < 0.0 || dt > bound * (1.0 + kStepSlack)) {
    throw IntegrationError(fmt::format("time step {} s exceeds the resolution bound {} s", dt, bound));
  }
  max_step_ = dt > 0.0 ? dt : bound;
  breakpoints_ = schedule_.breakpoints();
}

Simulator::Drive Simulator::drive_at(double t) const {
  return {schedule_.voltage(Channel::left, t), schedule_.voltage(Channel::right, t)};
}

// Left limit, so the last RK stage of a step ending on a breakpoint still sees
// the segment the step belongs to.
Simulator::Drive Simulator::drive_before(double t) const {
  const double inside = std::nextafter(t, -std::numeric_limits<double>::infinity());
  return drive_at(inside);
}

double Simulator::acceleration(double theta, double omega, const Drive& v, const ChargeState& charge) const {
  const auto& m = device_.mechanics;
  const double torque = net_torque(clamp_angle(theta, ctx_.theta_max), v.left, v.right, charge.sigma_left,
                                   charge.sigma_right, device_, ctx_);
  return (torque - m.stiffness_k * theta - m.damping_b * omega) / m.inertia_J;
}

void Simulator::flight(double theta, double omega, double t, double h, const ChargeState& charge,
                       double& theta_out, double& omega_out) const {
  const Drive v0 = drive_at(t);
  const Drive vm = drive_at(t + 0.5 * h);
  const Drive v1 = drive_before(t + h);
  const double k1x = omega;
  const double k1v = acceleration(theta, omega, v0, charge);
  const double k2x = omega + 0.5 * h * k1v;
  const double k2v = acceleration(theta + 0.5 * h * k1x, k2x, vm, charge);
  const double k3x = omega + 0.5 * h * k2v;
  const double k3v = acceleration(theta + 0.5 * h * k2x, k3x, vm, charge);
  const double k4x = omega + h * k3v;
  const double k4v = acceleration(theta + h * k3x, k4x, v1, charge);
  theta_out = theta + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  omega_out = omega + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

SimState Simulator::advance(const SimState& state, double h, double t_end) const {
  const double theta_max = ctx_.theta_max;
  const auto& oxide = device_.oxide;

  SimState next = state;
  next.t = t_end;

  const Drive mid = drive_at(state.t + 0.5 * h);
  const SideFields fields{(mid.left - voltage_shift(state.charge.sigma_left, oxide)) / oxide.thickness,
                          (mid.right - voltage_shift(state.charge.sigma_right, oxide)) / oxide.thickness};
  next.charge = step_charge(state.charge, fields, h, state.landed, device_.charge);

  double theta = state.theta;
  double omega = state.omega;
  if (state.landed != Side::none) {
    const double s = sign_of(state.landed);
    const Drive v = drive_at(state.t);
    const double torque = net_torque(s * theta_max, v.left, v.right, state.charge.sigma_left,
                                     state.charge.sigma_right, device_, ctx_);
    if (s * torque >= device_.mechanics.stiffness_k * theta_max) return next;
    theta = s * theta_max;
    omega = 0.0;
    next.landed = Side::none;
  }

  double theta1 = 0.0;
  double omega1 = 0.0;
  flight(theta, omega, state.t, h, state.charge, theta1, omega1);

  if (std::abs(theta1) >= theta_max) {
    const Side side = side_of(theta1);
    double lo = 0.0;
    double hi = h;
    while (hi - lo > kEventResolution * h) {
      const double mid_h = 0.5 * (lo + hi);
      double th = 0.0;
      double om = 0.0;
      flight(theta, omega, state.t, mid_h, state.charge, th, om);
      (std::abs(th) >= theta_max && side_of(th) == side ? hi : lo) = mid_h;
    }
    theta1 = sign_of(side) * theta_max;
    omega1 = 0.0;
    next.landed = side;
  }

  if (!std::isfinite(theta1) || !std::isfinite(omega1)) {
    throw NumericalError(fmt::format("non-finite state at t = {} s (theta = {}, omega = {})", state.t, theta1,
                                     omega1));
  }
  next.theta = theta1;
  next.omega = omega1;
  return next;
}

SimState Simulator::step(const SimState& state, double dt) const {
  if (!(dt > 0.0) || dt > max_step_ * (1.0 + kStepSlack)) {
    throw IntegrationError(fmt::format("time step {} s outside (0, {}] s", dt, max_step_));
  }
  return advance(state, dt, state.t + dt);
}

TraceRow Simulator::row_at(double t, const SimState& a, const SimState& b) const {
  TraceRow row;
  row.t = t;
  const double h = b.t - a.t;
  const double s = h > 0.0 ? std::clamp((t - a.t) / h, 0.0, 1.0) : 1.0;
  if (s == 0.0) {
    row.theta = a.theta;
    row.omega = a.omega;
  } else if (s == 1.0) {
    row.theta = b.theta;
    row.omega = b.omega;
  } else if (a.landed != Side::none && b.landed == a.landed) {
    row.theta = a.theta;
    row.omega = 0.0;
  } else {
    // Cubic Hermite on (θ, ω) at both ends.
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    row.theta = clamp_angle(h00 * a.theta + h10 * h * a.omega + h01 * b.theta + h11 * h * b.omega, ctx_.theta_max);
    row.omega = (1.0 - s) * a.omega + s * b.omega;
  }
  row.sigma_left = (1.0 - s) * a.charge.sigma_left + s * b.charge.sigma_left;
  row.sigma_right = (1.0 - s) * a.charge.sigma_right + s * b.charge.sigma_right;
  // a step that starts on the stop and leaves it is free inside
  const auto landed = s == 0.0 ? a.landed : s == 1.0 ? b.landed : (b.landed == a.landed ? a.landed : Side::none);
  row.landed = static_cast<int>(landed);
  const Drive v = drive_at(t);
  row.v_left = v.left;
  row.v_right = v.right;
  return row;
}

SimState Simulator::run(SimState state, double duration, double sample_dt, const Observer& observe) const {
  if (!(duration > 0.0) || !(sample_dt > 0.0)) throw ConfigError("simulate", "duration and sample_dt must be > 0");
  const double t0 = state.t;
  const double t_end = t0 + duration;
  const auto samples = static_cast<long>(std::floor(duration / sample_dt * (1.0 + 1e-12)));
  long next_sample = 0;
  auto sample_time = [&](long m) { return t0 + static_cast<double>(m) * sample_dt; };

  std::vector<double> cuts(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t0),
                           std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t_end));
  cuts.push_back(t_end);

  if (observe) {
    observe(row_at(t0, state, state));
    next_sample = 1;
  }
  for (double b : cuts) {
    const double a = state.t;
    const double span = b - a;
    if (!(span > 0.0)) continue;
    const auto n = std::max<long>(1, static_cast<long>(std::ceil(span / max_step_ * (1.0 - 1e-12))));
    const double h = span / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
      const double t_next = i + 1 == n ? b : a + static_cast<double>(i + 1) * h;
      SimState next = advance(state, t_next - state.t, t_next);
      if (observe) {
        while (next_sample <= samples && sample_time(next_sample) <= t_next) {
          observe(row_at(sample_time(next_sample), state, next));
          ++next_sample;
        }
      }
      state = next;
    }
  }
  return state;
}

SimState step(const SimState& state, const Schedule& drive, double dt, const DeviceConfig& device) {
  return Simulator(device, drive, dt).step(state, dt);
}

Trace simulate(const DeviceConfig& device, const Schedule& drive, double duration, double sample_dt,
               const SimState& initial, double dt) {
  const Simulator sim(device, drive, dt);
  Trace trace;
  trace.sample_dt = sample_dt;
  trace.theta_max = device.geometry.theta_max;
  trace.rows.reserve(static_cast<std::size_t>(duration / sample_dt) + 2);
  sim.run(initial, duration, sample_dt, [&](const TraceRow& row) { trace.rows.push_back(row); });
  return trace;
}

std::optional<double> switching_time(const Trace& trace, double edge_t, Side side) {
  const double threshold = 0.9 * trace.theta_max;
  const double s = sign_of(side);
  const double slack = 1e-9 * trace.sample_dt;
  for (const auto& row : trace.rows) {
    if (row.t + slack < edge_t) continue;
    if (s * row.theta >= threshold) return row.t - edge_t;
  }
  return std::nullopt;
}

ReleaseTrajectory release_trajectory(const DeviceConfig& device, double sigma, double sample_dt) {
  DeviceConfig frozen = device;
  frozen.charge.k_inj = 0.0;
  frozen.charge.tau_decay = std::numeric_limits<double>::infinity();

  const double f0 = device.mechanics.resonance_f0;
  const double horizon = 20.0 / f0;
  SimState start = SimState::landed_on(Side::right, device);
  start.charge.sigma_right = sigma;

  ReleaseTrajectory result;
  result.stuck = stuck_check(sigma, device);
  result.trace = simulate(frozen, Schedule::grounded(horizon), horizon, sample_dt, start);

  if (!result.stuck) {
    const double theta_max = device.geometry.theta_max;
    const double rest_omega = 0.01 * theta_max * 2.0 * kPi * f0;
    auto& rows = result.trace.rows;
    const auto settled = std::find_if(rows.begin(), rows.end(), [&](const TraceRow& r) {
      return std::abs(r.theta) <= 0.01 * theta_max && std::abs(r.omega) <= rest_omega;
    });
    if (settled != rows.end()) rows.erase(std::next(settled), rows.end());
  }
  return result;
}

std::optional<double> departure_time(const Trace& trace, double fraction) {
  if (trace.rows.empty()) return std::nullopt;
  const double t0 = trace.rows.front().t;
  for (const auto& row : trace.rows) {
    if (std::abs(row.theta) < fraction * trace.theta_max) return row.t - t0;
  }
  return std::nullopt;
}

double rms_deviation(const Trace& a, const Trace& b) {
  const std::size_t n = std::min(a.rows.size(), b.rows.size());
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.rows[i].theta - b.rows[i].theta;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(n)) / a.theta_max;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "t_s,theta_rad,omega_rad_s,v_left_V,v_right_V,sigma_left_C_m2,sigma_right_C_m2,landed\n";
  fmt::memory_buffer buf;
  for (const auto& r : trace.rows) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{}\n", r.t, r.theta, r.omega, r.v_left, r.v_right,
                   r.sigma_left, r.sigma_right, r.landed);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

}  // namespace mirrorsim
