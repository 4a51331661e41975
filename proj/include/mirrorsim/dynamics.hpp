#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mirrorsim/charging.hpp"
#include "mirrorsim/constants.hpp"
#include "mirrorsim/drive.hpp"
#include "mirrorsim/electrostatics.hpp"
#include "mirrorsim/model.hpp"

namespace mirrorsim {

/// Instantaneous state. When `landed` is not none, |theta| == theta_max and omega == 0.
struct SimState {
  double t = 0.0;
  double theta = 0.0;
  double omega = 0.0;
  Side landed = Side::none;
  ChargeState charge;

  /// Resting on the stop of `side` at time `t`.
  static SimState landed_on(Side side, const DeviceConfig& device, double t = 0.0);
};

struct TraceRow {
  double t = 0.0;
  double theta = 0.0;
  double omega = 0.0;
  double v_left = 0.0;
  double v_right = 0.0;
  double sigma_left = 0.0;
  double sigma_right = 0.0;
  int landed = 0;  // −1 left, 0 free, +1 right
};

struct Trace {
  double sample_dt = 0.0;
  double theta_max = 0.0;
  std::vector<TraceRow> rows;
};

/// Fixed-step integrator of J·θ̈ + b·θ̇ + k·θ = T_net(θ, V_L(t), V_R(t), σ_L, σ_R)
/// with inelastic landing on ±theta_max and trapped-charge evolution.
///
/// Steps never straddle a schedule breakpoint: each segment interval is cut
/// into equal steps no longer than max_step(), which keeps every run
/// bit-reproducible and puts drive edges exactly on step boundaries.
class Simulator {
 public:
  using Observer = std::function<void(const TraceRow&)>;

  /// `dt` = 0 selects the largest admissible step. Throws IntegrationError if
  /// `dt` exceeds 1/(50·f0) or 1/(20·f_drive_max).
  Simulator(DeviceConfig device, Schedule schedule, double dt = 0.0);

  double max_step() const { return max_step_; }
  const DeviceConfig& device() const { return device_; }
  const Schedule& schedule() const { return schedule_; }

  /// One step of length `dt` from state.t.
  SimState step(const SimState& state, double dt) const;

  /// Integrates for `duration`, reporting uniformly spaced samples (the first at state.t).
  SimState run(SimState state, double duration, double sample_dt, const Observer& observe) const;

 private:
  struct Drive {
    double left = 0.0;
    double right = 0.0;
  };
  Drive drive_at(double t) const;
  Drive drive_before(double t) const;
  double acceleration(double theta, double omega, const Drive& v, const ChargeState& charge) const;
  void flight(double theta, double omega, double t, double h, const ChargeState& charge, double& theta_out,
              double& omega_out) const;
  SimState advance(const SimState& state, double h, double t_end) const;
  TraceRow row_at(double t, const SimState& a, const SimState& b) const;

  DeviceConfig device_;
  Schedule schedule_;
  TorqueContext ctx_;
  double max_step_ = 0.0;
  std::vector<double> breakpoints_;  // cached, sorted
};

/// Single step with the largest admissible bound checked against `dt`.
SimState step(const SimState& state, const Schedule& drive, double dt, const DeviceConfig& device);

/// Uniformly sampled trajectory over [initial.t, initial.t + duration].
Trace simulate(const DeviceConfig& device, const Schedule& drive, double duration, double sample_dt,
               const SimState& initial = {}, double dt = 0.0);

/// Delay from `edge_t` to the first sample with side·θ >= 0.9·theta_max.
std::optional<double> switching_time(const Trace& trace, double edge_t, Side side = Side::right);

struct ReleaseTrajectory {
  Trace trace;
  bool stuck = false;
};

/// Grounded return from the right stop with σ_right = `sigma` frozen. Ends once
/// |θ| <= 0.01·theta_max with the plate at rest, or after 20/f0.
ReleaseTrajectory release_trajectory(const DeviceConfig& device, double sigma, double sample_dt);

/// First sample time (relative to the trace start) with |θ| below `fraction`·theta_max.
std::optional<double> departure_time(const Trace& trace, double fraction = 0.99);

/// RMS of θ differences over the common sample support, normalised by theta_max.
double rms_deviation(const Trace& a, const Trace& b);

/// Trace CSV: header `t_s,theta_rad,...,landed`, LF line endings.
void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace mirrorsim
