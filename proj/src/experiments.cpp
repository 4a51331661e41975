#include "mirrorsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <fmt/format.h>

#include "mirrorsim/charging.hpp"
#include "mirrorsim/config_io.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/quasistatics.hpp"

namespace mirrorsim {

using nlohmann::json;

namespace {

constexpr double kFullScaleCycles = 3.97e10;

json base_config(const DeviceConfig& device) {
  return json{{"device", device_to_json(device)}, {"charge", charge_to_json(device.charge)}};
}

// Advances the right-side charge over one phase at constant applied voltage.
double charge_phase(double sigma, double volts, double duration, bool landed, int substeps,
                    const DeviceConfig& device) {
  if (duration <= 0.0) return sigma;
  const double tau = device.charge.tau_decay;
  long n = substeps;
  if (std::isfinite(tau)) n = std::max(n, static_cast<long>(std::ceil(10.0 * duration / tau)));
  const double h = duration / static_cast<double>(n);
  const Side side = landed ? Side::right : Side::none;
  ChargeState state{0.0, sigma};
  for (long i = 0; i < n; ++i) {
    const double field = (volts - voltage_shift(state.sigma_right, device.oxide)) / device.oxide.thickness;
    state = step_charge(state, {0.0, field}, h, side, device.charge);
  }
  return state.sigma_right;
}

template <typename Probe>
double run_drift(const DeviceConfig& device, const DriftSettings& s, Probe&& probe) {
  // Pull-in shifts rigidly with the trapped-charge offset, so the per-cycle
  // landing test needs only the uncharged value.
  const double v_pi0 = find_pull_in(device, 0.0).voltage;
  double sigma = 0.0;
  probe(0, sigma);
  for (int cycle = 1; cycle <= s.cycles; ++cycle) {
    const bool stuck = stuck_check(sigma, device);
    const bool lands = stuck || s.v_on >= v_pi0 + voltage_shift(sigma, device.oxide);
    sigma = charge_phase(sigma, s.v_on, s.hold_per_cycle, lands, s.substeps, device);
    sigma = charge_phase(sigma, 0.0, s.ground_per_cycle, stuck_check(sigma, device), s.substeps, device);
    if (cycle % s.probe_every == 0 || cycle == s.cycles) probe(cycle, sigma);
  }
  return sigma;
}

}  // namespace

double drift_final_sigma(const DeviceConfig& device, const DriftSettings& settings) {
  return run_drift(device, settings, [](int, double) {});
}

std::vector<DriftProbe> drift_curve(const DeviceConfig& device, const DriftSettings& settings) {
  std::vector<DriftProbe> rows;
  run_drift(device, settings, [&](int cycle, double sigma) {
    const auto release = find_release(device, sigma);
    rows.push_back({cycle, sigma, find_pull_in(device, sigma).voltage, release.voltage, release.stuck});
  });
  return rows;
}

InjectionCalibration calibrate_injection(const DeviceConfig& device, const DriftSettings& settings,
                                         double target_shift, double tolerance) {
  if (!(target_shift > 0.0)) throw ConfigError("target_shift", "must be > 0");
  DeviceConfig trial = device;
  trial.charge.landing_electrode_grounded = false;
  InjectionCalibration result;
  auto shift_for = [&](double k) {
    trial.charge.k_inj = k;
    ++result.iterations;
    return voltage_shift(drift_final_sigma(trial, settings), trial.oxide);
  };

  double lo = 0.0;
  double hi = device.charge.k_inj > 0.0 ? device.charge.k_inj : ChargeModelParams::kDefaultInjection;
  double s_hi = shift_for(hi);
  while (s_hi < target_shift) {
    lo = hi;
    hi *= 10.0;
    if (hi > 1e3) throw NumericalError(fmt::format("drift of {} V not reachable with this protocol", target_shift));
    s_hi = shift_for(hi);
  }
  if (lo == 0.0) {
    lo = hi;
    while (shift_for(lo) > target_shift) {
      hi = lo;
      lo /= 10.0;
      if (lo < 1e-40) throw NumericalError("injection calibration failed to bracket");
    }
  }

  double k = hi;
  double shift = s_hi;
  for (int i = 0; i < 200 && std::abs(shift - target_shift) > tolerance; ++i) {
    k = std::sqrt(lo * hi);
    shift = shift_for(k);
    (shift < target_shift ? lo : hi) = k;
  }
  if (std::abs(shift - target_shift) > tolerance) throw NumericalError("injection calibration did not converge");
  result.k_inj = k;
  result.shift = shift;
  return result;
}

std::vector<SweepDetection> detect_sweep(const Trace& trace, double frequency, int periods, Side side) {
  const double s = sign_of(side);
  const double on = kCommutationFraction * trace.theta_max;
  const double off = kReleaseFraction * trace.theta_max;
  const double period = 1.0 / frequency;
  std::vector<SweepDetection> out(static_cast<std::size_t>(periods));
  for (int p = 0; p < periods; ++p) out[p].period = p;

  for (const auto& row : trace.rows) {
    const auto p = static_cast<long>(std::floor(row.t / period));
    if (p < 0 || p >= periods) continue;
    auto& d = out[static_cast<std::size_t>(p)];
    const double v = side == Side::left ? row.v_left : row.v_right;
    if (!d.v_pi) {
      if (s * row.theta >= on) d.v_pi = v;
    } else if (!d.v_m && s * row.theta <= off) {
      d.v_m = v;
    }
  }
  return out;
}

ExperimentReport exp_triangular_sweep(const DeviceConfig& device_in, const SweepSettings& s) {
  DeviceConfig device = device_in;
  if (s.freeze_charge) device.charge.k_inj = 0.0;

  ExperimentReport report;
  report.name = "sweep";
  report.config = base_config(device_in);
  report.config["experiment"] = {{"sweep", settings_to_json(s)}};

  const double f0 = device.mechanics.resonance_f0;
  if (s.frequency > f0 / 100.0) {
    report.warnings.push_back(
        fmt::format("sweep frequency {} Hz exceeds f0/100 = {} Hz; detected values lag the quasi-static ones",
                    s.frequency, f0 / 100.0));
  }

  const double duration = s.periods / s.frequency;
  const auto schedule = Schedule::single_channel(Channel::right, {{duration, Triangle{s.frequency, 0.0, s.v_max}}});
  Trace trace = simulate(device, schedule, duration, s.sample_dt);
  const auto detections = detect_sweep(trace, s.frequency, s.periods);

  const auto pull_in = find_pull_in(device, 0.0);
  const auto release = find_release(device, 0.0);

  report.summary.columns = {"period_index", "V_pi_detected_V", "V_m_detected_V", "flagged"};
  for (const auto& d : detections) {
    report.summary.add_row({cell(d.period), cell(d.v_pi), cell(d.v_m), cell(d.flagged())});
    if (d.flagged()) report.warnings.push_back(fmt::format("period {}: no complete commutation", d.period));
  }
  report.metadata = {{"commutation_threshold_frac_theta_max", kCommutationFraction},
                     {"release_threshold_frac_theta_max", kReleaseFraction},
                     {"charging_frozen", s.freeze_charge},
                     {"quasi_static_V_pi_V", pull_in.voltage},
                     {"quasi_static_V_m_V", release.voltage},
                     {"quasi_static_theta_pin_deg", rad_to_deg(pull_in.theta)},
                     {"max_step_s", Simulator(device, schedule).max_step()}};
  report.traces.push_back({"trace", std::move(trace)});
  return report;
}

ExperimentReport exp_dc_drift(const DeviceConfig& device, const DriftSettings& s) {
  ExperimentReport report;
  report.name = "drift";
  report.config = base_config(device);
  report.config["experiment"] = {{"drift", settings_to_json(s)}};
  if (!(device.charge.k_inj > 0.0)) report.warnings.push_back("k_inj = 0: charging disabled, curves stay flat");
  if (device.charge.landing_electrode_grounded) {
    report.warnings.push_back("grounded landing electrode: no contact field, curves stay flat");
  }

  const auto rows = drift_curve(device, s);
  report.summary.columns = {"cycle", "sigma_C_m2", "V_pi_V", "V_m_V", "stuck"};
  for (const auto& r : rows) {
    report.summary.add_row({cell(r.cycle), cell(r.sigma), cell(r.v_pi), cell(r.v_m), cell(r.stuck)});
  }

  const double landed_time = s.cycles * s.hold_per_cycle;
  const double simulated = s.cycles * (s.hold_per_cycle + s.ground_per_cycle);
  report.metadata = {{"model", "cycle-level: landing decided from quasi-static V_pi(sigma) each cycle"},
                     {"simulated_time_s", simulated},
                     {"landed_time_s", landed_time},
                     {"nominal_duration_s", s.nominal_duration},
                     {"compression_factor", s.nominal_duration / simulated},
                     {"delta_V_pi_V", rows.back().v_pi - rows.front().v_pi},
                     {"delta_V_m_V", rows.back().v_m - rows.front().v_m}};
  return report;
}

namespace {

struct HoldArm {
  std::vector<Trace> snapshots;
  std::vector<double> sigma;  // right-side σ at each snapshot start
  double max_abs_sigma = 0.0;
};

HoldArm run_hold_arm(const DeviceConfig& device, const Waveform& drive, const HoldSettings& s, const char* label) {
  std::vector<Segment> segs;
  for (int i = 0; i < s.interrupts; ++i) {
    segs.push_back({s.interrupt_every - s.interrupt_len, drive});
    segs.push_back({s.interrupt_len, Ground{}});
  }
  const Simulator sim(device, Schedule::single_channel(Channel::right, std::move(segs)));
  const double theta_max = device.geometry.theta_max;
  const double probe_dt = 10.0 * s.sample_dt;

  HoldArm arm;
  SimState state;
  for (int i = 0; i < s.interrupts; ++i) {
    bool landed = false;
    std::optional<double> released_at;
    state = sim.run(state, s.interrupt_every - s.interrupt_len, probe_dt, [&](const TraceRow& r) {
      arm.max_abs_sigma = std::max(arm.max_abs_sigma, std::abs(r.sigma_right));
      if (r.landed == 1) {
        landed = true;
      } else if (landed && !released_at) {
        released_at = r.t;
      }
    });
    if (released_at) {
      throw ExperimentError(fmt::format("{} arm: mirror released during hold {} at t = {} s (amplitude too low)",
                                        label, i, *released_at));
    }
    if (!landed || state.landed != Side::right) {
      throw ExperimentError(fmt::format("{} arm: mirror not landed at the end of hold {}", label, i));
    }
    arm.sigma.push_back(state.charge.sigma_right);
    Trace snap{s.sample_dt, theta_max, {}};
    const double t0 = state.t;
    state = sim.run(state, s.interrupt_len, s.sample_dt, [&](const TraceRow& r) {
      TraceRow shifted = r;
      shifted.t = r.t - t0;
      snap.rows.push_back(shifted);
      arm.max_abs_sigma = std::max(arm.max_abs_sigma, std::abs(r.sigma_right));
    });
    arm.snapshots.push_back(std::move(snap));
  }
  return arm;
}

}  // namespace

ExperimentReport exp_bipolar_hold(const DeviceConfig& device, const HoldSettings& settings, int jobs) {
  HoldSettings s = settings;
  const auto pull_in = find_pull_in(device, 0.0);
  const auto release = find_release(device, 0.0);
  if (s.amplitude == 0.0) s.amplitude = s.amplitude_factor * pull_in.voltage;

  ExperimentReport report;
  report.name = "hold";
  report.config = base_config(device);
  report.config["experiment"] = {{"hold", settings_to_json(s)}};

  const double f0 = device.mechanics.resonance_f0;
  if (s.amplitude < release.voltage / kCommutationFraction) {
    throw ConfigError("experiment.hold.amplitude_V",
                      fmt::format("{} V is below V_m/0.9 = {} V", s.amplitude, release.voltage / kCommutationFraction));
  }
  if (s.frequency < 10.0 * f0) {
    throw ConfigError("experiment.hold.frequency_hz", fmt::format("{} Hz is below 10·f0 = {} Hz", s.frequency, 10.0 * f0));
  }

  const double sigma_stuck = stuck_threshold(device);
  report.metadata = {{"amplitude_V", s.amplitude},
                     {"amplitude_choice", settings.amplitude == 0.0
                                              ? fmt::format("{}*V_pi(sigma=0), not given by the source data",
                                                            s.amplitude_factor)
                                              : std::string("user supplied")},
                     {"V_pi_V", pull_in.voltage},
                     {"V_m_V", release.voltage},
                     {"stuck_threshold_sigma_C_m2", sigma_stuck},
                     {"hold_time_s", s.interrupts * s.interrupt_every}};
  report.summary.columns = {"snapshot_index", "rms_deviation_vs_first", "sigma_at_snapshot_C_m2"};
  if (s.dc_control) {
    report.summary.columns.insert(report.summary.columns.end(),
                                  {"dc_rms_deviation_vs_first", "dc_sigma_at_snapshot_C_m2"});
  }
  if (s.interrupts == 0) {
    report.metadata["hold_only"] = true;
    return report;
  }

  const std::vector<Waveform> drives{BipolarSquare{s.frequency, s.amplitude}, DcLevel{s.amplitude}};
  const int arms = s.dc_control ? 2 : 1;
  std::vector<HoldArm> results(2);
  std::vector<std::exception_ptr> errors(2);
#pragma omp parallel for num_threads(std::max(1, std::min(jobs, arms))) schedule(static, 1)
  for (int a = 0; a < arms; ++a) {
    try {
      results[a] = run_hold_arm(device, drives[a], s, a == 0 ? "bipolar" : "dc");
    } catch (...) {
      errors[a] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const auto& bi = results[0];
  for (int i = 0; i < s.interrupts; ++i) {
    std::vector<std::string> row{cell(i), cell(rms_deviation(bi.snapshots[i], bi.snapshots[0])), cell(bi.sigma[i])};
    if (s.dc_control) {
      const auto& dc = results[1];
      row.push_back(cell(rms_deviation(dc.snapshots[i], dc.snapshots[0])));
      row.push_back(cell(dc.sigma[i]));
    }
    report.summary.add_row(std::move(row));
  }
  report.metadata["bipolar_max_abs_sigma_frac_stuck"] = bi.max_abs_sigma / sigma_stuck;
  if (s.dc_control) report.metadata["dc_max_abs_sigma_frac_stuck"] = results[1].max_abs_sigma / sigma_stuck;

  report.traces.push_back({"bipolar_snapshot_first", bi.snapshots.front()});
  report.traces.push_back({"bipolar_snapshot_last", bi.snapshots.back()});
  if (s.dc_control) {
    report.traces.push_back({"dc_snapshot_first", results[1].snapshots.front()});
    report.traces.push_back({"dc_snapshot_last", results[1].snapshots.back()});
  }
  return report;
}

ExperimentReport exp_endurance(const DeviceConfig& device_in, const EnduranceSettings& settings) {
  EnduranceSettings s = settings;
  DeviceConfig device = device_in;
  device.charge.k_inj = 0.0;
  const double v_pi = find_pull_in(device, 0.0).voltage;
  if (s.v_on == 0.0) s.v_on = s.v_on_factor * v_pi;

  ExperimentReport report;
  report.name = "endurance";
  report.config = base_config(device_in);
  report.config["experiment"] = {{"endurance", settings_to_json(s)}};
  if (s.v_on < 1.05 * v_pi * (1.0 - 1e-12)) {
    report.warnings.push_back(fmt::format("V_on = {} V is below 1.05·V_pi = {} V", s.v_on, 1.05 * v_pi));
  }

  const Simulator sim(device, build_toggle(s.period, s.v_on, static_cast<double>(s.cycles) * s.period));
  const double on = kCommutationFraction * device.geometry.theta_max;
  const double half = 0.5 * s.period;

  report.summary.columns = {"cycle", "switching_time_s", "return_time_s"};
  Trace first{s.sample_dt, device.geometry.theta_max, {}};
  SimState state = SimState::landed_on(Side::left, device);
  double t_min = INFINITY;
  double t_max = -INFINITY;
  for (long c = 0; c < s.cycles; ++c) {
    const double t0 = state.t;
    std::optional<double> forward;
    std::optional<double> back;
    state = sim.run(state, s.period, s.sample_dt, [&](const TraceRow& r) {
      const double local = r.t - t0;
      if (c == 0) first.rows.push_back(r);
      if (local < half) {
        if (!forward && r.theta >= on) forward = local;
      } else if (!back && r.theta <= -on) {
        back = local - half;
      }
    });
    if (!forward || !back) {
      throw ExperimentError(fmt::format("missed commutation at cycle {} ({} edge)", c, forward ? "left" : "right"));
    }
    t_min = std::min({t_min, *forward, *back});
    t_max = std::max({t_max, *forward, *back});
    report.summary.add_row({cell(c), cell(*forward), cell(*back)});
  }

  report.metadata = {{"charging", "disabled"},
                     {"V_on_V", s.v_on},
                     {"V_pi_V", v_pi},
                     {"cycles_simulated", s.cycles},
                     {"full_scale_cycles_not_simulated", kFullScaleCycles},
                     {"switching_time_min_s", t_min},
                     {"switching_time_max_s", t_max},
                     {"switching_time_spread_s", t_max - t_min},
                     {"commutation_threshold_frac_theta_max", kCommutationFraction}};
  report.traces.push_back({"first_cycle", std::move(first)});
  return report;
}

ExperimentReport exp_simulate(const DeviceConfig& device, const Schedule& schedule, double duration,
                              double sample_dt) {
  ExperimentReport report;
  report.name = "simulate";
  report.config = base_config(device);
  Trace trace = simulate(device, schedule, duration, sample_dt);
  const auto& last = trace.rows.back();
  report.metadata = {{"duration_s", duration},
                     {"final_theta_rad", last.theta},
                     {"final_landed", last.landed},
                     {"max_step_s", Simulator(device, schedule).max_step()}};
  report.traces.push_back({"trace", std::move(trace)});
  return report;
}

}  // namespace mirrorsim
