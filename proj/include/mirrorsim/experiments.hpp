#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mirrorsim/dynamics.hpp"
#include "mirrorsim/model.hpp"
#include "mirrorsim/report.hpp"

namespace mirrorsim {

inline constexpr double kCommutationFraction = 0.9;  // of theta_max
inline constexpr double kReleaseFraction = 0.5;

struct SweepSettings {
  double frequency = 4.0;  // Hz
  double v_max = 100.0;    // V
  int periods = 3;
  bool freeze_charge = true;
  double sample_dt = 1e-5;  // s
};

/// Compressed DC cycling: each cycle holds `v_on` on the right electrode for
/// `hold_per_cycle`, then grounds it for `ground_per_cycle`.
struct DriftSettings {
  int cycles = 1000;
  double hold_per_cycle = 0.01;
  double ground_per_cycle = 0.01;
  int probe_every = 10;
  double v_on = 100.0;
  int substeps = 16;  // charge steps per phase
  double nominal_duration = 30.0 * 86400.0;  // uncompressed wall-clock span the run stands for
};

struct HoldSettings {
  double amplitude = 0.0;  // V; 0 = amplitude_factor·V_pi(σ=0)
  double amplitude_factor = 1.2;
  double frequency = 70e3;
  int interrupts = 10;
  double interrupt_every = 0.5;
  double interrupt_len = 2e-3;
  double sample_dt = 2e-6;
  bool dc_control = true;
};

struct EnduranceSettings {
  double period = 2e-3;
  double v_on = 0.0;  // V; 0 = v_on_factor·V_pi(σ=0)
  double v_on_factor = 1.05;
  long cycles = 10000;
  double sample_dt = 1e-6;
};

/// Sampled drift curve, one row per probe.
struct DriftProbe {
  int cycle = 0;
  double sigma = 0.0;
  double v_pi = 0.0;
  double v_m = 0.0;
  bool stuck = false;
};

/// Trapped charge on the right electrode after the compressed cycling
/// protocol, without the per-probe quasi-static solves.
double drift_final_sigma(const DeviceConfig& device, const DriftSettings& settings);

/// Cycle-level drift run: the mirror pulls in whenever v_on >= V_pi(σ) (or it
/// is stuck), charge is integrated over each phase at the landed contact
/// field, and every `probe_every` cycles V_pi/V_m are re-solved at the current σ.
std::vector<DriftProbe> drift_curve(const DeviceConfig& device, const DriftSettings& settings);

struct InjectionCalibration {
  double k_inj = 0.0;
  double shift = 0.0;  // achieved ΔV_pi, V
  int iterations = 0;
};

/// Bisects log(k_inj) so the drift protocol ends with ΔV_pi = target_shift
/// within `tolerance` volts.
InjectionCalibration calibrate_injection(const DeviceConfig& device, const DriftSettings& settings,
                                         double target_shift = 26.0, double tolerance = 1e-3);

/// V at the first sample reaching commutation and the first later sample back
/// below release, for each drive period of a triangle sweep trace.
struct SweepDetection {
  int period = 0;
  std::optional<double> v_pi;
  std::optional<double> v_m;
  bool flagged() const { return !v_pi || !v_m; }
};
std::vector<SweepDetection> detect_sweep(const Trace& trace, double frequency, int periods, Side side = Side::right);

ExperimentReport exp_triangular_sweep(const DeviceConfig& device, const SweepSettings& settings);
ExperimentReport exp_dc_drift(const DeviceConfig& device, const DriftSettings& settings);
/// `jobs` > 1 runs the bipolar arm and the DC control arm concurrently.
ExperimentReport exp_bipolar_hold(const DeviceConfig& device, const HoldSettings& settings, int jobs = 1);
ExperimentReport exp_endurance(const DeviceConfig& device, const EnduranceSettings& settings);
/// Plain trajectory under `schedule`, starting from rest.
ExperimentReport exp_simulate(const DeviceConfig& device, const Schedule& schedule, double duration,
                              double sample_dt);

}  // namespace mirrorsim
