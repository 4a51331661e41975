#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mirrorsim/electrostatics.hpp"
#include "mirrorsim/model.hpp"
#include "mirrorsim/quasistatics.hpp"

// Data-parallel inner loops of the static solvers. Every element is computed
// independently, so the serial and OpenMP variants must agree bit for bit;
// the serial one is the reference the tests compare against.
namespace mirrorsim::kernels {

namespace serial {

/// Row-major |thetas|×|volts| table of torque_closed_form.
std::vector<double> torque_grid(const TorqueContext& ctx, std::span<const double> thetas,
                                std::span<const double> volts);

/// static_residual at each angle.
std::vector<double> residual_grid(const DeviceConfig& device, const TorqueContext& ctx, double v_eff,
                                  std::span<const double> thetas);

/// stable_root at each effective voltage.
std::vector<std::optional<double>> stable_branch(const DeviceConfig& device, const TorqueContext& ctx,
                                                 std::span<const double> v_eff,
                                                 const QuasiStaticOptions& options = {});

}  // namespace serial

namespace parallel {

std::vector<double> torque_grid(const TorqueContext& ctx, std::span<const double> thetas,
                                std::span<const double> volts);

std::vector<double> residual_grid(const DeviceConfig& device, const TorqueContext& ctx, double v_eff,
                                  std::span<const double> thetas);

std::vector<std::optional<double>> stable_branch(const DeviceConfig& device, const TorqueContext& ctx,
                                                 std::span<const double> v_eff,
                                                 const QuasiStaticOptions& options = {});

}  // namespace parallel

/// Caps the OpenMP team size; n <= 0 restores the runtime default.
void set_thread_count(int n);

}  // namespace mirrorsim::kernels
