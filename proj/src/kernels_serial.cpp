#include "mirrorsim/kernels.hpp"

namespace mirrorsim::kernels::serial {

std::vector<double> torque_grid(const TorqueContext& ctx, std::span<const double> thetas,
                                std::span<const double> volts) {
  std::vector<double> out(thetas.size() * volts.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    for (std::size_t j = 0; j < volts.size(); ++j) {
      out[i * volts.size() + j] = torque_closed_form(thetas[i], volts[j], ctx);
    }
  }
  return out;
}

std::vector<double> residual_grid(const DeviceConfig& device, const TorqueContext& ctx, double v_eff,
                                  std::span<const double> thetas) {
  std::vector<double> out(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) out[i] = static_residual(thetas[i], v_eff, device, ctx);
  return out;
}

std::vector<std::optional<double>> stable_branch(const DeviceConfig& device, const TorqueContext& ctx,
                                                 std::span<const double> v_eff,
                                                 const QuasiStaticOptions& options) {
  std::vector<std::optional<double>> out(v_eff.size());
  for (std::size_t i = 0; i < v_eff.size(); ++i) out[i] = stable_root(v_eff[i], device, ctx, options);
  return out;
}

}  // namespace mirrorsim::kernels::serial
