#include <omp.h>

#include "mirrorsim/kernels.hpp"

namespace mirrorsim::kernels {
namespace parallel {

std::vector<double> torque_grid(const TorqueContext& ctx, std::span<const double> thetas,
                                std::span<const double> volts) {
  const auto rows = static_cast<std::ptrdiff_t>(thetas.size());
  const auto cols = static_cast<std::ptrdiff_t>(volts.size());
  std::vector<double> out(thetas.size() * volts.size());
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    for (std::ptrdiff_t j = 0; j < cols; ++j) {
      out[i * cols + j] = torque_closed_form(thetas[i], volts[j], ctx);
    }
  }
  return out;
}

std::vector<double> residual_grid(const DeviceConfig& device, const TorqueContext& ctx, double v_eff,
                                  std::span<const double> thetas) {
  const auto n = static_cast<std::ptrdiff_t>(thetas.size());
  std::vector<double> out(thetas.size());
#pragma omp parallel for schedule(static) if (n > 512)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = static_residual(thetas[i], v_eff, device, ctx);
  return out;
}

std::vector<std::optional<double>> stable_branch(const DeviceConfig& device, const TorqueContext& ctx,
                                                 std::span<const double> v_eff,
                                                 const QuasiStaticOptions& options) {
  const auto n = static_cast<std::ptrdiff_t>(v_eff.size());
  std::vector<std::optional<double>> out(v_eff.size());
  // Root refinement cost varies along the branch.
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = stable_root(v_eff[i], device, ctx, options);
  return out;
}

}  // namespace parallel

void set_thread_count(int n) { omp_set_num_threads(n > 0 ? n : omp_get_num_procs()); }

}  // namespace mirrorsim::kernels
