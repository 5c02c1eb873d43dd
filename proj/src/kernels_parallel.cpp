#include <exception>
#include <vector>

#include "neuron_ops.hpp"

namespace ggln::kernels {

// Neurons in one layer depend only on the previous layer's outputs, so the
// loop over k is embarrassingly parallel. Exceptions cannot cross the OpenMP
// region boundary; the first one is captured and rethrown after the join.

void forward_layer_parallel(const Layer& layer, const ExpertSet& in, std::span<const double> z,
                            const ConstraintSet& cs, std::span<std::uint32_t> active, ExpertSet& out,
                            std::size_t layer_index) {
  std::exception_ptr error;
  const auto n = static_cast<long>(layer.size);
#pragma omp parallel
  {
    std::vector<double> scratch(layer.fan_in);
#pragma omp for schedule(static)
    for (long k = 0; k < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      try {
        detail::neuron_forward(layer, in, z, cs, kk, active[kk], scratch, out, layer_index);
      } catch (...) {
#pragma omp critical(ggln_forward_error)
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

void update_layer_parallel(Layer& layer, const ExpertSet& in, std::span<const std::uint32_t> active,
                           const ExpertSet& out, std::span<const double> y, double learning_rate,
                           const ConstraintSet& cs, std::size_t layer_index) {
  std::exception_ptr error;
  const auto n = static_cast<long>(layer.size);
#pragma omp parallel
  {
    std::vector<double> grad(layer.fan_in);
#pragma omp for schedule(static)
    for (long k = 0; k < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      try {
        detail::neuron_update(layer, in, kk, active[kk], out, y, learning_rate, cs, grad, layer_index);
      } catch (...) {
#pragma omp critical(ggln_update_error)
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace ggln::kernels
