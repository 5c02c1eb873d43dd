#include <vector>

#include "neuron_ops.hpp"

namespace ggln::kernels {

void forward_layer_serial(const Layer& layer, const ExpertSet& in, std::span<const double> z,
                          const ConstraintSet& cs, std::span<std::uint32_t> active, ExpertSet& out,
                          std::size_t layer_index) {
  std::vector<double> scratch(layer.fan_in);
  for (std::size_t k = 0; k < layer.size; ++k) {
    detail::neuron_forward(layer, in, z, cs, k, active[k], scratch, out, layer_index);
  }
}

void update_layer_serial(Layer& layer, const ExpertSet& in, std::span<const std::uint32_t> active,
                         const ExpertSet& out, std::span<const double> y, double learning_rate,
                         const ConstraintSet& cs, std::size_t layer_index) {
  std::vector<double> grad(layer.fan_in);
  for (std::size_t k = 0; k < layer.size; ++k) {
    detail::neuron_update(layer, in, k, active[k], out, y, learning_rate, cs, grad, layer_index);
  }
}

}  // namespace ggln::kernels
