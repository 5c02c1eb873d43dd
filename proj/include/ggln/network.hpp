#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggln/constraints.hpp"
#include "ggln/expert_set.hpp"
#include "ggln/gating.hpp"
#include "ggln/pog.hpp"
#include "ggln/switching.hpp"

namespace ggln {

enum class Aggregation { top_neuron, switching };
enum class Exec { serial, parallel };

std::string to_string(Aggregation a);
Aggregation aggregation_from_string(const std::string& s);

struct NetworkConfig {
  std::vector<std::size_t> layer_sizes{16, 1};  // K_1 .. K_L
  std::size_t context_dim = 4;                  // s
  std::size_t side_info_dim = 1;                // d
  std::size_t base_count = 1;                   // K_0, excluding bias experts
  std::size_t target_dim = 1;                   // D
  Form form = Form::univariate;
  double learning_rate = 1e-2;
  double bias_r = 5.0;
  double sigma2_bias = 1.0;
  double context_bias_scale = 0.05;
  ConstraintSet constraints;
  Aggregation aggregation = Aggregation::top_neuron;

  void validate() const;
};

/// Error at a specific neuron during a forward or update pass.
class NeuronError : public std::runtime_error {
 public:
  NeuronError(std::size_t layer, std::size_t neuron, const std::string& what);
  std::size_t layer;
  std::size_t neuron;
};

/// One layer of gated neurons. Weights are stored neuron-major, then context
/// cell, then input: weights[(k * cells + c) * fan_in + j].
struct Layer {
  std::size_t size = 0;
  std::size_t fan_in = 0;
  std::size_t cells = 0;
  std::vector<ComposedContext> contexts;
  std::vector<double> weights;

  std::span<double> row(std::size_t k, std::size_t c) {
    return {weights.data() + (k * cells + c) * fan_in, fan_in};
  }
  std::span<const double> row(std::size_t k, std::size_t c) const {
    return {weights.data() + (k * cells + c) * fan_in, fan_in};
  }
};

/// Everything recorded by a forward pass: each layer's input set (previous
/// outputs followed by the bias experts), each neuron's active cell, and the
/// last layer's outputs.
struct ForwardPass {
  std::vector<ExpertSet> inputs;
  std::vector<std::vector<std::uint32_t>> active;
  ExpertSet top_layer;

  /// Output of neuron k in layer i (1-based layer index, as in the network).
  GaussianExpert neuron(std::size_t layer, std::size_t k) const;
};

/// Network output: the top neuron, plus per-neuron outputs and the switching
/// weights used when the network aggregates by switching.
struct Prediction {
  Aggregation aggregation = Aggregation::top_neuron;
  GaussianExpert top;
  ExpertSet neurons;
  std::vector<double> mixture_weights;

  std::size_t dim() const { return dimension_of(top); }
  /// Point estimate: top mean, or the mixture mean under switching.
  Vector mean() const;
  double log_density(std::span<const double> y) const;
  /// The top expert, or the moment-matched Gaussian of the switching mixture.
  GaussianExpert expert() const;
};

class Network {
 public:
  /// Samples every neuron's contexts from `rng` and sets all weights to
  /// 1 / fan-in (fan-in counts the bias experts).
  Network(NetworkConfig cfg, Rng& rng);

  const NetworkConfig& config() const { return cfg_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  const ExpertSet& bias() const { return bias_; }
  const SwitchingState& switching() const { return switching_; }
  SwitchingState& switching() { return switching_; }
  std::size_t neuron_count() const;

  Exec exec() const { return exec_; }
  void set_exec(Exec e) { exec_ = e; }

  /// Read-only forward pass.
  Prediction infer(const ExpertSet& base, std::span<const double> z) const;

  /// Forward pass, then one projected gradient step on every neuron's active
  /// row. The returned prediction is the pre-update one.
  Prediction infer_update(const ExpertSet& base, std::span<const double> z, std::span<const double> y);
  Prediction infer_update(const ExpertSet& base, std::span<const double> z, std::span<const double> y,
                          double learning_rate);

  ForwardPass forward(const ExpertSet& base, std::span<const double> z) const;

  /// Active cell of every neuron for side information z, layer by layer.
  std::vector<std::vector<std::uint32_t>> active_cells(std::span<const double> z) const;

  double predict_density(const ExpertSet& base, std::span<const double> z, std::span<const double> y) const;

  void save(std::ostream& out) const;
  static Network load(std::istream& in);

 private:
  Network() = default;
  void check_inputs(const ExpertSet& base, std::span<const double> z) const;
  Prediction make_prediction(const ForwardPass& pass) const;

  NetworkConfig cfg_;
  std::vector<Layer> layers_;
  ExpertSet bias_;
  SwitchingState switching_;
  Exec exec_ = Exec::parallel;
};

/// Serial reference and OpenMP-parallel versions of the per-layer work. Both
/// compute each neuron with the same instruction sequence, so their results
/// are bit-identical.
namespace kernels {

/// Rows that are infeasible for the current inputs are evaluated through the
/// backstop on a scratch copy; stored weights are not touched.
void forward_layer_serial(const Layer& layer, const ExpertSet& in, std::span<const double> z,
                          const ConstraintSet& cs, std::span<std::uint32_t> active, ExpertSet& out,
                          std::size_t layer_index);
void forward_layer_parallel(const Layer& layer, const ExpertSet& in, std::span<const double> z,
                            const ConstraintSet& cs, std::span<std::uint32_t> active, ExpertSet& out,
                            std::size_t layer_index);

void update_layer_serial(Layer& layer, const ExpertSet& in, std::span<const std::uint32_t> active,
                         const ExpertSet& out, std::span<const double> y, double learning_rate,
                         const ConstraintSet& cs, std::size_t layer_index);
void update_layer_parallel(Layer& layer, const ExpertSet& in, std::span<const std::uint32_t> active,
                           const ExpertSet& out, std::span<const double> y, double learning_rate,
                           const ConstraintSet& cs, std::size_t layer_index);

}  // namespace kernels

}  // namespace ggln
