#include "ggln/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "ggln/base_models.hpp"

namespace ggln {

namespace {

constexpr char kMagic[8] = {'G', 'G', 'L', 'N', 'S', 'N', 'A', 'P'};
constexpr std::uint32_t kSnapshotVersion = 1;

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite");
  }
}

// Little-endian fixed-width encoding for snapshots.
void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw ValidationError("truncated network snapshot");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_optional(std::ostream& out, const std::optional<double>& v) {
  put_u64(out, v.has_value() ? 1 : 0);
  put_f64(out, v.value_or(0.0));
}

std::optional<double> get_optional(std::istream& in) {
  const bool has = get_u64(in) != 0;
  const double v = get_f64(in);
  return has ? std::optional<double>(v) : std::nullopt;
}

}  // namespace

std::string to_string(Aggregation a) { return a == Aggregation::switching ? "switching" : "top_neuron"; }

Aggregation aggregation_from_string(const std::string& s) {
  if (s == "switching") return Aggregation::switching;
  if (s == "top_neuron" || s == "top") return Aggregation::top_neuron;
  throw ValidationError("unknown aggregation '" + s + "'");
}

void NetworkConfig::validate() const {
  if (layer_sizes.empty()) throw ValidationError("network needs at least one layer");
  for (auto k : layer_sizes) {
    if (k == 0) throw ValidationError("layer sizes must be positive");
  }
  if (context_dim == 0 || context_dim > 20) throw ValidationError("context dimension must be in [1, 20]");
  if (side_info_dim == 0) throw ValidationError("side information dimension must be >= 1");
  if (target_dim == 0) throw ValidationError("target dimension must be >= 1");
  if (form == Form::univariate && target_dim != 1) throw ValidationError("univariate form needs target_dim 1");
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) throw ValidationError("learning rate must be in (0, 1)");
  if (!(bias_r > 0.0)) throw ValidationError("bias range must be positive");
  if (!(sigma2_bias > 0.0)) throw ValidationError("bias variance must be positive");
  if (!(context_bias_scale >= 0.0)) throw ValidationError("context bias scale must be non-negative");
  constraints.validate();
  if ((constraints.mu_min || constraints.mu_max) && target_dim != 1) {
    throw ValidationError("mean bounds are only supported for univariate targets");
  }
  if (aggregation == Aggregation::switching) {
    std::size_t n = 0;
    for (auto k : layer_sizes) n += k;
    if (n < 2) throw ValidationError("switching aggregation needs at least two neurons");
  }
}

NeuronError::NeuronError(std::size_t l, std::size_t k, const std::string& what)
    : std::runtime_error("layer " + std::to_string(l) + " neuron " + std::to_string(k) + ": " + what),
      layer(l),
      neuron(k) {}

GaussianExpert ForwardPass::neuron(std::size_t layer, std::size_t k) const {
  if (layer == 0 || layer > inputs.size()) throw ValidationError("layer index out of range");
  if (layer == inputs.size()) return top_layer.get(k);
  return inputs[layer].get(k);
}

Vector Prediction::mean() const {
  if (aggregation == Aggregation::top_neuron) {
    return std::visit(
        [](const auto& g) -> Vector {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Univariate>) {
            return Vector::Constant(1, g.mean);
          } else {
            return g.mean;
          }
        },
        top);
  }
  Vector m = Vector::Zero(static_cast<Eigen::Index>(neurons.dim));
  for (std::size_t i = 0; i < neurons.count; ++i) {
    m += mixture_weights[i] * Eigen::Map<const Vector>(neurons.mean(i).data(), m.size());
  }
  return m;
}

double Prediction::log_density(std::span<const double> y) const {
  if (aggregation == Aggregation::top_neuron) {
    return std::visit(
        [&](const auto& g) -> double {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Univariate>) {
            return ggln::log_density(g, y[0]);
          } else {
            return ggln::log_density(g, Eigen::Map<const Vector>(y.data(), g.mean.size()));
          }
        },
        top);
  }
  std::vector<double> logs(neurons.count);
  for (std::size_t i = 0; i < neurons.count; ++i) logs[i] = neurons.log_density(i, y);
  SwitchingState st;
  st.weights = mixture_weights;
  return switching_log_mixture(st, logs);
}

GaussianExpert Prediction::expert() const {
  if (aggregation == Aggregation::top_neuron) return top;
  const auto d = static_cast<Eigen::Index>(neurons.dim);
  const Vector m = mean();
  if (neurons.form == Form::full) {
    Matrix second = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < neurons.count; ++i) {
      const auto g = std::get<FullCovariance>(neurons.get(i));
      second += mixture_weights[i] * (Matrix(g.precision.inverse()) + g.mean * g.mean.transpose());
    }
    const Matrix cov = second - m * m.transpose();
    return FullCovariance{m, cov.inverse()};
  }
  double second = 0.0;
  for (std::size_t i = 0; i < neurons.count; ++i) {
    const double mu2 = Eigen::Map<const Vector>(neurons.mean(i).data(), d).squaredNorm();
    second += mixture_weights[i] * (static_cast<double>(d) / neurons.precisions[i] + mu2);
  }
  const double var = std::max((second - m.squaredNorm()) / static_cast<double>(d), 1e-300);
  if (neurons.form == Form::univariate) return Univariate{m(0), var};
  return Isotropic{m, 1.0 / var};
}

Network::Network(NetworkConfig cfg, Rng& rng) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const auto bias_list = bias_experts(cfg_.bias_r, cfg_.target_dim, cfg_.sigma2_bias);
  bias_ = make_expert_set(bias_list, cfg_.form, cfg_.target_dim);
  std::size_t prev = cfg_.base_count;
  for (auto k : cfg_.layer_sizes) {
    Layer layer;
    layer.size = k;
    layer.fan_in = prev + bias_.count;
    layer.cells = std::size_t{1} << cfg_.context_dim;
    layer.contexts.reserve(k);
    for (std::size_t n = 0; n < k; ++n) {
      layer.contexts.push_back(sample_composed(cfg_.side_info_dim, cfg_.context_dim, cfg_.context_bias_scale, rng));
    }
    layer.weights.assign(k * layer.cells * layer.fan_in, 1.0 / static_cast<double>(layer.fan_in));
    layers_.push_back(std::move(layer));
    prev = k;
  }
  if (cfg_.aggregation == Aggregation::switching) switching_ = SwitchingState(neuron_count());
}

std::size_t Network::neuron_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.size;
  return n;
}

void Network::check_inputs(const ExpertSet& base, std::span<const double> z) const {
  if (base.count != cfg_.base_count) throw ValidationError("wrong number of base experts");
  if (base.form != cfg_.form || base.dim != cfg_.target_dim) throw ValidationError("base experts have the wrong form");
  if (z.size() != cfg_.side_info_dim) throw ValidationError("side information dimension mismatch");
  check_finite(z, "side information");
  check_finite(base.means, "base expert means");
  for (double p : base.precisions) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("base expert precisions must be positive");
  }
}

ForwardPass Network::forward(const ExpertSet& base, std::span<const double> z) const {
  check_inputs(base, z);
  ForwardPass pass;
  const std::size_t depth = layers_.size();
  pass.inputs.reserve(depth);
  pass.active.resize(depth);
  std::size_t prev = cfg_.base_count;
  for (std::size_t l = 0; l < depth; ++l) {
    ExpertSet in(cfg_.form, cfg_.target_dim, prev + bias_.count);
    in.assign_block(prev, bias_);
    pass.inputs.push_back(std::move(in));
    prev = layers_[l].size;
  }
  pass.inputs[0].assign_block(0, base);
  pass.top_layer = ExpertSet(cfg_.form, cfg_.target_dim, layers_.back().size);
  for (std::size_t l = 0; l < depth; ++l) {
    pass.active[l].resize(layers_[l].size);
    ExpertSet& out = l + 1 < depth ? pass.inputs[l + 1] : pass.top_layer;
    if (exec_ == Exec::parallel) {
      kernels::forward_layer_parallel(layers_[l], pass.inputs[l], z, cfg_.constraints, pass.active[l], out, l + 1);
    } else {
      kernels::forward_layer_serial(layers_[l], pass.inputs[l], z, cfg_.constraints, pass.active[l], out, l + 1);
    }
  }
  return pass;
}

Prediction Network::make_prediction(const ForwardPass& pass) const {
  Prediction p;
  p.aggregation = cfg_.aggregation;
  p.top = pass.top_layer.get(0);
  if (cfg_.aggregation == Aggregation::switching) {
    p.neurons = ExpertSet(cfg_.form, cfg_.target_dim, neuron_count());
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const ExpertSet& out = l + 1 < layers_.size() ? pass.inputs[l + 1] : pass.top_layer;
      for (std::size_t k = 0; k < layers_[l].size; ++k) {
        std::copy_n(out.mean(k).data(), out.dim, p.neurons.mean(offset).data());
        p.neurons.precisions[offset] = out.precisions[k];
        if (out.form == Form::full) std::copy_n(out.matrix(k).data(), out.dim * out.dim, p.neurons.matrix(offset).data());
        ++offset;
      }
    }
    p.mixture_weights = switching_.weights;
  }
  return p;
}

Prediction Network::infer(const ExpertSet& base, std::span<const double> z) const {
  return make_prediction(forward(base, z));
}

Prediction Network::infer_update(const ExpertSet& base, std::span<const double> z, std::span<const double> y) {
  return infer_update(base, z, y, cfg_.learning_rate);
}

Prediction Network::infer_update(const ExpertSet& base, std::span<const double> z, std::span<const double> y,
                                 double learning_rate) {
  if (y.size() != cfg_.target_dim) throw ValidationError("target dimension mismatch");
  check_finite(y, "target");
  if (!(learning_rate >= 0.0)) throw ValidationError("learning rate must be non-negative");
  const ForwardPass pass = forward(base, z);
  Prediction pred = make_prediction(pass);
  if (cfg_.aggregation == Aggregation::switching) {
    std::vector<double> logs(pred.neurons.count);
    for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = pred.neurons.log_density(i, y);
    switching_step_log(switching_, logs);
  }
  if (learning_rate == 0.0) return pred;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const ExpertSet& out = l + 1 < layers_.size() ? pass.inputs[l + 1] : pass.top_layer;
    if (exec_ == Exec::parallel) {
      kernels::update_layer_parallel(layers_[l], pass.inputs[l], pass.active[l], out, y, learning_rate,
                                     cfg_.constraints, l + 1);
    } else {
      kernels::update_layer_serial(layers_[l], pass.inputs[l], pass.active[l], out, y, learning_rate,
                                   cfg_.constraints, l + 1);
    }
  }
  return pred;
}

std::vector<std::vector<std::uint32_t>> Network::active_cells(std::span<const double> z) const {
  if (z.size() != cfg_.side_info_dim) throw ValidationError("side information dimension mismatch");
  check_finite(z, "side information");
  std::vector<std::vector<std::uint32_t>> out(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    out[l].resize(layers_[l].size);
    for (std::size_t k = 0; k < layers_[l].size; ++k) out[l][k] = context_index_unchecked(layers_[l].contexts[k], z);
  }
  return out;
}

double Network::predict_density(const ExpertSet& base, std::span<const double> z, std::span<const double> y) const {
  if (y.size() != cfg_.target_dim) throw ValidationError("target dimension mismatch");
  return std::exp(infer(base, z).log_density(y));
}

void Network::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  put_u64(out, kSnapshotVersion);
  put_u64(out, cfg_.layer_sizes.size());
  for (auto k : cfg_.layer_sizes) put_u64(out, k);
  put_u64(out, cfg_.context_dim);
  put_u64(out, cfg_.side_info_dim);
  put_u64(out, cfg_.base_count);
  put_u64(out, cfg_.target_dim);
  put_u64(out, static_cast<std::uint64_t>(cfg_.form));
  put_u64(out, static_cast<std::uint64_t>(cfg_.aggregation));
  put_f64(out, cfg_.learning_rate);
  put_f64(out, cfg_.bias_r);
  put_f64(out, cfg_.sigma2_bias);
  put_f64(out, cfg_.context_bias_scale);
  const auto& cs = cfg_.constraints;
  put_f64(out, cs.w_max);
  put_f64(out, cs.w_min);
  put_f64(out, cs.sigma2_min);
  put_f64(out, cs.sigma2_max);
  put_optional(out, cs.mu_min);
  put_optional(out, cs.mu_max);
  put_f64(out, cs.xi);
  put_u64(out, cs.use_barrier ? 1 : 0);
  put_f64(out, cs.barrier_margin);
  put_u64(out, switching_.t);
  put_u64(out, switching_.weights.size());
  for (double w : switching_.weights) put_f64(out, w);
  for (const auto& layer : layers_) {
    for (std::size_t k = 0; k < layer.size; ++k) {
      for (const auto& h : layer.contexts[k].contexts()) {
        for (double v : h.normal()) put_f64(out, v);
        put_f64(out, h.offset());
      }
      for (std::size_t i = 0; i < layer.cells * layer.fan_in; ++i) {
        put_f64(out, layer.weights[k * layer.cells * layer.fan_in + i]);
      }
    }
  }
  if (!out) throw std::runtime_error("failed to write network snapshot");
}

Network Network::load(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw ValidationError("not a network snapshot (bad magic)");
  }
  if (get_u64(in) != kSnapshotVersion) throw ValidationError("unsupported network snapshot version");
  Network net;
  auto& cfg = net.cfg_;
  const auto depth = get_u64(in);
  if (depth == 0 || depth > 1024) throw ValidationError("corrupt snapshot layer count");
  cfg.layer_sizes.resize(depth);
  for (auto& k : cfg.layer_sizes) k = get_u64(in);
  cfg.context_dim = get_u64(in);
  cfg.side_info_dim = get_u64(in);
  cfg.base_count = get_u64(in);
  cfg.target_dim = get_u64(in);
  const auto form = get_u64(in);
  const auto agg = get_u64(in);
  if (form > 2 || agg > 1) throw ValidationError("corrupt snapshot enums");
  cfg.form = static_cast<Form>(form);
  cfg.aggregation = static_cast<Aggregation>(agg);
  cfg.learning_rate = get_f64(in);
  cfg.bias_r = get_f64(in);
  cfg.sigma2_bias = get_f64(in);
  cfg.context_bias_scale = get_f64(in);
  auto& cs = cfg.constraints;
  cs.w_max = get_f64(in);
  cs.w_min = get_f64(in);
  cs.sigma2_min = get_f64(in);
  cs.sigma2_max = get_f64(in);
  cs.mu_min = get_optional(in);
  cs.mu_max = get_optional(in);
  cs.xi = get_f64(in);
  cs.use_barrier = get_u64(in) != 0;
  cs.barrier_margin = get_f64(in);
  cfg.validate();
  net.switching_.t = get_u64(in);
  net.switching_.weights.resize(get_u64(in));
  for (auto& w : net.switching_.weights) w = get_f64(in);
  net.bias_ = make_expert_set(bias_experts(cfg.bias_r, cfg.target_dim, cfg.sigma2_bias), cfg.form, cfg.target_dim);
  std::size_t prev = cfg.base_count;
  for (auto k : cfg.layer_sizes) {
    Layer layer;
    layer.size = k;
    layer.fan_in = prev + net.bias_.count;
    layer.cells = std::size_t{1} << cfg.context_dim;
    layer.weights.resize(k * layer.cells * layer.fan_in);
    for (std::size_t n = 0; n < k; ++n) {
      std::vector<HalfSpaceContext> hs;
      for (std::size_t s = 0; s < cfg.context_dim; ++s) {
        std::vector<double> v(cfg.side_info_dim);
        for (auto& x : v) x = get_f64(in);
        const double b = get_f64(in);
        hs.emplace_back(std::move(v), b);
      }
      layer.contexts.emplace_back(std::move(hs));
      for (std::size_t i = 0; i < layer.cells * layer.fan_in; ++i) {
        layer.weights[n * layer.cells * layer.fan_in + i] = get_f64(in);
      }
    }
    net.layers_.push_back(std::move(layer));
    prev = k;
  }
  return net;
}

}  // namespace ggln
