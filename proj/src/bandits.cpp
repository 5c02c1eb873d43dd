#include "ggln/bandits.hpp"

#include <cmath>
#include <limits>

#include "ggln/base_models.hpp"

namespace ggln {

double BanditEnv::sample_reward(std::span<const double> z, std::size_t a, Rng& rng) const {
  std::normal_distribution<double> g(0.0, 1.0);
  return expected_reward(z, a) + noise() * g(rng);
}

double BanditEnv::best_expected(std::span<const double> z) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < actions(); ++a) best = std::max(best, expected_reward(z, a));
  return best;
}

WheelEnv::WheelEnv(WheelConfig cfg) : cfg_(cfg) {
  if (!(cfg_.delta > 0.0 && cfg_.delta < 1.0)) throw ValidationError("wheel delta must lie in (0, 1)");
  if (!(cfg_.noise >= 0.0)) throw ValidationError("wheel noise must be non-negative");
}

std::vector<double> WheelEnv::sample_context(Rng& rng) const {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::vector<double> z{u(rng), u(rng)};
    if (z[0] * z[0] + z[1] * z[1] <= 1.0) return z;
  }
}

double WheelEnv::expected_reward(std::span<const double> z, std::size_t a) const {
  if (a == 0) return cfg_.mean_safe;
  if (std::hypot(z[0], z[1]) <= cfg_.delta) return cfg_.mean_base;
  // quadrants numbered 1..4 counter-clockwise from (+, +)
  std::size_t q = 0;
  if (z[0] >= 0.0) {
    q = z[1] >= 0.0 ? 1 : 4;
  } else {
    q = z[1] >= 0.0 ? 2 : 3;
  }
  return a == q ? cfg_.mean_high : cfg_.mean_base;
}

LinearGaussianEnv::LinearGaussianEnv(LinearBanditConfig cfg) : cfg_(cfg) {
  if (cfg_.actions < 1 || cfg_.context_dim < 1) throw ValidationError("linear bandit needs actions and context");
  Rng rng(cfg_.seed);
  std::normal_distribution<double> g(0.0, 1.0);
  theta_.resize(cfg_.actions * cfg_.context_dim);
  for (auto& v : theta_) v = g(rng);
}

std::vector<double> LinearGaussianEnv::sample_context(Rng& rng) const {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> z(cfg_.context_dim);
  for (auto& v : z) v = u(rng);
  return z;
}

double LinearGaussianEnv::expected_reward(std::span<const double> z, std::size_t a) const {
  double r = 0.0;
  for (std::size_t j = 0; j < cfg_.context_dim; ++j) r += theta_[a * cfg_.context_dim + j] * z[j];
  return r;
}

GLCBConfig::GLCBConfig() {
  net.layer_sizes = {1000, 100, 1};
  net.context_dim = 1;
  net.learning_rate = 0.003;
  net.context_bias_scale = 0.05;
  net.aggregation = Aggregation::top_neuron;
}

std::size_t glcb_argmax(std::span<const double> mu, std::span<const double> pseudo_counts, double t, double c) {
  const double log_t = std::log(t);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < mu.size(); ++a) {
    double bonus = 0.0;
    if (c > 0.0) {
      bonus = pseudo_counts[a] > 0.0 ? c * std::sqrt(std::max(log_t, 0.0) / pseudo_counts[a])
                                     : std::numeric_limits<double>::infinity();
    }
    const double score = mu[a] + bonus;
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

GLCBAgent::GLCBAgent(const GLCBConfig& cfg, std::size_t context_dim, std::size_t actions, Rng& rng) : cfg_(cfg) {
  if (!(cfg_.bonus >= 0.0)) throw ValidationError("exploration bonus must be non-negative");
  if (!(cfg_.reward_scale > 0.0)) throw ValidationError("reward scale must be positive");
  cfg_.net.side_info_dim = context_dim;
  cfg_.net.base_count = context_dim;
  cfg_.net.target_dim = 1;
  cfg_.net.form = Form::univariate;
  nets_.reserve(actions);
  for (std::size_t a = 0; a < actions; ++a) {
    nets_.emplace_back(cfg_.net, rng);
    nets_.back().set_exec(Exec::serial);
    std::vector<std::vector<std::uint64_t>> c;
    for (const auto& layer : nets_.back().layers()) c.emplace_back(layer.size * layer.cells, 0);
    counts_.push_back(std::move(c));
  }
  updates_.assign(actions, 0);
}

ExpertSet GLCBAgent::base(std::span<const double> z) const {
  return make_expert_set(feature_experts(z, cfg_.sigma_fixed));
}

double GLCBAgent::pseudo_count(std::span<const double> z, std::size_t a) const {
  const auto active = nets_[a].active_cells(z);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t l = 0; l < active.size(); ++l) {
    const std::size_t cells = nets_[a].layers()[l].cells;
    for (std::size_t k = 0; k < active[l].size(); ++k) {
      sum += static_cast<double>(counts_[a][l][k * cells + active[l][k]]);
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

double GLCBAgent::predicted_reward(std::span<const double> z, std::size_t a) const {
  return nets_[a].infer(base(z), z).mean()(0) / cfg_.reward_scale;
}

std::size_t GLCBAgent::select(std::span<const double> z, double t) const {
  std::vector<double> mu(nets_.size());
  std::vector<double> n(nets_.size());
  // Scores live in the networks' target units, where the bonus is calibrated.
  for (std::size_t a = 0; a < nets_.size(); ++a) {
    mu[a] = nets_[a].infer(base(z), z).mean()(0);
    n[a] = pseudo_count(z, a);
  }
  return glcb_argmax(mu, n, t, cfg_.bonus);
}

void GLCBAgent::update(std::span<const double> z, std::size_t a, double reward) {
  const double y = reward * cfg_.reward_scale;
  const auto active = nets_[a].active_cells(z);
  nets_[a].infer_update(base(z), z, std::span<const double>(&y, 1));
  for (std::size_t l = 0; l < active.size(); ++l) {
    const std::size_t cells = nets_[a].layers()[l].cells;
    for (std::size_t k = 0; k < active[l].size(); ++k) ++counts_[a][l][k * cells + active[l][k]];
  }
  ++updates_[a];
}

bool counters_conserved(const GLCBAgent& agent) {
  for (std::size_t a = 0; a < agent.actions(); ++a) {
    const auto& layers = agent.network(a).layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& c = agent.counters(a)[l];
      for (std::size_t k = 0; k < layers[l].size; ++k) {
        std::uint64_t sum = 0;
        for (std::size_t cell = 0; cell < layers[l].cells; ++cell) sum += c[k * layers[l].cells + cell];
        if (sum != agent.updates(a)) return false;
      }
    }
  }
  return true;
}

double BanditTrace::cumulative_reward() const {
  double s = 0.0;
  for (double r : rewards) s += r;
  return s;
}

BanditTrace run_bandit(const BanditEnv& env, GLCBAgent& agent, std::size_t horizon, Rng& rng) {
  if (agent.actions() != env.actions()) throw ValidationError("agent and environment disagree on actions");
  BanditTrace trace;
  double regret = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto z = env.sample_context(rng);
    const std::size_t a = agent.select(z, static_cast<double>(t));
    const double r = env.sample_reward(z, a, rng);
    trace.pseudo_counts.push_back(agent.pseudo_count(z, a));
    agent.update(z, a, r);
    regret += env.best_expected(z) - env.expected_reward(z, a);
    trace.actions.push_back(a);
    trace.rewards.push_back(r);
    trace.regret.push_back(regret);
  }
  return trace;
}

}  // namespace ggln
