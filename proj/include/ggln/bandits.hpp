#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ggln/network.hpp"

namespace ggln {

/// A stochastic contextual bandit with an expected-reward oracle for regret.
class BanditEnv {
 public:
  virtual ~BanditEnv() = default;
  virtual std::size_t context_dim() const = 0;
  virtual std::size_t actions() const = 0;
  virtual std::vector<double> sample_context(Rng& rng) const = 0;
  virtual double expected_reward(std::span<const double> z, std::size_t a) const = 0;
  virtual double noise() const = 0;

  double sample_reward(std::span<const double> z, std::size_t a, Rng& rng) const;
  double best_expected(std::span<const double> z) const;
};

/// Context uniform in the unit disk. Action 0 pays mean_safe everywhere; the
/// other four pay mean_base, except that outside radius delta the action
/// owning the context's quadrant pays mean_high.
struct WheelConfig {
  double delta = 0.5;
  double mean_safe = 1.2;
  double mean_base = 1.0;
  double mean_high = 50.0;
  double noise = 0.01;
};

class WheelEnv final : public BanditEnv {
 public:
  explicit WheelEnv(WheelConfig cfg);
  std::size_t context_dim() const override { return 2; }
  std::size_t actions() const override { return 5; }
  std::vector<double> sample_context(Rng& rng) const override;
  double expected_reward(std::span<const double> z, std::size_t a) const override;
  double noise() const override { return cfg_.noise; }

 private:
  WheelConfig cfg_;
};

/// Context uniform in [-1, 1]^d; action a pays theta_a . z + N(0, noise^2),
/// with theta_a ~ N(0, I) drawn once from `seed`.
struct LinearBanditConfig {
  std::size_t actions = 4;
  std::size_t context_dim = 4;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

class LinearGaussianEnv final : public BanditEnv {
 public:
  explicit LinearGaussianEnv(LinearBanditConfig cfg);
  std::size_t context_dim() const override { return cfg_.context_dim; }
  std::size_t actions() const override { return cfg_.actions; }
  std::vector<double> sample_context(Rng& rng) const override;
  double expected_reward(std::span<const double> z, std::size_t a) const override;
  double noise() const override { return cfg_.noise; }

 private:
  LinearBanditConfig cfg_;
  std::vector<double> theta_;
};

struct GLCBConfig {
  NetworkConfig net;           // shape and learning rate of every action's network
  double bonus = 1.0;          // c
  double reward_scale = 0.02;  // rewards are multiplied by this before learning
  double sigma_fixed = 1.0;    // width of the context-centred base experts

  GLCBConfig();
};

/// argmax_a mu[a] + c sqrt(log t / n[a]); n[a] == 0 gives an infinite bonus.
/// Ties go to the lowest index.
std::size_t glcb_argmax(std::span<const double> mu, std::span<const double> pseudo_counts, double t, double c);

/// One G-GLN per action plus visit counters for every (neuron, context cell).
class GLCBAgent {
 public:
  GLCBAgent(const GLCBConfig& cfg, std::size_t context_dim, std::size_t actions, Rng& rng);

  std::size_t actions() const { return nets_.size(); }
  const Network& network(std::size_t a) const { return nets_[a]; }
  std::size_t updates(std::size_t a) const { return updates_[a]; }
  /// Counters of action a, indexed [layer][neuron * cells + cell].
  const std::vector<std::vector<std::uint64_t>>& counters(std::size_t a) const { return counts_[a]; }

  /// Mean visit count of the cells z activates in action a's network.
  double pseudo_count(std::span<const double> z, std::size_t a) const;
  /// Predicted mean reward of action a, in reward units. Selection compares
  /// the unscaled network outputs instead.
  double predicted_reward(std::span<const double> z, std::size_t a) const;
  std::size_t select(std::span<const double> z, double t) const;
  void update(std::span<const double> z, std::size_t a, double reward);

 private:
  ExpertSet base(std::span<const double> z) const;

  GLCBConfig cfg_;
  std::vector<Network> nets_;
  std::vector<std::vector<std::vector<std::uint64_t>>> counts_;
  std::vector<std::size_t> updates_;
};

/// Every neuron's counters sum to the number of updates its network received.
bool counters_conserved(const GLCBAgent& agent);

struct BanditTrace {
  std::vector<std::size_t> actions;
  std::vector<double> rewards;
  std::vector<double> pseudo_counts;  // of the chosen action, before its update
  std::vector<double> regret;         // cumulative expected regret

  double cumulative_reward() const;
};

/// T steps of: context, GLCB choice, reward, one update of the chosen network.
BanditTrace run_bandit(const BanditEnv& env, GLCBAgent& agent, std::size_t horizon, Rng& rng);

}  // namespace ggln
