#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ggln/bandits.hpp"

using namespace ggln;

namespace {
GLCBConfig small_agent(double bonus) {
  GLCBConfig cfg;
  cfg.net.layer_sizes = {32, 8, 1};
  cfg.net.context_dim = 2;
  cfg.bonus = bonus;
  return cfg;
}

// One action is always best by a wide margin.
class Obvious final : public BanditEnv {
 public:
  std::size_t context_dim() const override { return 2; }
  std::size_t actions() const override { return 3; }
  std::vector<double> sample_context(Rng& rng) const override {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), u(rng)};
  }
  double expected_reward(std::span<const double>, std::size_t a) const override { return a == 2 ? 20.0 : 1.0; }
  double noise() const override { return 0.01; }
};
}  // namespace

TEST_CASE("selection rule") {
  const double e = std::numbers::e;
  const double mu[] = {0.0, 0.0};
  const double n[] = {4.0, 1.0};
  CHECK(glcb_argmax(mu, n, e, 1.0) == 1);
  const double greedy_mu[] = {0.3, 0.2};
  CHECK(glcb_argmax(greedy_mu, n, e, 0.0) == 0);
  const double fresh[] = {5.0, 0.0};
  CHECK(glcb_argmax(greedy_mu, fresh, e, 1.0) == 1);
  // log t = 1 and a count of one give a bonus of exactly one
  const double one[] = {1.0, 1.0};
  const double close[] = {0.0, 0.999};
  CHECK(glcb_argmax(close, one, e, 1.0) == 1);
}

TEST_CASE("pseudo counts") {
  Rng rng(1);
  GLCBAgent agent(small_agent(1.0), 2, 2, rng);
  const double z[] = {0.3, -0.4};
  CHECK(agent.pseudo_count(z, 0) == 0.0);
  agent.update(z, 0, 1.0);
  CHECK(agent.pseudo_count(z, 0) == 1.0);
  CHECK(agent.pseudo_count(z, 1) == 0.0);

  const double far[] = {-0.9, 0.9};
  for (int i = 0; i < 20; ++i) agent.update(z, 0, 1.0);
  CHECK(agent.pseudo_count(far, 0) < agent.pseudo_count(z, 0));
  CHECK(counters_conserved(agent));
}

TEST_CASE("wheel environment") {
  const WheelEnv env(WheelConfig{});
  const double inner[] = {0.1, 0.1};
  const double q1[] = {0.6, 0.6};
  const double q3[] = {-0.6, -0.6};
  CHECK(env.expected_reward(inner, 0) == 1.2);
  CHECK(env.expected_reward(inner, 1) == 1.0);
  CHECK(env.expected_reward(q1, 1) == 50.0);
  CHECK(env.expected_reward(q1, 3) == 1.0);
  CHECK(env.expected_reward(q3, 3) == 50.0);
  CHECK(env.best_expected(inner) == 1.2);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto z = env.sample_context(rng);
    CHECK(std::hypot(z[0], z[1]) <= 1.0);
  }
}

TEST_CASE("greedy finds an obvious arm") {
  Rng rng(3);
  const Obvious env;
  GLCBAgent agent(small_agent(0.0), 2, 3, rng);
  const auto trace = run_bandit(env, agent, 1500, rng);
  std::size_t hits = 0;
  for (std::size_t t = 500; t < 1500; ++t) hits += trace.actions[t] == 2;
  CHECK(hits >= 950);
  for (std::size_t t = 1; t < trace.regret.size(); ++t) CHECK(trace.regret[t] >= trace.regret[t - 1]);
  CHECK(trace.regret.front() >= 0.0);
  CHECK(counters_conserved(agent));
}

TEST_CASE("linear Gaussian environment") {
  const LinearGaussianEnv env(LinearBanditConfig{3, 2, 0.1, 7});
  const LinearGaussianEnv same(LinearBanditConfig{3, 2, 0.1, 7});
  const double z[] = {0.5, -0.25};
  for (std::size_t a = 0; a < 3; ++a) CHECK(env.expected_reward(z, a) == same.expected_reward(z, a));
}
