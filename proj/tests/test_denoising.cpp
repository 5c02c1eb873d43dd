#include <doctest.h>

#include <cmath>

#include "ggln/denoising.hpp"

using namespace ggln;
using doctest::Approx;

namespace {
Network small_denoiser(std::size_t dim, Rng& rng) {
  NetworkConfig cfg = denoiser_network(dim);
  cfg.layer_sizes = {16, 1};
  cfg.context_dim = 4;
  return Network(cfg, rng);
}
}  // namespace

TEST_CASE("score field") {
  Rng rng(1);
  Network net = small_denoiser(2, rng);
  DenoiserConfig cfg;
  const double x[] = {0.3, -0.2};
  const Vector mu = denoised_mean(net, x, cfg);
  const Vector s = score_field(net, x, cfg);
  CHECK(((mu - Eigen::Map<const Vector>(x, 2)) / cfg.lambda - s).norm() == 0.0);

  // untrained identity: a single input weight of one on the base expert
  for (auto& layer : net.layers()) {
    for (std::size_t k = 0; k < layer.size; ++k) {
      for (std::size_t c = 0; c < layer.cells; ++c) {
        auto row = layer.row(k, c);
        std::fill(row.begin(), row.end(), 0.0);
        row[0] = 1.0;
      }
    }
  }
  CHECK(score_field(net, x, cfg).norm() == 0.0);
  const auto traj = denoise_steps(net, x, 5, cfg);
  CHECK(traj.size() == 6);
  for (const auto& p : traj) CHECK((p - Eigen::Map<const Vector>(x, 2)).norm() == 0.0);
}

TEST_CASE("masked steps never touch unmasked coordinates") {
  Rng rng(2);
  Network net = small_denoiser(3, rng);
  DenoiserConfig cfg;
  cfg.step = 0.3;
  const double x[] = {0.4, -0.7, 0.9};
  const std::vector<bool> mask{true, false, true};
  const auto traj = denoise_steps(net, x, 10, cfg, &mask);
  for (const auto& p : traj) CHECK(p(1) == -0.7);
  // composing two masked runs keeps the constraint
  const auto again = denoise_steps(net, std::span<const double>(traj.back().data(), 3), 10, cfg, &mask);
  for (const auto& p : again) CHECK(p(1) == -0.7);
  const std::vector<bool> short_mask{true};
  CHECK_THROWS_AS(denoise_steps(net, x, 1, cfg, &short_mask), ValidationError);
}

TEST_CASE("denoiser learns the Gaussian score") {
  // Data N(0, s^2 I): the optimal denoiser implies score -x / (s^2 + lambda).
  const double s2 = 0.09;
  Rng rng(3);
  Dataset data;
  data.rows = 20000;
  data.features = 2;
  std::normal_distribution<double> g(0.0, std::sqrt(s2));
  for (std::size_t i = 0; i < data.rows * 2; ++i) data.x.push_back(g(rng));
  NetworkConfig nc = denoiser_network(2);
  nc.layer_sizes = {32, 32, 1};
  nc.learning_rate = 0.003;
  Network net(nc, rng);
  DenoiserConfig cfg;
  cfg.lambda = 0.09;
  cfg.epochs = 3;
  train_denoiser(net, data, cfg, rng);
  double err = 0.0;
  double ref = 0.0;
  double dot = 0.0;
  double norm = 0.0;
  for (double a = -0.3; a <= 0.3001; a += 0.1) {
    for (double b = -0.3; b <= 0.3001; b += 0.1) {
      const double x[] = {a, b};
      const Vector s = score_field(net, x, cfg);
      for (int j = 0; j < 2; ++j) {
        const double want = -x[j] / (s2 + cfg.lambda);
        err += (s(j) - want) * (s(j) - want);
        ref += want * want;
        dot += s(j) * want;
        norm += s(j) * s(j);
      }
    }
  }
  CHECK(std::sqrt(err / ref) < 0.35);
  CHECK(dot / std::sqrt(norm * ref) > 0.95);
}

TEST_CASE("leapfrog") {
  SUBCASE("free motion") {
    const ScoreFn zero = [](const Vector& x) { return Vector::Zero(x.size()); };
    Vector x = Vector::Zero(2);
    Vector p{{0.5, -1.0}};
    leapfrog(zero, x, p, 0.01, 20, 2.0);
    CHECK(x(0) == Approx(20 * 0.01 * 0.25));
    CHECK(x(1) == Approx(20 * 0.01 * -0.5));
    CHECK(p(0) == 0.5);
  }
  SUBCASE("energy error is second order") {
    const ScoreFn gauss = [](const Vector& x) { return Vector(-x); };
    auto drift = [&](double eps) {
      Vector x{{1.0}};
      Vector p{{0.3}};
      const double h0 = 0.5 * (x.squaredNorm() + p.squaredNorm());
      leapfrog(gauss, x, p, eps, static_cast<std::size_t>(std::lround(1.0 / eps)), 1.0);
      return std::abs(0.5 * (x.squaredNorm() + p.squaredNorm()) - h0);
    };
    const double ratio = drift(0.1) / drift(0.05);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("HMC on the standard normal") {
  const ScoreFn gauss = [](const Vector& x) { return Vector(-x); };
  HMCConfig cfg;
  cfg.steps = 5000;
  cfg.substeps = 20;
  cfg.epsilon = 0.05;
  Rng rng(5);
  const auto samples = hmc_sample(gauss, Vector::Zero(2), cfg, rng);
  REQUIRE(samples.size() == 5000);
  for (int j = 0; j < 2; ++j) {
    double m = 0.0;
    for (const auto& s : samples) m += s(j);
    m /= 5000.0;
    double v = 0.0;
    for (const auto& s : samples) v += (s(j) - m) * (s(j) - m);
    v /= 4999.0;
    CHECK(std::abs(m) < 0.05);
    CHECK(std::abs(v - 1.0) < 0.1);
  }
  HMCConfig bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}
