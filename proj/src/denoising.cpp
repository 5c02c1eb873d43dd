#include "ggln/denoising.hpp"

#include <cmath>

namespace ggln {

void DenoiserConfig::validate() const {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("denoise step must lie in (0, 1]");
  if (!(sigma2_base > 0.0)) throw ValidationError("base variance must be positive");
}

void HMCConfig::validate() const {
  if (steps < 1 || substeps < 1) throw ValidationError("HMC needs at least one step and substep");
  if (!(epsilon > 0.0)) throw ValidationError("HMC epsilon must be positive");
  if (!(mass > 0.0)) throw ValidationError("HMC mass must be positive");
}

NetworkConfig denoiser_network(std::size_t dim) {
  NetworkConfig cfg;
  cfg.layer_sizes = {64, 64, 1};
  cfg.context_dim = 8;
  cfg.side_info_dim = dim;
  cfg.base_count = 1;
  cfg.target_dim = dim;
  cfg.form = dim == 1 ? Form::univariate : Form::isotropic;
  cfg.learning_rate = 0.01;
  cfg.context_bias_scale = 0.5;
  cfg.aggregation = Aggregation::top_neuron;
  cfg.constraints.use_barrier = false;
  cfg.constraints.w_max = 1000.0;
  cfg.constraints.sigma2_min = 1e-4;
  cfg.constraints.sigma2_max = 1e3;
  return cfg;
}

ExpertSet denoiser_base(std::span<const double> x, double sigma2_base) {
  const std::size_t d = x.size();
  ExpertSet base(d == 1 ? Form::univariate : Form::isotropic, d, 1);
  std::copy(x.begin(), x.end(), base.means.begin());
  base.precisions[0] = 1.0 / sigma2_base;
  return base;
}

void train_denoiser(Network& net, const Dataset& data, const DenoiserConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t d = data.features;
  if (net.config().target_dim != d || net.config().side_info_dim != d) {
    throw ValidationError("denoiser network must map the data dimension to itself");
  }
  std::normal_distribution<double> g(0.0, 1.0);
  const double sd = std::sqrt(cfg.lambda);
  std::vector<double> fixed;
  if (cfg.fixed_noise) {
    fixed.resize(data.rows * d);
    for (auto& v : fixed) v = sd * g(rng);
  }
  std::vector<double> noisy(d);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    for (std::size_t i : epoch_order(data.rows, rng)) {
      const auto x = data.row_x(i);
      for (std::size_t k = 0; k < d; ++k) noisy[k] = x[k] + (cfg.fixed_noise ? fixed[i * d + k] : sd * g(rng));
      net.infer_update(denoiser_base(noisy, cfg.sigma2_base), noisy, x);
    }
  }
}

Vector denoised_mean(const Network& net, std::span<const double> x, const DenoiserConfig& cfg) {
  return net.infer(denoiser_base(x, cfg.sigma2_base), x).mean();
}

Vector score_field(const Network& net, std::span<const double> x, const DenoiserConfig& cfg) {
  const Vector mu = denoised_mean(net, x, cfg);
  const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  return (mu - xv) / cfg.lambda;
}

std::vector<Vector> denoise_steps(const Network& net, std::span<const double> x0, std::size_t n_steps,
                                  const DenoiserConfig& cfg, const std::vector<bool>* mask) {
  const auto d = static_cast<Eigen::Index>(x0.size());
  if (mask && mask->size() != x0.size()) throw ValidationError("mask size differs from the point dimension");
  const Eigen::Map<const Vector> start(x0.data(), d);
  std::vector<Vector> traj{start};
  Vector x = start;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const Vector mu = denoised_mean(net, std::span<const double>(x.data(), x.size()), cfg);
    if (!mask) {
      x = mu;
    } else {
      x += cfg.step * (mu - x);
      for (Eigen::Index j = 0; j < d; ++j) {
        if (!(*mask)[static_cast<std::size_t>(j)]) x(j) = start(j);
      }
    }
    traj.push_back(x);
  }
  return traj;
}

void leapfrog(const ScoreFn& score, Vector& x, Vector& p, double epsilon, std::size_t n, double mass) {
  // The force is the score: -grad U = grad log p.
  p += 0.5 * epsilon * score(x);
  for (std::size_t i = 0; i < n; ++i) {
    x += (epsilon / mass) * p;
    if (i + 1 < n) p += epsilon * score(x);
  }
  p += 0.5 * epsilon * score(x);
}

std::vector<Vector> hmc_sample(const ScoreFn& score, const Vector& x0, const HMCConfig& cfg, Rng& rng) {
  cfg.validate();
  std::normal_distribution<double> g(0.0, 1.0);
  const double sd = std::sqrt(cfg.mass);
  std::vector<Vector> out;
  out.reserve(cfg.steps);
  Vector x = x0;
  Vector p(x0.size());
  for (std::size_t s = 0; s < cfg.steps; ++s) {
    for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = sd * g(rng);
    leapfrog(score, x, p, cfg.epsilon, cfg.substeps, cfg.mass);
    out.push_back(x);
  }
  return out;
}

}  // namespace ggln
