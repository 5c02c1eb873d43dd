#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ggln/data.hpp"
#include "ggln/network.hpp"

namespace ggln {

struct DenoiserConfig {
  double lambda = 0.01;       // training noise variance
  double step = 0.002;        // interpolation length of a masked step
  double sigma2_base = 3.0;   // variance of the input-centred base expert
  bool fixed_noise = false;   // one noise draw per row instead of per presentation
  std::size_t epochs = 1;

  void validate() const;
};

/// Network settings used for the two-dimensional denoising runs.
NetworkConfig denoiser_network(std::size_t dim);

/// The single isotropic base expert centred on x.
ExpertSet denoiser_base(std::span<const double> x, double sigma2_base);

/// Online passes over the rows of `data`: x~ = x + N(0, lambda I), side
/// information x~, target x.
void train_denoiser(Network& net, const Dataset& data, const DenoiserConfig& cfg, Rng& rng);

/// Top mean mu(x) of the trained network.
Vector denoised_mean(const Network& net, std::span<const double> x, const DenoiserConfig& cfg);

/// (mu(x) - x) / lambda, an estimate of grad log p at x.
Vector score_field(const Network& net, std::span<const double> x, const DenoiserConfig& cfg);

/// Iterates x <- mu(x) `n_steps` times. With a mask, iterates
/// x <- x + step (mu(x) - x) and resets unmasked coordinates to x0 instead.
/// The returned trajectory starts with x0.
std::vector<Vector> denoise_steps(const Network& net, std::span<const double> x0, std::size_t n_steps,
                                  const DenoiserConfig& cfg, const std::vector<bool>* mask = nullptr);

using ScoreFn = std::function<Vector(const Vector&)>;

struct HMCConfig {
  std::size_t steps = 15000;
  std::size_t substeps = 150;
  double epsilon = 0.003;
  double mass = 1.0;

  void validate() const;
};

/// Leapfrog integration of `n` substeps from (x, p) under potential -log p.
void leapfrog(const ScoreFn& score, Vector& x, Vector& p, double epsilon, std::size_t n, double mass);

/// HMC without an acceptance test: each step resamples momentum and runs one
/// leapfrog trajectory. Returns the position after every step.
std::vector<Vector> hmc_sample(const ScoreFn& score, const Vector& x0, const HMCConfig& cfg, Rng& rng);

}  // namespace ggln
