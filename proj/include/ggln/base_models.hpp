#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ggln/gaussian.hpp"

namespace ggln {

/// Constant experts whose means span the target range.
/// D == 1: two univariate experts at -r and +r.
/// D >= 2: 2D isotropic experts at +/- r D e_i.
std::vector<GaussianExpert> bias_experts(double r, std::size_t dim, double sigma2_bias);

/// One univariate expert N(x_j, sigma_fixed^2) per feature.
std::vector<Univariate> feature_experts(std::span<const double> x, double sigma_fixed);

/// Incremental Bayesian linear regression y ~ N(theta x + beta, 1 / tau) with
/// independent N(0, 1 / tau0) priors on theta and beta. Only the four
/// sufficient statistics are stored.
struct BLRState {
  double sum_xy = 0.0;
  double sum_x2 = 0.0;
  double sum_y = 0.0;
  double n = 0.0;
  double tau = 1.0;
  double tau0 = 1.0;

  double theta_precision() const { return tau0 + tau * sum_x2; }
  double theta_mean() const { return tau * sum_xy / theta_precision(); }
  double beta_precision() const { return tau0 + tau * n; }
  double beta_mean() const { return tau * sum_y / beta_precision(); }
};

BLRState blr_update(BLRState state, double x, double y);

/// Posterior predictive N(mu_theta x + mu_beta, x^2 / tau_theta + 1 / tau_beta + 1 / tau).
Univariate blr_predict(const BLRState& state, double x);

/// One BLR model per feature, updated and queried together.
class BLRBank {
 public:
  BLRBank(std::size_t features, double tau, double tau0);

  std::size_t size() const { return states_.size(); }
  const BLRState& state(std::size_t j) const { return states_[j]; }

  void predict(std::span<const double> x, std::span<Univariate> out) const;
  void update(std::span<const double> x, double y);

 private:
  std::vector<BLRState> states_;
};

}  // namespace ggln
