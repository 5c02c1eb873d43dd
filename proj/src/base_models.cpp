#include "ggln/base_models.hpp"

#include <cmath>

namespace ggln {

std::vector<GaussianExpert> bias_experts(double r, std::size_t dim, double sigma2_bias) {
  if (!(r > 0.0)) throw ValidationError("bias range r must be positive");
  if (dim == 0) throw ValidationError("target dimension must be >= 1");
  if (!(sigma2_bias > 0.0)) throw ValidationError("bias variance must be positive");
  std::vector<GaussianExpert> out;
  if (dim == 1) {
    out.emplace_back(Univariate{-r, sigma2_bias});
    out.emplace_back(Univariate{r, sigma2_bias});
    return out;
  }
  const double reach = r * static_cast<double>(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector mean = Vector::Zero(static_cast<Eigen::Index>(dim));
      mean(static_cast<Eigen::Index>(i)) = sign * reach;
      out.emplace_back(Isotropic{std::move(mean), 1.0 / sigma2_bias});
    }
  }
  return out;
}

std::vector<Univariate> feature_experts(std::span<const double> x, double sigma_fixed) {
  if (!(sigma_fixed > 0.0)) throw ValidationError("feature expert width must be positive");
  std::vector<Univariate> out;
  out.reserve(x.size());
  for (double v : x) out.push_back(make_univariate(v, sigma_fixed * sigma_fixed));
  return out;
}

BLRState blr_update(BLRState s, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw ValidationError("BLR update needs finite inputs");
  s.sum_xy += x * y;
  s.sum_x2 += x * x;
  s.sum_y += y;
  s.n += 1.0;
  return s;
}

Univariate blr_predict(const BLRState& s, double x) {
  if (!std::isfinite(x)) throw ValidationError("BLR prediction needs a finite input");
  const double tt = s.theta_precision();
  const double tb = s.beta_precision();
  return {s.theta_mean() * x + s.beta_mean(), x * x / tt + 1.0 / tb + 1.0 / s.tau};
}

BLRBank::BLRBank(std::size_t features, double tau, double tau0) {
  if (!(tau > 0.0) || !(tau0 > 0.0)) throw ValidationError("BLR precisions must be positive");
  BLRState proto;
  proto.tau = tau;
  proto.tau0 = tau0;
  states_.assign(features, proto);
}

void BLRBank::predict(std::span<const double> x, std::span<Univariate> out) const {
  for (std::size_t j = 0; j < states_.size(); ++j) out[j] = blr_predict(states_[j], x[j]);
}

void BLRBank::update(std::span<const double> x, double y) {
  for (std::size_t j = 0; j < states_.size(); ++j) states_[j] = blr_update(states_[j], x[j], y);
}

}  // namespace ggln
