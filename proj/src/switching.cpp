#include "ggln/switching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ggln/gaussian.hpp"

namespace ggln {

namespace {

void check(const SwitchingState& st, std::size_t n) {
  if (st.weights.size() < 2) throw ValidationError("switching needs at least two models");
  if (n != st.weights.size()) throw ValidationError("density count does not match model count");
}

void renormalize(std::vector<double>& w) {
  double s = 0.0;
  for (double& v : w) {
    v = std::clamp(v, 0.0, 1.0);
    s += v;
  }
  for (double& v : w) v /= s;
}

}  // namespace

SwitchingState::SwitchingState(std::size_t models) : weights(models, 1.0 / static_cast<double>(models)) {}

double switching_step(SwitchingState& st, std::span<const double> densities) {
  check(st, densities.size());
  const double m = static_cast<double>(st.weights.size());
  double pi = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    if (!(densities[i] >= 0.0) || !std::isfinite(densities[i])) {
      throw ValidationError("densities must be finite and non-negative");
    }
    pi += st.weights[i] * densities[i];
  }
  if (!(pi > 0.0)) throw ZeroDensity("every model assigns zero density to the target");
  const double alpha = 1.0 / static_cast<double>(st.t + 1);
  const double floor = alpha / (m - 1.0);
  const double gain = (1.0 - alpha) - floor;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    st.weights[i] = floor + gain * st.weights[i] * densities[i] / pi;
  }
  renormalize(st.weights);
  ++st.t;
  return pi;
}

double switching_log_mixture(const SwitchingState& st, std::span<const double> log_densities) {
  check(st, log_densities.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log_densities.size(); ++i) {
    if (st.weights[i] > 0.0) top = std::max(top, std::log(st.weights[i]) + log_densities[i]);
  }
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (std::size_t i = 0; i < log_densities.size(); ++i) {
    if (st.weights[i] > 0.0) s += std::exp(std::log(st.weights[i]) + log_densities[i] - top);
  }
  return top + std::log(s);
}

double switching_step_log(SwitchingState& st, std::span<const double> log_densities) {
  const double log_pi = switching_log_mixture(st, log_densities);
  if (!std::isfinite(log_pi)) throw ZeroDensity("every model assigns zero density to the target");
  const double m = static_cast<double>(st.weights.size());
  const double alpha = 1.0 / static_cast<double>(st.t + 1);
  const double floor = alpha / (m - 1.0);
  const double gain = (1.0 - alpha) - floor;
  for (std::size_t i = 0; i < log_densities.size(); ++i) {
    const double posterior = st.weights[i] > 0.0 ? std::exp(std::log(st.weights[i]) + log_densities[i] - log_pi) : 0.0;
    st.weights[i] = floor + gain * posterior;
  }
  renormalize(st.weights);
  ++st.t;
  return log_pi;
}

}  // namespace ggln
