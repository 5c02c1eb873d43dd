#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ggln {

class ZeroDensity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Bayesian-tracking weights over m models. Starts at w_i = 1/m, t = 1.
struct SwitchingState {
  std::vector<double> weights;
  std::size_t t = 1;

  SwitchingState() = default;
  explicit SwitchingState(std::size_t models);
};

/// pi = sum_i w_i rho_i, then
///   w_i <- a / (m - 1) + ((1 - a) - a / (m - 1)) w_i rho_i / pi,  a = 1 / (t + 1),
/// renormalized to sum to 1. Returns pi. Throws ZeroDensity if pi == 0.
double switching_step(SwitchingState& st, std::span<const double> densities);

/// Same recurrence on log densities; returns log pi. Avoids underflow when the
/// individual densities are tiny.
double switching_step_log(SwitchingState& st, std::span<const double> log_densities);

/// log sum_i w_i exp(log_rho_i) under the current weights.
double switching_log_mixture(const SwitchingState& st, std::span<const double> log_densities);

}  // namespace ggln
