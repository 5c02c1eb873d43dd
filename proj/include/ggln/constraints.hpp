#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ggln/gaussian.hpp"

namespace ggln {

/// Raised when the backstop cannot produce a usable weight vector.
class InfeasibleWeights : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The feasible weight region for one neuron row, plus barrier settings.
///
/// Rows enforced: 0 <= w_i <= w_max, and the product precision
/// sum_i w_i tau_i in [1 / sigma2_max, 1 / sigma2_min]. Optional mean rows keep
/// the univariate product mean inside [mu_min, mu_max].
///
/// Barrier poles sit slightly outside each row (`barrier_margin`, absolute for
/// the box and mean rows, relative for the precision rows) so that every point
/// returned by the backstop has a finite barrier.
struct ConstraintSet {
  double w_max = 100.0;
  double w_min = 0.0;
  double sigma2_min = 1e-3;
  double sigma2_max = 1e3;
  std::optional<double> mu_min;
  std::optional<double> mu_max;
  double xi = 1e-4;
  bool use_barrier = true;
  double barrier_margin = 1e-2;

  void validate() const;
};

struct BarrierValue {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Phi(w) = sum_k -log(u_k - A_k' w) and its gradient (not scaled by xi).
/// `precisions` are the experts' tau_i (for full-covariance experts, the mean
/// diagonal precision). `means` may be empty; it is required only when mean
/// bounds are configured. Throws InfeasibleWeights outside the barrier domain.
BarrierValue barrier_penalty(std::span<const double> w, std::span<const double> precisions,
                             std::span<const double> means, const ConstraintSet& cs);
BarrierValue barrier_penalty(std::span<const double> w, std::span<const Univariate> experts,
                             const ConstraintSet& cs);

/// grad += scale * grad Phi(w), without allocating. Used in the update loop.
void accumulate_barrier_gradient(std::span<const double> w, std::span<const double> precisions,
                                 std::span<const double> means, const ConstraintSet& cs, double scale,
                                 std::span<double> grad);

/// Hard backstop. Clips to [0, w_max]; then, if the product precision leaves its
/// bounds, moves w along the precision row to the violated bound. When no
/// coordinate re-clips this is exactly w - a (a'w - u) / |a|^2; otherwise the
/// shift is solved on the clipped path so the box holds exactly and the
/// precision bound holds to rounding.
void backstop_project_inplace(std::span<double> w, std::span<const double> precisions,
                              std::span<const double> means, const ConstraintSet& cs);

/// True when w lies in the box and its product meets every configured bound.
bool is_feasible(std::span<const double> w, std::span<const double> precisions, std::span<const double> means,
                 const ConstraintSet& cs);

std::vector<double> backstop_project(std::span<const double> w, std::span<const Univariate> experts,
                                     const ConstraintSet& cs);

}  // namespace ggln
