#pragma once

// Weighted products of Gaussian experts, the per-neuron log loss and its
// derivatives.
//
// Two layers of API live here. The flat kernels operate on structure-of-arrays
// buffers (means row-major m x D, one precision per expert) and are what the
// network calls in its inner loops. The struct-based functions validate their
// inputs and forward to the same kernels.

#include <span>
#include <variant>
#include <vector>

#include "ggln/gaussian.hpp"

namespace ggln {

// ---------------------------------------------------------------------------
// Flat kernels

/// Isotropic weighted product (univariate is the dim == 1 case).
/// Writes the product mean to `out_mean` (size dim) and returns its precision
/// sum_i w_i tau_i. Throws DegenerateProduct if that sum is not positive.
double pog_isotropic_into(std::span<const double> means, std::span<const double> precisions,
                          std::span<const double> w, std::size_t dim, std::span<double> out_mean);

/// Full-covariance weighted product. `precisions` holds m row-major D x D
/// matrices. Writes the product mean and precision matrix.
void pog_full_into(std::span<const double> means, std::span<const double> precisions,
                   std::span<const double> w, std::size_t dim, std::span<double> out_mean,
                   std::span<double> out_precision);

/// Gradient of the exact NLL w.r.t. w for an isotropic product, given the
/// product's own mean and precision (already computed in the forward pass):
///   g_i = tau_i [ -D / (2 tau) + |y - mu|^2 / 2 - (y - mu).(mu_i - mu) ].
void nll_gradient_isotropic_into(std::span<const double> y, std::span<const double> means,
                                 std::span<const double> precisions, std::span<const double> prod_mean,
                                 double prod_precision, std::size_t dim, std::span<double> grad);

/// Gradient of the exact NLL for a full-covariance product:
///   g_i = [ r' P_i r - 2 r' P_i (mu_i - mu) - tr(P^-1 P_i) ] / 2,  r = y - mu.
void nll_gradient_full_into(std::span<const double> y, std::span<const double> means,
                            std::span<const double> precisions, std::span<const double> prod_mean,
                            std::span<const double> prod_precision, std::size_t dim,
                            std::span<double> grad);

// ---------------------------------------------------------------------------
// Validated struct API

Univariate pog_univariate(std::span<const Univariate> experts, std::span<const double> w);
Isotropic pog_isotropic(std::span<const Isotropic> experts, std::span<const double> w);
FullCovariance pog_full(std::span<const FullCovariance> experts, std::span<const double> w);

/// Dispatches on the experts' common form; mixing forms is a ValidationError.
GaussianExpert pog(std::span<const GaussianExpert> experts, std::span<const double> w);

using Target = std::variant<double, Vector>;

struct LossEvalPoint {
  Target y;
  std::vector<GaussianExpert> experts;
  std::vector<double> weights;
};

/// Exact negative log density of y under the weighted product, including the
/// (D/2) log(2 pi) constant.
double nll_loss(const LossEvalPoint& p);
std::vector<double> nll_gradient(const LossEvalPoint& p);

double nll_loss(double y, std::span<const Univariate> experts, std::span<const double> w);
std::vector<double> nll_gradient(double y, std::span<const Univariate> experts,
                                 std::span<const double> w);

/// log sigma^2 + (y - mu)^2 / sigma^2, the constant-free loss that equals
/// 2 * nll_loss - log(2 pi).
double reduced_loss(double y, std::span<const Univariate> experts, std::span<const double> w);

/// Hessian of reduced_loss w.r.t. w. Built in omega = w / sigma^2 coordinates,
///   H_omega = |omega|^-2 11' + 2 |omega|^-1 (mu - g1)(mu - g1)',
/// then mapped back through diag(1 / sigma^2) on both sides.
/// Requires strictly positive weights.
Matrix reduced_hessian(double y, std::span<const Univariate> experts, std::span<const double> w);

}  // namespace ggln
