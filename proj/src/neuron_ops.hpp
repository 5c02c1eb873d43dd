#pragma once

// Per-neuron forward and update steps shared by the serial and parallel layer
// kernels.

#include <algorithm>
#include <cstdint>
#include <span>

#include "ggln/network.hpp"

namespace ggln::detail {

inline std::span<const double> means_for_rows(const ExpertSet& in) {
  return in.dim == 1 ? std::span<const double>(in.means) : std::span<const double>();
}

inline void neuron_forward(const Layer& layer, const ExpertSet& in, std::span<const double> z,
                           const ConstraintSet& cs, std::size_t k, std::uint32_t& active, std::span<double> scratch,
                           ExpertSet& out, std::size_t layer_index) {
  const std::uint32_t c = context_index_unchecked(layer.contexts[k], z);
  active = c;
  std::span<const double> w = layer.row(k, c);
  try {
    if (!is_feasible(w, in.precisions, means_for_rows(in), cs)) {
      std::copy(w.begin(), w.end(), scratch.begin());
      backstop_project_inplace(scratch, in.precisions, means_for_rows(in), cs);
      w = scratch;
    }
    if (in.form == Form::full) {
      pog_full_into(in.means, in.matrices, w, in.dim, out.mean(k), out.matrix(k));
      const auto p = out.matrix(k);
      double tr = 0.0;
      for (std::size_t i = 0; i < in.dim; ++i) tr += p[i * in.dim + i];
      out.precisions[k] = tr / static_cast<double>(in.dim);
    } else {
      out.precisions[k] = pog_isotropic_into(in.means, in.precisions, w, in.dim, out.mean(k));
    }
  } catch (const std::exception& e) {
    throw NeuronError(layer_index, k, e.what());
  }
}

// Univariate rows without mean bounds: gradient, barrier and step in one pass.
// The caller has already made w feasible, so every barrier term is finite.
inline void fused_scalar_step(std::span<double> w, const ExpertSet& in, double mean, double tau, double y,
                              double learning_rate, const ConstraintSet& cs) {
  const double r = y - mean;
  const double b = -0.5 / tau + 0.5 * r * r + r * mean;
  const double lo = -cs.barrier_margin;
  const double hi = cs.w_max + cs.barrier_margin;
  const double tau_hi = (1.0 / cs.sigma2_min) * (1.0 + cs.barrier_margin);
  const double tau_lo = (1.0 / cs.sigma2_max) * (1.0 - cs.barrier_margin);
  const double cp = cs.use_barrier ? cs.xi * (1.0 / (tau_hi - tau) - 1.0 / (tau - tau_lo)) : 0.0;
  const double xi = cs.use_barrier ? cs.xi : 0.0;
  const double* p = in.precisions.data();
  const double* mu = in.means.data();
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double dl = w[j] - lo;
    const double du = hi - w[j];
    const double g = p[j] * (b - r * mu[j] + cp) + xi * (dl - du) / (du * dl);
    w[j] -= learning_rate * g;
  }
}

inline void neuron_update(Layer& layer, const ExpertSet& in, std::size_t k, std::uint32_t c, const ExpertSet& out,
                          std::span<const double> y, double learning_rate, const ConstraintSet& cs,
                          std::span<double> grad, std::size_t layer_index) {
  if (learning_rate == 0.0) return;
  auto w = layer.row(k, c);
  const auto means = means_for_rows(in);
  try {
    if (in.dim == 1 && in.form != Form::full && !cs.mu_min && !cs.mu_max && cs.barrier_margin > 0.0) {
      backstop_project_inplace(w, in.precisions, means, cs);
      fused_scalar_step(w, in, out.means[k], out.precisions[k], y[0], learning_rate, cs);
      backstop_project_inplace(w, in.precisions, means, cs);
      return;
    }
    if (in.form == Form::full) {
      nll_gradient_full_into(y, in.means, in.matrices, out.mean(k), out.matrix(k), in.dim, grad);
    } else {
      nll_gradient_isotropic_into(y, in.means, in.precisions, out.mean(k), out.precisions[k], in.dim, grad);
    }
    // Inputs drift as earlier layers learn, so the stored row may be infeasible
    // for this example; store the projected row the forward pass used.
    backstop_project_inplace(w, in.precisions, means, cs);
    if (cs.use_barrier) accumulate_barrier_gradient(w, in.precisions, means, cs, cs.xi, grad);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= learning_rate * grad[j];
    backstop_project_inplace(w, in.precisions, means, cs);
  } catch (const std::exception& e) {
    throw NeuronError(layer_index, k, e.what());
  }
}

}  // namespace ggln::detail
