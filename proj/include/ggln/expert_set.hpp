#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ggln/gaussian.hpp"

namespace ggln {

/// Structure-of-arrays view of a layer's Gaussian outputs.
///
/// `precisions` always holds one scalar per expert: tau for univariate and
/// isotropic experts, trace(P) / D for full-covariance experts (the latter is
/// the coefficient the precision constraint uses). `matrices` is only
/// populated for the full form and stores row-major D x D precisions.
struct ExpertSet {
  Form form = Form::univariate;
  std::size_t dim = 1;
  std::size_t count = 0;
  std::vector<double> means;
  std::vector<double> precisions;
  std::vector<double> matrices;

  ExpertSet() = default;
  ExpertSet(Form f, std::size_t d, std::size_t n);

  void resize(std::size_t n);

  std::span<const double> mean(std::size_t i) const { return {means.data() + i * dim, dim}; }
  std::span<double> mean(std::size_t i) { return {means.data() + i * dim, dim}; }
  std::span<const double> matrix(std::size_t i) const { return {matrices.data() + i * dim * dim, dim * dim}; }
  std::span<double> matrix(std::size_t i) { return {matrices.data() + i * dim * dim, dim * dim}; }

  /// Writes expert `e` into slot i, converting univariate/isotropic experts to
  /// the set's form where that is lossless (isotropic -> full).
  void set(std::size_t i, const GaussianExpert& e);
  GaussianExpert get(std::size_t i) const;

  /// Copies all experts of `other` into slots [offset, offset + other.count).
  void assign_block(std::size_t offset, const ExpertSet& other);

  double log_density(std::size_t i, std::span<const double> y) const;
};

ExpertSet make_expert_set(std::span<const GaussianExpert> experts, Form form, std::size_t dim);
ExpertSet make_expert_set(std::span<const Univariate> experts);

}  // namespace ggln
