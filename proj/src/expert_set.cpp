#include "ggln/expert_set.hpp"

#include <algorithm>
#include <cmath>

namespace ggln {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

ExpertSet::ExpertSet(Form f, std::size_t d, std::size_t n) : form(f), dim(d) {
  if (f == Form::univariate && d != 1) throw ValidationError("univariate expert set must have dimension 1");
  if (d == 0) throw ValidationError("expert set dimension must be >= 1");
  resize(n);
}

void ExpertSet::resize(std::size_t n) {
  count = n;
  means.assign(n * dim, 0.0);
  precisions.assign(n, 1.0);
  if (form == Form::full) {
    matrices.assign(n * dim * dim, 0.0);
  } else {
    matrices.clear();
  }
}

void ExpertSet::set(std::size_t i, const GaussianExpert& e) {
  if (dimension_of(e) != dim) throw ValidationError("expert dimension does not match set");
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Univariate>) {
          const auto v = make_univariate(g.mean, g.variance);
          if (form == Form::full) {
            means[i] = v.mean;
            matrices[i] = 1.0 / v.variance;
            precisions[i] = 1.0 / v.variance;
          } else {
            means[i * dim] = v.mean;
            precisions[i] = 1.0 / v.variance;
          }
        } else if constexpr (std::is_same_v<T, Isotropic>) {
          if (form == Form::univariate && dim != 1) throw ValidationError("form mismatch");
          if (!(g.precision > 0.0) || !std::isfinite(g.precision) || !g.mean.allFinite()) {
            throw ValidationError("isotropic expert must be finite with positive precision");
          }
          std::copy(g.mean.data(), g.mean.data() + dim, means.begin() + static_cast<std::ptrdiff_t>(i * dim));
          precisions[i] = g.precision;
          if (form == Form::full) {
            auto mat = matrix(i);
            std::fill(mat.begin(), mat.end(), 0.0);
            for (std::size_t k = 0; k < dim; ++k) mat[k * dim + k] = g.precision;
          }
        } else {
          if (form != Form::full) throw ValidationError("full-covariance expert in a scalar-precision set");
          const auto v = make_full(g.mean, g.precision);
          std::copy(v.mean.data(), v.mean.data() + dim, means.begin() + static_cast<std::ptrdiff_t>(i * dim));
          const RowMatrix rm = v.precision;
          std::copy(rm.data(), rm.data() + dim * dim, matrices.begin() + static_cast<std::ptrdiff_t>(i * dim * dim));
          precisions[i] = v.precision.trace() / static_cast<double>(dim);
        }
      },
      e);
}

GaussianExpert ExpertSet::get(std::size_t i) const {
  const auto d = static_cast<Eigen::Index>(dim);
  switch (form) {
    case Form::univariate:
      return Univariate{means[i], 1.0 / precisions[i]};
    case Form::isotropic:
      return Isotropic{Eigen::Map<const Vector>(means.data() + i * dim, d), precisions[i]};
    case Form::full:
      return FullCovariance{Eigen::Map<const Vector>(means.data() + i * dim, d),
                            Matrix(Eigen::Map<const RowMatrix>(matrices.data() + i * dim * dim, d, d))};
  }
  throw ValidationError("unknown form");
}

void ExpertSet::assign_block(std::size_t offset, const ExpertSet& other) {
  if (other.form != form || other.dim != dim) throw ValidationError("expert set form/dimension mismatch");
  if (offset + other.count > count) throw ValidationError("expert block out of range");
  std::copy(other.means.begin(), other.means.end(), means.begin() + static_cast<std::ptrdiff_t>(offset * dim));
  std::copy(other.precisions.begin(), other.precisions.end(), precisions.begin() + static_cast<std::ptrdiff_t>(offset));
  if (form == Form::full) {
    std::copy(other.matrices.begin(), other.matrices.end(),
              matrices.begin() + static_cast<std::ptrdiff_t>(offset * dim * dim));
  }
}

double ExpertSet::log_density(std::size_t i, std::span<const double> y) const {
  const double d = static_cast<double>(dim);
  const auto mu = mean(i);
  if (form != Form::full) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) r2 += (y[k] - mu[k]) * (y[k] - mu[k]);
    return -0.5 * (d * kLog2Pi - d * std::log(precisions[i]) + precisions[i] * r2);
  }
  const auto dd = static_cast<Eigen::Index>(dim);
  Eigen::Map<const RowMatrix> p(matrices.data() + i * dim * dim, dd, dd);
  const Vector r = Eigen::Map<const Vector>(y.data(), dd) - Eigen::Map<const Vector>(mu.data(), dd);
  Eigen::LLT<Matrix> llt{Matrix(p)};
  const double logdet = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
  return -0.5 * (d * kLog2Pi - logdet + r.dot(p * r));
}

ExpertSet make_expert_set(std::span<const GaussianExpert> experts, Form form, std::size_t dim) {
  ExpertSet out(form, dim, experts.size());
  for (std::size_t i = 0; i < experts.size(); ++i) out.set(i, experts[i]);
  return out;
}

ExpertSet make_expert_set(std::span<const Univariate> experts) {
  ExpertSet out(Form::univariate, 1, experts.size());
  for (std::size_t i = 0; i < experts.size(); ++i) out.set(i, experts[i]);
  return out;
}

}  // namespace ggln
