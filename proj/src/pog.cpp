#include "ggln/pog.hpp"

#include <cmath>
#include <string>

namespace ggln {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

using RowMatrixMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void require_same_count(std::size_t experts, std::size_t weights) {
  if (experts == 0) throw ValidationError("weighted product needs at least one expert");
  if (experts != weights) throw ValidationError("expert count does not match weight count");
}

// Flattens structs into the kernel layout.
struct IsoBuffers {
  std::vector<double> means;
  std::vector<double> precisions;
  std::size_t dim = 0;
};

IsoBuffers flatten(std::span<const Univariate> experts) {
  IsoBuffers b;
  b.dim = 1;
  b.means.reserve(experts.size());
  b.precisions.reserve(experts.size());
  for (const auto& e : experts) {
    const auto v = make_univariate(e.mean, e.variance);
    b.means.push_back(v.mean);
    b.precisions.push_back(1.0 / v.variance);
  }
  return b;
}

IsoBuffers flatten(std::span<const Isotropic> experts) {
  IsoBuffers b;
  b.dim = static_cast<std::size_t>(experts.front().mean.size());
  for (const auto& e : experts) {
    if (static_cast<std::size_t>(e.mean.size()) != b.dim) throw ValidationError("experts differ in dimension");
    if (!e.mean.allFinite() || !std::isfinite(e.precision) || !(e.precision > 0.0)) {
      throw ValidationError("isotropic expert must be finite with positive precision");
    }
    b.means.insert(b.means.end(), e.mean.data(), e.mean.data() + b.dim);
    b.precisions.push_back(e.precision);
  }
  return b;
}

IsoBuffers flatten(std::span<const FullCovariance> experts) {
  IsoBuffers b;
  b.dim = static_cast<std::size_t>(experts.front().mean.size());
  for (const auto& e : experts) {
    if (static_cast<std::size_t>(e.mean.size()) != b.dim) throw ValidationError("experts differ in dimension");
    if (e.precision.rows() != e.mean.size() || e.precision.cols() != e.mean.size()) {
      throw ValidationError("precision matrix shape does not match mean");
    }
    if (!e.mean.allFinite() || !e.precision.allFinite()) throw ValidationError("expert must be finite");
    b.means.insert(b.means.end(), e.mean.data(), e.mean.data() + b.dim);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = e.precision;
    b.precisions.insert(b.precisions.end(), rm.data(), rm.data() + rm.size());
  }
  return b;
}

template <class T>
std::vector<T> unpack(std::span<const GaussianExpert> experts) {
  std::vector<T> out;
  out.reserve(experts.size());
  for (const auto& e : experts) {
    const T* p = std::get_if<T>(&e);
    if (p == nullptr) throw ValidationError("cannot mix expert forms in one product");
    out.push_back(*p);
  }
  return out;
}

double target_scalar(const Target& y) {
  if (const double* v = std::get_if<double>(&y)) return *v;
  const auto& vec = std::get<Vector>(y);
  if (vec.size() != 1) throw ValidationError("univariate loss needs a scalar target");
  return vec(0);
}

Vector target_vector(const Target& y, std::size_t dim) {
  Vector out;
  if (const double* v = std::get_if<double>(&y)) {
    out = Vector::Constant(1, *v);
  } else {
    out = std::get<Vector>(y);
  }
  if (static_cast<std::size_t>(out.size()) != dim) throw ValidationError("target dimension mismatch");
  if (!out.allFinite()) throw ValidationError("target must be finite");
  return out;
}

}  // namespace

double pog_isotropic_into(std::span<const double> means, std::span<const double> precisions,
                          std::span<const double> w, std::size_t dim, std::span<double> out_mean) {
  const std::size_t m = w.size();
  double tau = 0.0;
  for (std::size_t i = 0; i < m; ++i) tau += w[i] * precisions[i];
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DegenerateProduct("weighted product has non-positive precision " + std::to_string(tau));
  }
  if (dim == 1) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += w[i] * precisions[i] * means[i];
    out_mean[0] = acc / tau;
    return tau;
  }
  for (std::size_t k = 0; k < dim; ++k) out_mean[k] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double c = w[i] * precisions[i];
    if (c == 0.0) continue;
    const double* mu = means.data() + i * dim;
    for (std::size_t k = 0; k < dim; ++k) out_mean[k] += c * mu[k];
  }
  const double inv = 1.0 / tau;
  for (std::size_t k = 0; k < dim; ++k) out_mean[k] *= inv;
  return tau;
}

void pog_full_into(std::span<const double> means, std::span<const double> precisions,
                   std::span<const double> w, std::size_t dim, std::span<double> out_mean,
                   std::span<double> out_precision) {
  const std::size_t m = w.size();
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix p = Matrix::Zero(d, d);
  Vector b = Vector::Zero(d);
  for (std::size_t i = 0; i < m; ++i) {
    if (w[i] == 0.0) continue;
    RowMatrixMap pi(precisions.data() + i * dim * dim, d, d);
    Eigen::Map<const Vector> mui(means.data() + i * dim, d);
    p.noalias() += w[i] * pi;
    b.noalias() += w[i] * (pi * mui);
  }
  Eigen::LLT<Matrix> llt(p);
  if (llt.info() != Eigen::Success || !p.allFinite()) {
    throw DegenerateProduct("combined precision matrix is not positive definite");
  }
  Eigen::Map<Vector>(out_mean.data(), d) = llt.solve(b);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out_precision.data(), d, d) = p;
}

void nll_gradient_isotropic_into(std::span<const double> y, std::span<const double> means,
                                 std::span<const double> precisions, std::span<const double> prod_mean,
                                 double prod_precision, std::size_t dim, std::span<double> grad) {
  const std::size_t m = precisions.size();
  double r2 = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double r = y[k] - prod_mean[k];
    r2 += r * r;
  }
  const double base = -0.5 * static_cast<double>(dim) / prod_precision + 0.5 * r2;
  if (dim == 1) {
    const double r = y[0] - prod_mean[0];
    const double b = base + r * prod_mean[0];
    for (std::size_t i = 0; i < m; ++i) grad[i] = precisions[i] * (b - r * means[i]);
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double* mu = means.data() + i * dim;
    double cross = 0.0;
    for (std::size_t k = 0; k < dim; ++k) cross += (y[k] - prod_mean[k]) * (mu[k] - prod_mean[k]);
    grad[i] = precisions[i] * (base - cross);
  }
}

void nll_gradient_full_into(std::span<const double> y, std::span<const double> means,
                            std::span<const double> precisions, std::span<const double> prod_mean,
                            std::span<const double> prod_precision, std::size_t dim,
                            std::span<double> grad) {
  const auto d = static_cast<Eigen::Index>(dim);
  const std::size_t m = grad.size();
  RowMatrixMap p(prod_precision.data(), d, d);
  Eigen::Map<const Vector> mu(prod_mean.data(), d);
  const Vector r = Eigen::Map<const Vector>(y.data(), d) - mu;
  const Matrix cov = Eigen::LLT<Matrix>(p).solve(Matrix::Identity(d, d));
  for (std::size_t i = 0; i < m; ++i) {
    RowMatrixMap pi(precisions.data() + i * dim * dim, d, d);
    const Vector diff = Eigen::Map<const Vector>(means.data() + i * dim, d) - mu;
    const Vector pr = pi * r;
    grad[i] = 0.5 * (r.dot(pr) - 2.0 * pr.dot(diff) - (cov.cwiseProduct(pi.transpose())).sum());
  }
}

Univariate pog_univariate(std::span<const Univariate> experts, std::span<const double> w) {
  require_same_count(experts.size(), w.size());
  validate_weights(w);
  const auto b = flatten(experts);
  double mean = 0.0;
  const double tau = pog_isotropic_into(b.means, b.precisions, w, 1, std::span<double>(&mean, 1));
  return {mean, 1.0 / tau};
}

Isotropic pog_isotropic(std::span<const Isotropic> experts, std::span<const double> w) {
  require_same_count(experts.size(), w.size());
  validate_weights(w);
  const auto b = flatten(experts);
  Isotropic out;
  out.mean.resize(static_cast<Eigen::Index>(b.dim));
  out.precision = pog_isotropic_into(b.means, b.precisions, w, b.dim,
                                     std::span<double>(out.mean.data(), b.dim));
  return out;
}

FullCovariance pog_full(std::span<const FullCovariance> experts, std::span<const double> w) {
  require_same_count(experts.size(), w.size());
  validate_weights(w);
  const auto b = flatten(experts);
  const auto d = static_cast<Eigen::Index>(b.dim);
  Vector mean(d);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> prec(d, d);
  pog_full_into(b.means, b.precisions, w, b.dim, std::span<double>(mean.data(), b.dim),
                std::span<double>(prec.data(), b.dim * b.dim));
  return {mean, Matrix(prec)};
}

GaussianExpert pog(std::span<const GaussianExpert> experts, std::span<const double> w) {
  require_same_count(experts.size(), w.size());
  switch (form_of(experts.front())) {
    case Form::univariate: {
      const auto v = unpack<Univariate>(experts);
      return pog_univariate(v, w);
    }
    case Form::isotropic: {
      const auto v = unpack<Isotropic>(experts);
      return pog_isotropic(v, w);
    }
    case Form::full: {
      const auto v = unpack<FullCovariance>(experts);
      return pog_full(v, w);
    }
  }
  throw ValidationError("unknown expert form");
}

double nll_loss(const LossEvalPoint& p) {
  const auto product = pog(p.experts, p.weights);
  return std::visit(
      [&](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Univariate>) {
          return -log_density(g, target_scalar(p.y));
        } else {
          return -log_density(g, target_vector(p.y, static_cast<std::size_t>(g.mean.size())));
        }
      },
      product);
}

std::vector<double> nll_gradient(const LossEvalPoint& p) {
  require_same_count(p.experts.size(), p.weights.size());
  validate_weights(p.weights);
  std::vector<double> grad(p.weights.size());
  switch (form_of(p.experts.front())) {
    case Form::univariate: {
      const auto v = unpack<Univariate>(p.experts);
      return nll_gradient(target_scalar(p.y), v, p.weights);
    }
    case Form::isotropic: {
      const auto v = unpack<Isotropic>(p.experts);
      const auto b = flatten(std::span<const Isotropic>(v));
      const Vector y = target_vector(p.y, b.dim);
      std::vector<double> mean(b.dim);
      const double tau = pog_isotropic_into(b.means, b.precisions, p.weights, b.dim, mean);
      nll_gradient_isotropic_into(std::span<const double>(y.data(), b.dim), b.means, b.precisions,
                                  mean, tau, b.dim, grad);
      return grad;
    }
    case Form::full: {
      const auto v = unpack<FullCovariance>(p.experts);
      const auto b = flatten(std::span<const FullCovariance>(v));
      const Vector y = target_vector(p.y, b.dim);
      std::vector<double> mean(b.dim), prec(b.dim * b.dim);
      pog_full_into(b.means, b.precisions, p.weights, b.dim, mean, prec);
      nll_gradient_full_into(std::span<const double>(y.data(), b.dim), b.means, b.precisions, mean, prec,
                             b.dim, grad);
      return grad;
    }
  }
  return grad;
}

double nll_loss(double y, std::span<const Univariate> experts, std::span<const double> w) {
  if (!std::isfinite(y)) throw ValidationError("target must be finite");
  return -log_density(pog_univariate(experts, w), y);
}

std::vector<double> nll_gradient(double y, std::span<const Univariate> experts,
                                 std::span<const double> w) {
  if (!std::isfinite(y)) throw ValidationError("target must be finite");
  require_same_count(experts.size(), w.size());
  validate_weights(w);
  const auto b = flatten(experts);
  double mean = 0.0;
  const double tau = pog_isotropic_into(b.means, b.precisions, w, 1, std::span<double>(&mean, 1));
  std::vector<double> grad(w.size());
  nll_gradient_isotropic_into(std::span<const double>(&y, 1), b.means, b.precisions,
                              std::span<const double>(&mean, 1), tau, 1, grad);
  return grad;
}

double reduced_loss(double y, std::span<const Univariate> experts, std::span<const double> w) {
  return 2.0 * nll_loss(y, experts, w) - kLog2Pi;
}

Matrix reduced_hessian(double y, std::span<const Univariate> experts, std::span<const double> w) {
  if (!std::isfinite(y)) throw ValidationError("target must be finite");
  require_same_count(experts.size(), w.size());
  validate_weights(w);
  const auto m = static_cast<Eigen::Index>(w.size());
  Vector omega(m), mu(m), inv_var(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto e = make_univariate(experts[i].mean, experts[i].variance);
    if (!(w[i] > 0.0)) throw ValidationError("reduced Hessian needs strictly positive weights");
    inv_var(i) = 1.0 / e.variance;
    omega(i) = w[i] * inv_var(i);
    mu(i) = e.mean;
  }
  const double norm = omega.sum();
  const double g = omega.dot(mu) / norm;
  const Vector a = mu.array() - g;
  Matrix h = Matrix::Constant(m, m, 1.0 / (norm * norm));
  h.noalias() += (2.0 / norm) * a * a.transpose();
  return inv_var.asDiagonal() * h * inv_var.asDiagonal();
}

}  // namespace ggln
