#include "ggln/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace ggln {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw ValidationError(std::string(what) + " must be finite");
}

}  // namespace

Form form_of(const GaussianExpert& e) {
  return static_cast<Form>(e.index());
}

std::size_t dimension_of(const GaussianExpert& e) {
  return std::visit(
      [](const auto& g) -> std::size_t {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Univariate>) {
          return 1;
        } else {
          return static_cast<std::size_t>(g.mean.size());
        }
      },
      e);
}

std::string to_string(Form f) {
  switch (f) {
    case Form::univariate: return "univariate";
    case Form::isotropic: return "isotropic";
    case Form::full: return "full";
  }
  return "unknown";
}

Form form_from_string(const std::string& s) {
  if (s == "univariate") return Form::univariate;
  if (s == "isotropic") return Form::isotropic;
  if (s == "full") return Form::full;
  throw ValidationError("unknown expert form '" + s + "'");
}

Univariate make_univariate(double mean, double variance) {
  if (!std::isfinite(mean) || !std::isfinite(variance)) {
    throw ValidationError("univariate expert must be finite");
  }
  if (!(variance > 0.0)) throw ValidationError("variance must be strictly positive");
  return {mean, variance};
}

Isotropic make_isotropic(Vector mean, double precision) {
  require_finite(mean, "isotropic mean");
  if (mean.size() == 0) throw ValidationError("isotropic expert needs dimension >= 1");
  if (!std::isfinite(precision) || !(precision > 0.0)) {
    throw ValidationError("isotropic precision must be finite and positive");
  }
  return {std::move(mean), precision};
}

FullCovariance make_full(Vector mean, Matrix precision) {
  require_finite(mean, "mean");
  const auto d = mean.size();
  if (d == 0) throw ValidationError("full-covariance expert needs dimension >= 1");
  if (precision.rows() != d || precision.cols() != d) {
    throw ValidationError("precision matrix shape does not match mean");
  }
  if (!precision.allFinite()) throw ValidationError("precision matrix must be finite");
  const double scale = std::max(1.0, precision.cwiseAbs().maxCoeff());
  if ((precision - precision.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ValidationError("precision matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(precision, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 1e-9 * scale) {
    throw ValidationError("precision matrix must be positive definite");
  }
  return {std::move(mean), std::move(precision)};
}

double log_density(const Univariate& g, double y) {
  const double r = y - g.mean;
  return -0.5 * (kLog2Pi + std::log(g.variance) + r * r / g.variance);
}

double log_density(const Isotropic& g, const Vector& y) {
  const auto d = static_cast<double>(g.mean.size());
  return -0.5 * (d * kLog2Pi - d * std::log(g.precision) + g.precision * (y - g.mean).squaredNorm());
}

double log_density(const FullCovariance& g, const Vector& y) {
  Eigen::LLT<Matrix> llt(g.precision);
  if (llt.info() != Eigen::Success) throw DegenerateProduct("precision matrix is not positive definite");
  const auto d = static_cast<double>(g.mean.size());
  const Vector r = y - g.mean;
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (d * kLog2Pi - logdet + r.dot(g.precision * r));
}

void validate_weights(std::span<const double> w) {
  for (double v : w) {
    if (!std::isfinite(v)) throw ValidationError("weights must be finite");
    if (v < 0.0) throw ValidationError("weights must be non-negative");
  }
}

}  // namespace ggln
