#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ggln {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when inputs are malformed (non-finite values, bad shapes, mixed forms).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a weighted product has no positive precision to invert.
class DegenerateProduct : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// N(mean, variance) on the real line.
struct Univariate {
  double mean = 0.0;
  double variance = 1.0;
};

/// N(mean, precision^-1 I) in D dimensions.
struct Isotropic {
  Vector mean;
  double precision = 1.0;
};

/// N(mean, precision^-1) with a dense D x D precision matrix.
struct FullCovariance {
  Vector mean;
  Matrix precision;
};

using GaussianExpert = std::variant<Univariate, Isotropic, FullCovariance>;

enum class Form { univariate, isotropic, full };

Form form_of(const GaussianExpert& e);
std::size_t dimension_of(const GaussianExpert& e);
std::string to_string(Form f);
Form form_from_string(const std::string& s);

// Validating constructors. Each throws ValidationError on a broken invariant.
Univariate make_univariate(double mean, double variance);
Isotropic make_isotropic(Vector mean, double precision);
FullCovariance make_full(Vector mean, Matrix precision);

double log_density(const Univariate& g, double y);
double log_density(const Isotropic& g, const Vector& y);
double log_density(const FullCovariance& g, const Vector& y);

inline double density(const Univariate& g, double y) { return std::exp(log_density(g, y)); }

/// Checks that every weight is finite and non-negative.
void validate_weights(std::span<const double> w);

}  // namespace ggln
