#pragma once

// Property suites with independent oracles: trapezoid quadrature of the
// unnormalised product, a hand-rolled dense elimination solver, central
// finite differences and a symmetric eigensolver. Shared by the `props`
// command and the acceptance runner.

#include <cstdint>
#include <string>
#include <vector>

namespace ggln::checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Closed-form univariate product vs quadrature of prod f_i^w_i over
/// [-30, 30] with 10^6 points; max pointwise density error < 1e-6.
CheckResult closure_univariate(std::size_t instances, std::uint64_t seed);

/// Full-covariance product vs Gaussian elimination on the normal equations,
/// to 1e-9.
CheckResult closure_full(std::size_t instances, std::uint64_t seed);

/// Full-covariance product on tau I precisions vs the isotropic product, 1e-12.
CheckResult isotropic_consistency(std::size_t instances, std::uint64_t seed);

/// Product mean inside [min mu_i, max mu_i] over experts with w_i > 0.
CheckResult convex_hull(std::size_t instances, std::uint64_t seed);

/// Analytic NLL gradient vs central differences (step 1e-6), rel. error < 1e-5.
CheckResult gradient_fd(std::size_t instances, std::uint64_t seed);

/// Reduced Hessian: min eigenvalue >= -1e-8 and agreement with second
/// differences of the reduced loss.
CheckResult hessian_psd(std::size_t instances, std::uint64_t seed);

/// Midpoint convexity of the NLL in w (slack 1e-9).
CheckResult loss_convexity(std::size_t triples, std::uint64_t seed);

/// Barrier gradient vs finite differences of Phi, and midpoint convexity of Phi.
CheckResult barrier(std::size_t instances, std::uint64_t seed);

/// Backstop output satisfies the box and the variance bounds, and is idempotent.
CheckResult backstop(std::size_t instances, std::uint64_t seed);

/// Random densities: weights stay in [0, 1] and sum to 1 within 1e-12; the
/// symmetric two-model fixture stays at (1/2, 1/2).
CheckResult switching_invariants(std::size_t steps, std::uint64_t seed);

/// Context index constant under 1e-9 perturbations inside a cell, and equal to
/// a bit-by-bit evaluation.
CheckResult gating_partition(std::size_t points, std::uint64_t seed);

/// Only the active rows change in an update, and eta = 0 leaves weights alone.
CheckResult update_locality(std::uint64_t seed);

/// Serial and parallel kernels give bit-identical weights after training.
CheckResult kernel_agreement(std::uint64_t seed);

/// Names accepted by run_suite, in suite order.
const std::vector<std::string>& suite_names();

/// One suite at its default size. Throws std::invalid_argument for an unknown name.
CheckResult run_suite(const std::string& name, std::uint64_t seed);

/// Every suite at its default size; suite i uses seed + i.
std::vector<CheckResult> property_suite(std::uint64_t seed);

}  // namespace ggln::checks
