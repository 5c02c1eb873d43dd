#include <doctest.h>

#include <cmath>

#include "ggln/constraints.hpp"

using namespace ggln;
using doctest::Approx;

namespace {
ConstraintSet wide(double w_max) {
  ConstraintSet cs;
  cs.w_max = w_max;
  cs.sigma2_min = 1e-6;
  cs.sigma2_max = 1e6;
  return cs;
}
}  // namespace

TEST_CASE("barrier gradient at the box centre") {
  const ConstraintSet cs = wide(10.0);
  const Univariate e[] = {{0.0, 1.0}, {1.0, 1.0}, {-1.0, 1.0}};
  const double w[] = {5.0, 5.0, 5.0};
  const auto b = barrier_penalty(w, e, cs);
  // the box pair cancels, leaving the two precision rows
  const double tau = 15.0;
  const double upper = 1.0 / (1e6 * (1.0 + cs.barrier_margin) - tau);
  const double lower = -1.0 / (tau - 1e-6 * (1.0 - cs.barrier_margin));
  for (double g : b.gradient) CHECK(g == Approx(upper + lower).epsilon(1e-12));
}

TEST_CASE("barrier diverges at the upper bound") {
  const ConstraintSet cs = wide(10.0);
  const Univariate e[] = {{0.0, 1.0}, {1.0, 1.0}};
  double last = 0.0;
  for (double gap : {1e-3, 1e-6, 1e-9}) {
    // the pole sits margin beyond w_max
    const double w[] = {10.0 + cs.barrier_margin - gap, 1.0};
    const auto b = barrier_penalty(w, e, cs);
    CHECK(b.gradient[0] > last);
    last = b.gradient[0];
  }
  CHECK(last > 1e8);
  const double out[] = {20.0, 1.0};
  CHECK_THROWS_AS(barrier_penalty(out, e, cs), InfeasibleWeights);
}

TEST_CASE("backstop projection") {
  ConstraintSet cs;
  cs.w_max = 10.0;
  cs.sigma2_min = 0.25;
  cs.sigma2_max = 100.0;
  const Univariate e[] = {{0.0, 1.0}, {1.0, 1.0}};

  SUBCASE("feasible weights are unchanged") {
    const double w[] = {1.0, 2.0};
    const auto p = backstop_project(w, e, cs);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 2.0);
  }
  SUBCASE("box clip") {
    const double w[] = {15.0, 0.0};
    ConstraintSet loose = cs;
    loose.sigma2_min = 0.01;
    const auto p = backstop_project(w, e, loose);
    CHECK(p[0] == 10.0);
    CHECK(p[1] == 0.0);
  }
  SUBCASE("precision above its bound is projected onto the hyperplane") {
    const double w[] = {3.0, 3.0};
    const auto p = backstop_project(w, e, cs);
    CHECK(p[0] == Approx(2.0).epsilon(1e-15));
    CHECK(p[1] == Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("precision below its bound") {
    const double w[] = {0.001, 0.002};
    const auto p = backstop_project(w, e, cs);
    CHECK(p[0] + p[1] >= 0.01 * (1.0 - 1e-12));
    CHECK(p[1] - p[0] == Approx(0.001));
  }
  SUBCASE("re-clipped coordinates keep the bound") {
    const Univariate f[] = {{0.0, 0.1}, {1.0, 10.0}};  // tau = 10, 0.1
    const double w[] = {5.0, 0.0};
    const auto p = backstop_project(w, f, cs);
    const double tau = p[0] * 10.0 + p[1] * 0.1;
    CHECK(tau <= 4.0 * (1.0 + 1e-12));
    CHECK(p[1] >= 0.0);
    CHECK(is_feasible(p, std::vector<double>{10.0, 0.1}, {}, cs));
  }
  SUBCASE("idempotent") {
    const double w[] = {-3.0, 40.0};
    const auto p = backstop_project(w, e, cs);
    const auto q = backstop_project(p, e, cs);
    CHECK(p == q);
  }
  SUBCASE("precision floor out of reach") {
    // w_max * sum(tau_i) = 20 < 1 / sigma2_max
    cs.sigma2_max = 0.01;
    const double w[] = {-1.0, -2.0};
    CHECK_THROWS_AS(backstop_project(w, e, cs), InfeasibleWeights);
  }
}

TEST_CASE("mean bounds") {
  ConstraintSet cs = wide(10.0);
  cs.mu_min = -0.5;
  cs.mu_max = 0.5;
  const Univariate e[] = {{-2.0, 1.0}, {2.0, 1.0}};
  const double w[] = {1.0, 3.0};  // mean 1
  const auto p = backstop_project(w, e, cs);
  const double mu = (-2.0 * p[0] + 2.0 * p[1]) / (p[0] + p[1]);
  CHECK(mu <= 0.5 + 1e-9);
}

TEST_CASE("constraint validation") {
  ConstraintSet cs;
  cs.sigma2_min = 2.0;
  cs.sigma2_max = 1.0;
  CHECK_THROWS(cs.validate());
}
