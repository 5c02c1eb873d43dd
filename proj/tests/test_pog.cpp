#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ggln/pog.hpp"

using namespace ggln;
using doctest::Approx;

TEST_CASE("univariate product") {
  SUBCASE("two standard normals halve the variance") {
    const Univariate e[] = {{0.0, 1.0}, {0.0, 1.0}};
    const double w[] = {1.0, 1.0};
    const auto p = pog_univariate(e, w);
    CHECK(p.mean == 0.0);
    CHECK(p.variance == Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("single expert is the identity") {
    const Univariate e[] = {{3.7, 2.2}};
    const double w[] = {1.0};
    const auto p = pog_univariate(e, w);
    CHECK(p.mean == Approx(3.7).epsilon(1e-15));
    CHECK(p.variance == Approx(2.2).epsilon(1e-15));
  }
  SUBCASE("quadrature reference") {
    const Univariate e[] = {{1.0, 1.0}, {3.0, 4.0}};
    const double w[] = {2.0, 1.0};
    const auto p = pog_univariate(e, w);
    CHECK(p.mean == Approx(1.2222222222222222).epsilon(1e-14));
    CHECK(p.variance == Approx(0.44444444444444444).epsilon(1e-14));
  }
  SUBCASE("zero total precision") {
    const Univariate e[] = {{0.0, 1.0}};
    const double w[] = {0.0};
    CHECK_THROWS_AS(pog_univariate(e, w), DegenerateProduct);
  }
  SUBCASE("bad inputs") {
    const Univariate e[] = {{0.0, 1.0}, {1.0, 1.0}};
    const double neg[] = {1.0, -0.5};
    const double one[] = {1.0};
    CHECK_THROWS_AS(pog_univariate(e, neg), ValidationError);
    CHECK_THROWS_AS(pog_univariate(e, one), ValidationError);
    CHECK_THROWS_AS(make_univariate(0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(make_univariate(NAN, 1.0), ValidationError);
  }
}

TEST_CASE("isotropic product") {
  SUBCASE("single expert") {
    const Isotropic e[] = {make_isotropic(Vector{{1.0, 2.0}}, 3.0)};
    const double w[] = {1.0};
    const auto p = pog_isotropic(e, w);
    CHECK(p.mean(0) == 1.0);
    CHECK(p.mean(1) == 2.0);
    CHECK(p.precision == 3.0);
  }
  SUBCASE("symmetric midpoint") {
    const Isotropic e[] = {make_isotropic(Vector{{0.0, 0.0}}, 1.0), make_isotropic(Vector{{2.0, 2.0}}, 1.0)};
    const double w[] = {1.0, 1.0};
    const auto p = pog_isotropic(e, w);
    CHECK(p.mean(0) == Approx(1.0));
    CHECK(p.mean(1) == Approx(1.0));
    CHECK(p.precision == 2.0);
  }
  SUBCASE("per-coordinate reference") {
    const Isotropic e[] = {make_isotropic(Vector{{1.0, 0.0}}, 2.0), make_isotropic(Vector{{0.0, 1.0}}, 1.0)};
    const double w[] = {1.0, 3.0};
    const auto p = pog_isotropic(e, w);
    CHECK(p.precision == 5.0);
    CHECK(p.mean(0) == Approx(0.4).epsilon(1e-15));
    CHECK(p.mean(1) == Approx(0.6).epsilon(1e-15));
  }
}

TEST_CASE("full-covariance product") {
  const Matrix p1{{2.0, 1.0}, {1.0, 2.0}};
  const FullCovariance e[] = {make_full(Vector{{1.0, -1.0}}, p1), make_full(Vector{{0.5, 2.0}}, Matrix::Identity(2, 2))};
  const double w[] = {1.0, 1.0};
  const auto p = pog_full(e, w);
  CHECK(p.precision(0, 0) == 3.0);
  CHECK(p.precision(0, 1) == 1.0);
  CHECK(p.precision(1, 1) == 3.0);
  // Cramer's-rule reference
  CHECK(p.mean(0) == Approx(0.4375).epsilon(1e-14));
  CHECK(p.mean(1) == Approx(0.1875).epsilon(1e-14));

  const double one[] = {1.0};
  const auto id = pog_full(std::span(e, 1), one);
  CHECK((id.mean - e[0].mean).norm() < 1e-15);
  CHECK((id.precision - p1).norm() < 1e-15);

  CHECK_THROWS_AS(make_full(Vector{{0.0, 0.0}}, Matrix{{1.0, 2.0}, {0.0, 1.0}}), ValidationError);
}

TEST_CASE("mixed forms are rejected") {
  const GaussianExpert e[] = {Univariate{0.0, 1.0}, make_isotropic(Vector{{0.0}}, 1.0)};
  const double w[] = {1.0, 1.0};
  CHECK_THROWS_AS(pog(e, w), ValidationError);
}

TEST_CASE("negative log likelihood") {
  SUBCASE("at the product mean only the volume term remains") {
    const Univariate e[] = {{1.0, 1.0}, {3.0, 4.0}};
    const double w[] = {2.0, 1.0};
    const double nll = nll_loss(11.0 / 9.0, e, w);
    CHECK(nll == Approx(0.5 * std::log(2.0 * std::numbers::pi * 4.0 / 9.0)).epsilon(1e-14));
  }
  SUBCASE("standard normal peak") {
    const Univariate e[] = {{0.0, 1.0}};
    const double w[] = {1.0};
    CHECK(nll_loss(0.0, e, w) == Approx(0.9189385332046727).epsilon(1e-15));
  }
  SUBCASE("quadrature reference value and gradient") {
    const Univariate e[] = {{1.0, 1.0}, {3.0, 4.0}};
    const double w[] = {2.0, 1.0};
    CHECK(nll_loss(2.0, e, w) == Approx(1.1940289806520639).epsilon(1e-13));
    const auto g = nll_gradient(2.0, e, w);
    CHECK(g[0] == Approx(0.253086419753086).epsilon(1e-12));
    CHECK(g[1] == Approx(-0.325617283950617).epsilon(1e-12));
  }
  SUBCASE("self-prediction leaves the volume term") {
    const Univariate e[] = {{0.7, 2.0}};
    const double w[] = {1.5};
    const auto g = nll_gradient(0.7, e, w);
    // tau_1 * (-1 / (2 tau)) with tau = w tau_1
    CHECK(g[0] == Approx(-0.5 / 1.5).epsilon(1e-15));
  }
  SUBCASE("reduced loss is twice the NLL minus log 2 pi") {
    const Univariate e[] = {{-1.0, 0.5}, {2.0, 3.0}, {0.1, 1.0}};
    const double w[] = {0.3, 1.2, 0.8};
    CHECK(reduced_loss(0.4, e, w) == Approx(2.0 * nll_loss(0.4, e, w) - std::log(2.0 * std::numbers::pi)));
  }
  SUBCASE("multivariate targets") {
    LossEvalPoint p;
    p.y = Vector{{0.5, -0.5}};
    p.experts = {make_isotropic(Vector{{0.0, 0.0}}, 1.0), make_isotropic(Vector{{1.0, 1.0}}, 2.0)};
    p.weights = {1.0, 1.0};
    // product: tau 3, mean (2/3, 2/3)
    const double r2 = (0.5 - 2.0 / 3.0) * (0.5 - 2.0 / 3.0) + (-0.5 - 2.0 / 3.0) * (-0.5 - 2.0 / 3.0);
    CHECK(nll_loss(p) == Approx(std::log(2.0 * std::numbers::pi / 3.0) + 1.5 * r2).epsilon(1e-14));
    p.y = 1.0;
    CHECK_THROWS_AS(nll_loss(p), ValidationError);
  }
}

TEST_CASE("reduced Hessian") {
  SUBCASE("single expert") {
    const Univariate e[] = {{0.4, 2.0}};
    const double w[] = {1.5};
    const Matrix h = reduced_hessian(1.0, e, w);
    CHECK(h.rows() == 1);
    CHECK(h(0, 0) == Approx(1.0 / (1.5 * 1.5)).epsilon(1e-14));
  }
  SUBCASE("zero weight is rejected") {
    const Univariate e[] = {{0.4, 2.0}, {1.0, 1.0}};
    const double w[] = {1.5, 0.0};
    CHECK_THROWS_AS(reduced_hessian(1.0, e, w), ValidationError);
  }
}
