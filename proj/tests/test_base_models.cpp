#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ggln/base_models.hpp"
#include "ggln/gating.hpp"

using namespace ggln;
using doctest::Approx;

TEST_CASE("bias experts") {
  const auto one = bias_experts(5.0, 1, 1.0);
  REQUIRE(one.size() == 2);
  CHECK(std::get<Univariate>(one[0]).mean == -5.0);
  CHECK(std::get<Univariate>(one[1]).mean == 5.0);

  const auto two = bias_experts(5.0, 2, 1.0);
  REQUIRE(two.size() == 4);
  std::vector<std::pair<double, double>> means;
  for (const auto& e : two) {
    const auto& g = std::get<Isotropic>(e);
    means.emplace_back(g.mean(0), g.mean(1));
  }
  std::sort(means.begin(), means.end());
  const std::vector<std::pair<double, double>> want{{-10.0, 0.0}, {0.0, -10.0}, {0.0, 10.0}, {10.0, 0.0}};
  CHECK(means == want);
}

TEST_CASE("feature experts") {
  const double x[] = {0.3, -1.2};
  const auto e = feature_experts(x, 1.0);
  REQUIRE(e.size() == 2);
  CHECK(e[0].mean == 0.3);
  CHECK(e[1].mean == -1.2);
  CHECK(e[0].variance == 1.0);
  const double zero[] = {0.0, 0.0, 0.0};
  for (const auto& g : feature_experts(zero, std::sqrt(0.3))) {
    CHECK(g.mean == 0.0);
    CHECK(g.variance == Approx(0.3));
  }
  CHECK_THROWS(feature_experts(x, 0.0));
}

TEST_CASE("Bayesian linear regression") {
  SUBCASE("single update sums") {
    const auto s = blr_update(BLRState{}, 2.0, 3.0);
    CHECK(s.sum_xy == 6.0);
    CHECK(s.sum_x2 == 4.0);
    CHECK(s.sum_y == 3.0);
    CHECK(s.n == 1.0);
    // conjugate posterior on one point (mpmath reference)
    CHECK(s.theta_mean() == Approx(1.2).epsilon(1e-15));
    CHECK(s.beta_mean() == Approx(1.5).epsilon(1e-15));
    CHECK(blr_predict(s, 1.0).variance == Approx(1.7).epsilon(1e-15));
  }
  SUBCASE("empty state predicts from the prior") {
    BLRState s;
    s.tau = 2.0;
    s.tau0 = 0.5;
    const auto p = blr_predict(s, 3.0);
    CHECK(p.mean == 0.0);
    CHECK(p.variance == Approx(9.0 / 0.5 + 1.0 / 0.5 + 1.0 / 2.0));
    s.tau0 = 1e12;
    CHECK(blr_predict(s, 3.0).variance == Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("recovers a line") {
    Rng rng(4);
    std::normal_distribution<double> g;
    BLRState s;
    s.tau = 4.0;
    std::vector<std::pair<double, double>> pts;
    // symmetric inputs, so slope and offset decouple
    for (int i = 0; i < 25; ++i) {
      const double x0 = g(rng);
      for (double x : {x0, -x0}) {
        const double y = 2.0 * x + 1.0 + 0.5 * g(rng);
        pts.emplace_back(x, y);
        s = blr_update(s, x, y);
      }
    }
    CHECK(std::abs(s.theta_mean() - 2.0) < 3.0 / std::sqrt(s.theta_precision()));
    CHECK(std::abs(s.beta_mean() - 1.0) < 3.0 / std::sqrt(s.beta_precision()));

    std::shuffle(pts.begin(), pts.end(), rng);
    BLRState t;
    t.tau = 4.0;
    for (auto [x, y] : pts) t = blr_update(t, x, y);
    CHECK(t.sum_xy == Approx(s.sum_xy).epsilon(1e-9));
    CHECK(t.sum_x2 == Approx(s.sum_x2).epsilon(1e-9));
    CHECK(t.sum_y == Approx(s.sum_y).epsilon(1e-9));
  }
  SUBCASE("bank updates every feature") {
    BLRBank bank(2, 1.0, 1.0);
    const double x[] = {1.0, -1.0};
    bank.update(x, 2.0);
    std::vector<Univariate> out(2);
    bank.predict(x, out);
    CHECK(bank.state(0).sum_xy == 2.0);
    CHECK(bank.state(1).sum_xy == -2.0);
    CHECK(out[0].mean == Approx(out[1].mean));
  }
}
