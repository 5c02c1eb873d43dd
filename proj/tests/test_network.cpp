#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ggln/base_models.hpp"
#include "ggln/data.hpp"
#include "ggln/network.hpp"

using namespace ggln;
using doctest::Approx;

namespace {

NetworkConfig config(std::vector<std::size_t> layers, std::size_t s) {
  NetworkConfig cfg;
  cfg.layer_sizes = std::move(layers);
  cfg.context_dim = s;
  cfg.side_info_dim = 1;
  cfg.base_count = 1;
  return cfg;
}

ExpertSet one_expert(double mean, double variance) {
  const Univariate u[] = {{mean, variance}};
  return make_expert_set(u);
}

void fill_rows(Layer& layer, std::size_t k, const std::vector<double>& w) {
  for (std::size_t c = 0; c < layer.cells; ++c) std::copy(w.begin(), w.end(), layer.row(k, c).begin());
}

}  // namespace

TEST_CASE("construction") {
  Rng a(1);
  Network net(config({3, 1}, 2), a);
  // fan-in: one base expert plus two bias experts
  for (double w : net.layers()[0].weights) CHECK(w == Approx(1.0 / 3.0));
  // second layer: three neurons plus two bias experts
  for (double w : net.layers()[1].weights) CHECK(w == Approx(0.2));

  Rng b(1);
  Network again(config({3, 1}, 2), b);
  CHECK(again.layers()[0].contexts[1].contexts()[0].offset() == net.layers()[0].contexts[1].contexts()[0].offset());

  Rng c(1);
  NetworkConfig big = config(std::vector<std::size_t>(12, 256), 4);
  big.side_info_dim = 13;
  big.base_count = 13;
  CHECK_NOTHROW(Network(big, c));

  NetworkConfig bad = config({}, 2);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("identity stacking") {
  Rng rng(2);
  Network net(config({1}, 1), rng);
  fill_rows(net.layers()[0], 0, {1.0, 0.0, 0.0});
  const double z[] = {0.3};
  const auto p = net.infer(one_expert(0.7, 2.0), z);
  const auto& top = std::get<Univariate>(p.top);
  CHECK(top.mean == Approx(0.7).epsilon(1e-15));
  CHECK(top.variance == Approx(2.0).epsilon(1e-15));
}

TEST_CASE("equal inputs collapse the hull") {
  Rng rng(3);
  Network net(config({4, 1}, 2), rng);
  // bias experts get zero weight, so every neuron sees only N(1.5, 1) copies
  const double z[] = {0.1};
  const Univariate u[] = {{1.5, 1.0}};
  ExpertSet base = make_expert_set(u);
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    Layer& layer = net.layers()[l];
    for (std::size_t k = 0; k < layer.size; ++k) {
      std::vector<double> w(layer.fan_in, 0.0);
      w[0] = 0.3;
      if (l > 0) w[1] = 0.5;
      fill_rows(layer, k, w);
    }
  }
  const auto p = net.infer(base, z);
  CHECK(std::get<Univariate>(p.top).mean == Approx(1.5).epsilon(1e-14));
}

TEST_CASE("two layers against quadrature") {
  Rng rng(4);
  NetworkConfig cfg = config({2, 1}, 1);
  Network net(cfg, rng);
  fill_rows(net.layers()[0], 0, {0.6, 0.25, 0.15});
  fill_rows(net.layers()[0], 1, {0.2, 0.5, 0.3});
  fill_rows(net.layers()[1], 0, {0.7, 0.4, 0.1, 0.2});
  const double z[] = {0.0};
  const auto pass = net.forward(one_expert(0.3, 1.0), z);
  const auto h1 = std::get<Univariate>(pass.neuron(1, 0));
  const auto h2 = std::get<Univariate>(pass.neuron(1, 1));
  const auto top = std::get<Univariate>(pass.neuron(2, 0));
  // mpmath quadrature references
  CHECK(h1.mean == Approx(-0.32).epsilon(1e-12));
  CHECK(h1.variance == Approx(1.0).epsilon(1e-12));
  CHECK(h2.mean == Approx(-0.94).epsilon(1e-12));
  CHECK(top.mean == Approx(-0.0714285714285714).epsilon(1e-12));
  CHECK(top.variance == Approx(0.714285714285714).epsilon(1e-12));
}

TEST_CASE("updates") {
  SUBCASE("eta = 0 is a no-op") {
    Rng rng(5);
    Network net(config({4, 1}, 2), rng);
    const auto before = net.layers()[0].weights;
    const double z[] = {0.2};
    const double y[] = {1.0};
    const auto base = one_expert(0.2, 1.0);
    const auto inferred = net.infer(base, z);
    const auto p = net.infer_update(base, z, y, 0.0);
    CHECK(net.layers()[0].weights == before);
    CHECK(p.log_density(y) == inferred.log_density(y));
  }
  SUBCASE("gradient sign moves weight towards the matching expert") {
    Rng rng(6);
    NetworkConfig cfg = config({1}, 1);
    cfg.base_count = 2;
    cfg.learning_rate = 0.01;
    Network net(cfg, rng);
    const Univariate u[] = {{0.0, 1.0}, {2.0, 1.0}};
    const double z[] = {0.0};
    const double y[] = {2.0};
    const auto before = net.layers()[0].row(0, net.active_cells(z)[0][0])[1];
    net.infer_update(make_expert_set(u), z, y);
    CHECK(net.layers()[0].row(0, net.active_cells(z)[0][0])[1] > before);
  }
  SUBCASE("repeating an example lowers its loss") {
    Rng rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int worse = 0;
    for (int n = 0; n < 100; ++n) {
      NetworkConfig cfg = config({4, 1}, 2);
      cfg.learning_rate = 1e-3;
      Network net(cfg, rng);
      const double z[] = {u(rng)};
      const double y[] = {2.0 * u(rng)};
      const auto base = one_expert(z[0], 1.0);
      const double first = -net.infer_update(base, z, y).log_density(y);
      const double second = -net.infer(base, z).log_density(y);
      if (second > first + 1e-12) ++worse;
    }
    CHECK(worse == 0);
  }
  SUBCASE("inputs in one cell share outputs") {
    Rng rng(8);
    Network net(config({6, 1}, 3), rng);
    const Dataset d = gen_heteroskedastic(200, 3);
    for (std::size_t i = 0; i < d.rows; ++i) net.infer_update(one_expert(0.0, 1.0), d.row_x(i), d.row_y(i));
    const double z1[] = {0.5};
    const double z2[] = {0.5 + 1e-10};
    if (net.active_cells(z1) == net.active_cells(z2)) {
      const auto a = net.infer(one_expert(0.0, 1.0), z1);
      const auto b = net.infer(one_expert(0.0, 1.0), z2);
      CHECK(std::get<Univariate>(a.top).mean == std::get<Univariate>(b.top).mean);
    }
  }
}

TEST_CASE("switching aggregation") {
  SwitchingState st(3);
  for (double w : st.weights) CHECK(w == Approx(1.0 / 3.0));
  const double rho[] = {1.0, 0.0, 0.0};
  const double pi = switching_step(st, rho);
  CHECK(pi == Approx(1.0 / 3.0));
  CHECK(st.weights[0] == Approx(0.5).epsilon(1e-15));
  CHECK(st.weights[1] == Approx(0.25).epsilon(1e-15));
  CHECK(st.weights[2] == Approx(0.25).epsilon(1e-15));

  SwitchingState two(2);
  const double eq[] = {0.3, 0.3};
  for (int i = 0; i < 100; ++i) switching_step(two, eq);
  CHECK(two.weights[0] == 0.5);

  SwitchingState a(3);
  SwitchingState b(3);
  const double d[] = {0.2, 1.5, 0.7};
  const double ld[] = {std::log(0.2), std::log(1.5), std::log(0.7)};
  switching_step(a, d);
  switching_step_log(b, ld);
  for (int i = 0; i < 3; ++i) CHECK(a.weights[i] == Approx(b.weights[i]).epsilon(1e-14));

  const double zero[] = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(switching_step(a, zero), ZeroDensity);
}

TEST_CASE("predictive density") {
  Rng rng(9);
  Network net(config({1}, 1), rng);
  fill_rows(net.layers()[0], 0, {1.0, 0.0, 0.0});
  const double z[] = {0.0};
  const auto base = one_expert(0.0, 1.0);
  const double y0[] = {0.0};
  CHECK(net.predict_density(base, z, y0) == Approx(0.3989422804014327).epsilon(1e-14));
  const double ya[] = {0.8};
  const double yb[] = {-0.8};
  CHECK(net.predict_density(base, z, ya) == net.predict_density(base, z, yb));
  double integral = 0.0;
  for (int k = 0; k <= 20000; ++k) {
    const double y[] = {-10.0 + 0.001 * k};
    integral += (k == 0 || k == 20000 ? 0.5 : 1.0) * 0.001 * net.predict_density(base, z, y);
  }
  CHECK(integral == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("snapshot round trip") {
  Rng rng(10);
  NetworkConfig cfg = config({5, 3, 1}, 3);
  cfg.aggregation = Aggregation::switching;
  cfg.constraints.mu_max = 4.0;
  Network net(cfg, rng);
  const Dataset d = gen_heteroskedastic(50, 1);
  for (std::size_t i = 0; i < d.rows; ++i) net.infer_update(one_expert(0.0, 1.0), d.row_x(i), d.row_y(i));
  std::stringstream buf;
  net.save(buf);
  const Network back = Network::load(buf);
  for (std::size_t l = 0; l < 3; ++l) CHECK(back.layers()[l].weights == net.layers()[l].weights);
  CHECK(back.switching().weights == net.switching().weights);
  CHECK(back.config().constraints.mu_max == cfg.constraints.mu_max);
  const double z[] = {0.4};
  const double y[] = {0.1};
  CHECK(back.predict_density(one_expert(0.0, 1.0), z, y) == net.predict_density(one_expert(0.0, 1.0), z, y));

  std::stringstream junk("not a snapshot");
  CHECK_THROWS(Network::load(junk));
}

TEST_CASE("serial and parallel kernels agree") {
  NetworkConfig cfg = config({16, 8, 1}, 4);
  cfg.aggregation = Aggregation::switching;
  Rng r1(12);
  Rng r2(12);
  Network a(cfg, r1);
  Network b(cfg, r2);
  a.set_exec(Exec::serial);
  b.set_exec(Exec::parallel);
  const Dataset d = gen_heteroskedastic(300, 2);
  for (std::size_t i = 0; i < d.rows; ++i) {
    const auto base = one_expert(d.row_x(i)[0], 1.0);
    a.infer_update(base, d.row_x(i), d.row_y(i));
    b.infer_update(base, d.row_x(i), d.row_y(i));
  }
  for (std::size_t l = 0; l < 3; ++l) CHECK(a.layers()[l].weights == b.layers()[l].weights);
}
