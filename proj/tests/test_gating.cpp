#include <doctest.h>

#include <cmath>

#include "ggln/gating.hpp"
#include "ggln/gaussian.hpp"

using namespace ggln;

TEST_CASE("half-space sampling") {
  Rng a(5);
  Rng b(5);
  const auto h1 = sample_halfspace(6, 0.05, a);
  const auto h2 = sample_halfspace(6, 0.05, b);
  double n2 = 0.0;
  for (double v : h1.normal()) n2 += v * v;
  CHECK(std::abs(std::sqrt(n2) - 1.0) < 1e-9);
  CHECK(std::equal(h1.normal().begin(), h1.normal().end(), h2.normal().begin()));
  CHECK(h1.offset() == h2.offset());

  Rng rng(11);
  double mean[3] = {0, 0, 0};
  for (int i = 0; i < 10000; ++i) {
    const auto h = sample_halfspace(3, 0.0, rng);
    for (int j = 0; j < 3; ++j) mean[j] += h.normal()[j] / 10000.0;
  }
  for (double m : mean) CHECK(std::abs(m) < 0.05);
}

TEST_CASE("context bits") {
  const HalfSpaceContext c({1.0, 0.0}, 0.0);
  const double in[] = {0.5, -1.0};
  const double out[] = {-0.5, 3.0};
  const double edge[] = {0.0, 7.0};
  CHECK(context_bit(c, in) == 1);
  CHECK(context_bit(c, out) == 0);
  CHECK(context_bit(c, edge) == 1);
  CHECK_THROWS_AS(HalfSpaceContext({1.0, 1.0}, 0.0), ValidationError);
  CHECK_THROWS_AS(HalfSpaceContext({1.0}, NAN), ValidationError);
}

TEST_CASE("context index is little-endian") {
  const ComposedContext cc({HalfSpaceContext({1.0, 0.0}, 0.0), HalfSpaceContext({0.0, 1.0}, 0.0)});
  const double both[] = {1.0, 1.0};
  const double second[] = {-1.0, 1.0};
  const double none[] = {-1.0, -1.0};
  CHECK(context_index(cc, both) == 3);
  CHECK(context_index(cc, second) == 2);
  CHECK(context_index(cc, none) == 0);
  CHECK(cc.cells() == 4);

  Rng rng(3);
  const auto rand = sample_composed(5, 4, 0.3, rng);
  std::normal_distribution<double> g;
  for (int n = 0; n < 500; ++n) {
    std::vector<double> z(5);
    for (auto& v : z) v = g(rng);
    std::uint32_t ref = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < 5; ++j) dot += rand.contexts()[i].normal()[j] * z[j];
      ref += (dot >= rand.contexts()[i].offset() ? 1u : 0u) << i;
    }
    CHECK(context_index(rand, z) == ref);
    CHECK(context_index_unchecked(rand, z) == ref);
  }
}

TEST_CASE("nearby inputs share more bits") {
  // Mean Hamming distance between bit vectors of z and a perturbed copy,
  // over 10^4 sampled contexts, shrinks as the perturbation shrinks.
  Rng rng(17);
  std::normal_distribution<double> g;
  std::vector<double> z(8);
  for (auto& v : z) v = g(rng);
  std::vector<HalfSpaceContext> cs;
  for (int i = 0; i < 10000; ++i) cs.push_back(sample_halfspace(8, 0.05, rng));
  std::vector<double> dir(8);
  for (auto& v : dir) v = g(rng);
  double last = 1e9;
  for (double eps : {0.5, 0.1, 0.02, 0.004}) {
    std::vector<double> zp(8);
    for (int j = 0; j < 8; ++j) zp[j] = z[j] + eps * dir[j];
    double ham = 0.0;
    for (const auto& c : cs) ham += context_bit(c, z) != context_bit(c, zp);
    ham /= static_cast<double>(cs.size());
    CHECK(ham < last);
    last = ham;
  }
}
