// Serial reference kernels against the OpenMP ones on a UCI-sized network.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ggln/base_models.hpp"
#include "ggln/network.hpp"

using namespace ggln;

namespace {

struct Fixture {
  Network net;
  std::vector<ExpertSet> bases;
  std::vector<std::vector<double>> sides;
  std::vector<double> targets;

  Fixture(std::size_t width, std::size_t depth, Exec exec) : net(make(width, depth)) {
    net.set_exec(exec);
    Rng rng(11);
    std::normal_distribution<double> g;
    for (int i = 0; i < 64; ++i) {
      std::vector<double> z(8);
      for (auto& v : z) v = g(rng);
      std::vector<Univariate> u;
      for (double v : z) u.push_back({v, 1.0});
      bases.push_back(make_expert_set(u));
      sides.push_back(z);
      targets.push_back(g(rng));
    }
  }

  static Network make(std::size_t width, std::size_t depth) {
    NetworkConfig cfg;
    cfg.layer_sizes.assign(depth, width);
    cfg.layer_sizes.push_back(1);
    cfg.context_dim = 4;
    cfg.side_info_dim = 8;
    cfg.base_count = 8;
    Rng rng(3);
    return Network(cfg, rng);
  }
};

void BM_Infer(benchmark::State& state, Exec exec) {
  Fixture f(static_cast<std::size_t>(state.range(0)), 4, exec);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.net.infer(f.bases[i % 64], f.sides[i % 64]));
    ++i;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(i));
}

void BM_InferUpdate(benchmark::State& state, Exec exec) {
  Fixture f(static_cast<std::size_t>(state.range(0)), 4, exec);
  std::size_t i = 0;
  for (auto _ : state) {
    const double y = f.targets[i % 64];
    benchmark::DoNotOptimize(f.net.infer_update(f.bases[i % 64], f.sides[i % 64], std::span<const double>(&y, 1)));
    ++i;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(i));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Infer, serial, Exec::serial)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_Infer, parallel, Exec::parallel)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_InferUpdate, serial, Exec::serial)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_InferUpdate, parallel, Exec::parallel)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
