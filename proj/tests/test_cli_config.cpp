#include <doctest.h>

#include "run_config.hpp"

using namespace ggln;
using cli::json;

TEST_CASE("defaults cover every command") {
  for (const char* c : {"regress", "bandit", "denoise", "props"}) CHECK_NOTHROW(cli::default_config(c));
  CHECK_THROWS_AS(cli::default_config("train"), cli::ConfigError);
  const auto cfg = cli::default_config("regress");
  CHECK(cfg["network"]["layers"].size() == 12);
  CHECK(cfg["network"]["aggregation"] == "switching");
}

TEST_CASE("schema checks") {
  json cfg = cli::default_config("regress");
  CHECK_THROWS_WITH_AS(cli::merge_checked(cfg, json{{"epoch", 3}}), "epoch: unknown key", cli::ConfigError);
  CHECK_THROWS_WITH_AS(cli::merge_checked(cfg, json{{"network", {{"learning_rate", "fast"}}}}),
                       "network.learning_rate: expected number, got string", cli::ConfigError);
  CHECK_THROWS_AS(cli::merge_checked(cfg, json{{"epochs", -1}}), cli::ConfigError);
  CHECK_THROWS_AS(cli::merge_checked(cfg, json{{"epochs", 1.5}}), cli::ConfigError);
  CHECK_THROWS_AS(cli::merge_checked(cfg, json{{"seeds", {1, "two"}}}), cli::ConfigError);

  cli::merge_checked(cfg, json{{"epochs", 3}, {"network", {{"learning_rate", 1}}}});
  CHECK(cfg["epochs"] == 3);
  CHECK(cfg["network"]["learning_rate"].get<double>() == 1.0);
  cli::merge_checked(cfg, json{{"network", {{"constraints", {{"mu_max", 2.5}}}}}});
  CHECK(cli::network_from_json(cfg["network"]).constraints.mu_max == 2.5);
}

TEST_CASE("overrides") {
  json cfg = cli::default_config("bandit");
  cli::apply_override(cfg, "network.layers=[8,1]");
  cli::apply_override(cfg, "env=linear");
  cli::apply_override(cfg, "bonus=0");
  CHECK(cfg["network"]["layers"] == json::array({8, 1}));
  CHECK(cfg["env"] == "linear");
  CHECK(cfg["bonus"].get<double>() == 0.0);
  CHECK_THROWS_AS(cli::apply_override(cfg, "bonus"), cli::ConfigError);
  CHECK_THROWS_AS(cli::apply_override(cfg, "network.depth=3"), cli::ConfigError);

  const auto net = cli::network_from_json(cfg["network"]);
  CHECK(net.layer_sizes == std::vector<std::size_t>{8, 1});
  CHECK(net.aggregation == Aggregation::top_neuron);
}
