#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ggln/data.hpp"
#include "ggln/network.hpp"

namespace ggln {

enum class BaseModel { feature, blr, constant };

std::string to_string(BaseModel b);
BaseModel base_model_from_string(const std::string& s);

/// Tabular regression pipeline. `net` supplies the shape and learning
/// hyperparameters; its input sizes are filled in from the data.
struct RegressionSetup {
  NetworkConfig net;
  std::size_t epochs = 40;
  BaseModel base = BaseModel::feature;
  double sigma_fixed = 1.0;  // width of feature-centred experts
  double blr_tau = 1.0;
  double blr_tau0 = 1.0;
  double train_fraction = 0.9;
  ScaleMode scale = ScaleMode::zscore;
  Exec exec = Exec::parallel;
};

struct EpochMetrics {
  std::size_t epoch = 0;      // 0 is the untrained network
  double online_rmse = 0.0;   // prequential RMSE over the epoch's updates, target units
  double test_rmse = 0.0;     // target units
  double test_nll = 0.0;      // mean negative log density, target units
};

struct RegressionResult {
  std::uint64_t seed = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<std::size_t> constant_columns;
  std::vector<EpochMetrics> epochs;

  const EpochMetrics& final() const { return epochs.back(); }
};

/// Split, normalise, then `epochs` shuffled online passes over the train rows,
/// scoring the test rows before training and after every epoch.
RegressionResult run_regression(const Dataset& ds, const RegressionSetup& setup, std::uint64_t seed);

/// Runs the pipeline on already split, normalised data.
RegressionResult run_regression(const Split& split, const RegressionSetup& setup, std::uint64_t seed);

}  // namespace ggln
