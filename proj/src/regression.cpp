#include "ggln/regression.hpp"

#include <cmath>
#include <stdexcept>

#include "ggln/base_models.hpp"

namespace ggln {

std::string to_string(BaseModel b) {
  switch (b) {
    case BaseModel::feature:
      return "feature";
    case BaseModel::blr:
      return "blr";
    case BaseModel::constant:
      return "constant";
  }
  return "feature";
}

BaseModel base_model_from_string(const std::string& s) {
  if (s == "feature") return BaseModel::feature;
  if (s == "blr") return BaseModel::blr;
  if (s == "constant") return BaseModel::constant;
  throw std::invalid_argument("unknown base model '" + s + "'");
}

namespace {

// Layer-0 experts for one row: feature-centred, BLR predictive, or N(0, 1)
// per feature.
class BaseLayer {
 public:
  BaseLayer(const RegressionSetup& setup, std::size_t features)
      : setup_(setup), bank_(features, setup.blr_tau, setup.blr_tau0), scratch_(features) {}

  ExpertSet experts(std::span<const double> x) {
    switch (setup_.base) {
      case BaseModel::feature:
        return make_expert_set(feature_experts(x, setup_.sigma_fixed));
      case BaseModel::blr:
        bank_.predict(x, scratch_);
        return make_expert_set(scratch_);
      case BaseModel::constant:
        break;
    }
    std::fill(scratch_.begin(), scratch_.end(), Univariate{0.0, 1.0});
    return make_expert_set(scratch_);
  }

  void learn(std::span<const double> x, double y) {
    if (setup_.base == BaseModel::blr) bank_.update(x, y);
  }

 private:
  const RegressionSetup& setup_;
  BLRBank bank_;
  std::vector<Univariate> scratch_;
};

void score_test(const Network& net, BaseLayer& base, const Split& split, EpochMetrics& m) {
  const Dataset& test = split.test;
  const double scale = split.y_scaler.scale[0];
  double se = 0.0;
  double nll = 0.0;
  for (std::size_t i = 0; i < test.rows; ++i) {
    const auto x = test.row_x(i);
    const double y = test.row_y(i)[0];
    const Prediction p = net.infer(base.experts(x), x);
    const double err = (p.mean()(0) - y) * scale;
    se += err * err;
    nll -= p.log_density(std::span<const double>(&y, 1)) - std::log(scale);
  }
  m.test_rmse = std::sqrt(se / static_cast<double>(test.rows));
  m.test_nll = nll / static_cast<double>(test.rows);
}

}  // namespace

RegressionResult run_regression(const Dataset& ds, const RegressionSetup& setup, std::uint64_t seed) {
  if (ds.targets != 1) throw std::invalid_argument("regression needs exactly one target column");
  Rng rng(seed);
  const Split split = split_normalize(ds, setup.train_fraction, rng(), setup.scale);
  RegressionResult r = run_regression(split, setup, seed);
  r.constant_columns = split.x_scaler.constant_columns;
  return r;
}

RegressionResult run_regression(const Split& split, const RegressionSetup& setup, std::uint64_t seed) {
  const Dataset& train = split.train;
  NetworkConfig cfg = setup.net;
  cfg.side_info_dim = train.features;
  cfg.base_count = train.features;
  cfg.target_dim = 1;
  cfg.form = Form::univariate;
  // Stream layout: the first draw is reserved for the split.
  Rng rng(seed);
  rng.discard(1);
  Network net(cfg, rng);
  net.set_exec(setup.exec);
  BaseLayer base(setup, train.features);

  RegressionResult r;
  r.seed = seed;
  r.train_rows = train.rows;
  r.test_rows = split.test.rows;
  const double scale = split.y_scaler.scale[0];
  EpochMetrics m0;
  score_test(net, base, split, m0);
  r.epochs.push_back(m0);
  for (std::size_t e = 1; e <= setup.epochs; ++e) {
    EpochMetrics m;
    m.epoch = e;
    double se = 0.0;
    for (std::size_t i : epoch_order(train.rows, rng)) {
      const auto x = train.row_x(i);
      const auto y = train.row_y(i);
      const Prediction p = net.infer_update(base.experts(x), x, y);
      const double err = (p.mean()(0) - y[0]) * scale;
      se += err * err;
      base.learn(x, y[0]);
    }
    m.online_rmse = std::sqrt(se / static_cast<double>(train.rows));
    score_test(net, base, split, m);
    r.epochs.push_back(m);
  }
  return r;
}

}  // namespace ggln
