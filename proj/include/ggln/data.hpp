#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggln/gating.hpp"

namespace ggln {

/// Malformed input file or unusable dataset.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major N x d features and N x D targets.
struct Dataset {
  std::size_t rows = 0;
  std::size_t features = 0;
  std::size_t targets = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::string> feature_names;
  std::vector<std::string> target_names;
  std::size_t dropped_rows = 0;  // rows rejected for NaN values

  std::span<const double> row_x(std::size_t i) const { return {x.data() + i * features, features}; }
  std::span<const double> row_y(std::size_t i) const { return {y.data() + i * targets, targets}; }
  std::span<double> row_x(std::size_t i) { return {x.data() + i * features, features}; }
  std::span<double> row_y(std::size_t i) { return {y.data() + i * targets, targets}; }

  Dataset subset(std::span<const std::size_t> idx) const;
};

/// Reads a numeric CSV with a header line. Columns named in `target_columns`
/// become targets (in that order); the rest are features. Rows containing NaN
/// are dropped and counted. Throws DataError naming the line of a malformed row.
Dataset load_csv(const std::string& path, const std::vector<std::string>& target_columns);

enum class ScaleMode { zscore, minmax };

std::string to_string(ScaleMode m);
ScaleMode scale_mode_from_string(const std::string& s);

/// Per-column affine map v -> (v - shift) / scale. Min-max maps to [-1, 1].
struct ColumnScaler {
  ScaleMode mode = ScaleMode::zscore;
  std::vector<double> shift;
  std::vector<double> scale;
  std::vector<std::size_t> constant_columns;  // columns whose spread was 0

  static ColumnScaler fit(std::span<const double> data, std::size_t rows, std::size_t cols, ScaleMode mode);
  void apply(std::span<double> data) const;
  void invert(std::span<double> data) const;
  double invert_value(double v, std::size_t col) const { return v * scale[col] + shift[col]; }
};

struct Split {
  Dataset train;
  Dataset test;
  ColumnScaler x_scaler;
  ColumnScaler y_scaler;
};

/// Shuffles with `seed`, puts floor(N * train_fraction) rows in train, fits the
/// scalers on the train rows only and applies them to both parts.
Split split_normalize(const Dataset& ds, double train_fraction, std::uint64_t seed, ScaleMode mode);

/// A fresh permutation of 0..n-1 for one epoch.
std::vector<std::size_t> epoch_order(std::size_t n, Rng& rng);

double hetero_mean(double x);
double hetero_log_sigma(double x);

/// x ~ U[0, 1], y ~ N(hetero_mean(x), exp(hetero_log_sigma(x))^2).
Dataset gen_heteroskedastic(std::size_t n, std::uint64_t seed);

/// x ~ N(0, I_d), y = a.x + b + N(0, noise^2) with a, b drawn once from `seed`.
struct LinearTask {
  Dataset data;
  std::vector<double> coef;
  double intercept = 0.0;
  double noise = 0.0;
};
LinearTask gen_linear(std::size_t n, std::size_t d, double noise, std::uint64_t seed);

/// Two-dimensional Swiss roll, t in [1.5 pi, 4.5 pi], point (t cos t, t sin t)
/// divided by 4.5 pi, plus N(0, noise^2 I) and clipped to [-1, 1]^2. The points
/// are stored as features; targets are empty.
Dataset gen_swiss_roll(std::size_t n, double noise, std::uint64_t seed);
std::array<double, 2> swiss_roll_point(double t);

/// Distance from p to the noiseless curve, by dense sampling of t.
class SwissRollCurve {
 public:
  explicit SwissRollCurve(std::size_t samples = 20000);
  double distance(std::span<const double> p) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// IDX image file (magic 0x00000803): N images of r x c unsigned bytes,
/// returned as N flat feature rows of byte values.
Dataset load_idx_images(const std::string& path);

}  // namespace ggln
