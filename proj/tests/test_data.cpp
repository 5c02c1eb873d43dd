#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include "ggln/data.hpp"

using namespace ggln;
using doctest::Approx;

namespace {
std::string fixture(const std::string& name) { return std::string(GGLN_TEST_DIR) + "/fixtures/" + name; }

void write_idx(const std::string& path, std::uint32_t magic, const std::vector<std::uint8_t>& pixels,
               std::uint32_t n, std::uint32_t r, std::uint32_t c) {
  std::ofstream out(path, std::ios::binary);
  for (std::uint32_t v : {magic, n, r, c}) {
    const unsigned char b[] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                               static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
  }
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}
}  // namespace

TEST_CASE("CSV loading") {
  const auto ds = load_csv(fixture("three_lines.csv"), {"y"});
  CHECK(ds.rows == 2);
  CHECK(ds.features == 2);
  CHECK(ds.x == std::vector<double>{1.5, 2.0, 4.0, 0.5});
  CHECK(ds.y == std::vector<double>{3.0, -6.0});

  CHECK_THROWS_AS(load_csv(fixture("header_only.csv"), {"y"}), DataError);
  CHECK_THROWS_AS(load_csv(fixture("three_lines.csv"), {"missing"}), DataError);
  CHECK_THROWS_WITH_AS(load_csv(fixture("bad_value.csv"), {"y"}), doctest::Contains(":3:"), DataError);

  const auto nan = load_csv(fixture("with_nan.csv"), {"y"});
  CHECK(nan.rows == 2);
  CHECK(nan.dropped_rows == 2);
}

TEST_CASE("Boston housing file") {
  const auto ds = load_csv(std::string(GGLN_DATA_DIR) + "/boston_housing.csv", {"MEDV"});
  CHECK(ds.rows == 506);
  CHECK(ds.features == 13);
  const auto split = split_normalize(ds, 0.9, 1, ScaleMode::zscore);
  CHECK(split.train.rows == 455);
  CHECK(split.test.rows == 51);
}

TEST_CASE("normalisation") {
  Dataset ds;
  ds.rows = 10;
  ds.features = 2;
  ds.targets = 1;
  for (int i = 0; i < 10; ++i) {
    ds.x.push_back(3.0);  // constant column
    ds.x.push_back(i * 1.5 - 2.0);
    ds.y.push_back(i * i);
  }
  for (ScaleMode mode : {ScaleMode::zscore, ScaleMode::minmax}) {
    const auto s = split_normalize(ds, 0.7, 3, mode);
    CHECK(s.train.rows == 7);
    CHECK(s.x_scaler.constant_columns == std::vector<std::size_t>{0});
    for (std::size_t i = 0; i < s.train.rows; ++i) CHECK(s.train.row_x(i)[0] == 0.0);
    if (mode == ScaleMode::minmax) {
      for (double v : s.train.y) CHECK(std::abs(v) <= 1.0 + 1e-15);
    }
    // round trip
    std::vector<double> back = s.test.y;
    s.y_scaler.invert(back);
    std::vector<double> sorted_back = back;
    std::sort(sorted_back.begin(), sorted_back.end());
    for (double v : sorted_back) {
      CHECK(std::any_of(ds.y.begin(), ds.y.end(), [&](double y) { return std::abs(y - v) < 1e-12; }));
    }
    // statistics come from the train part only
    const auto refit = ColumnScaler::fit(s.test.y, s.test.rows, 1, mode);
    CHECK(refit.shift[0] != Approx(0.0).epsilon(1e-12));
  }
  CHECK(scale_mode_from_string("minmax") == ScaleMode::minmax);
  CHECK_THROWS(scale_mode_from_string("nope"));
}

TEST_CASE("epoch order is a permutation") {
  Rng rng(2);
  for (int e = 0; e < 5; ++e) {
    auto order = epoch_order(101, rng);
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> want(101);
    std::iota(want.begin(), want.end(), std::size_t{0});
    CHECK(order == want);
  }
}

TEST_CASE("heteroskedastic generator") {
  CHECK(hetero_mean(0.25) == Approx(2.0 * (1.0 + std::sin(std::numbers::pi / 16.0)) - 2.0).epsilon(1e-15));
  CHECK(hetero_log_sigma(0.0) == 0.0);
  const auto ds = gen_heteroskedastic(100000, 9);
  double s = 0.0;
  double s2 = 0.0;
  double n = 0.0;
  for (std::size_t i = 0; i < ds.rows; ++i) {
    const double x = ds.x[i];
    if (std::abs(x - 0.75) < 0.01) {
      const double r = ds.y[i] - hetero_mean(x);
      s += r;
      s2 += r * r;
      n += 1.0;
    }
  }
  CHECK(std::sqrt(s2 / n - (s / n) * (s / n)) == Approx(std::exp(-1.0)).epsilon(0.1));
}

TEST_CASE("Swiss roll") {
  const auto a = gen_swiss_roll(500, 0.01, 4);
  const auto b = gen_swiss_roll(500, 0.01, 4);
  CHECK(a.x == b.x);
  const SwissRollCurve curve;
  std::size_t close = 0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (double v : a.row_x(i)) CHECK(std::abs(v) <= 1.0);
    if (curve.distance(a.row_x(i)) <= 0.03) ++close;
  }
  CHECK(static_cast<double>(close) >= 0.99 * static_cast<double>(a.rows));
}

TEST_CASE("IDX images") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string good = (dir / "ggln_test_images.idx").string();
  const std::string bad = (dir / "ggln_test_bad.idx").string();
  write_idx(good, 0x803, {0, 255, 7, 128}, 1, 2, 2);
  write_idx(bad, 0x801, {0, 255, 7, 128}, 1, 2, 2);
  const auto ds = load_idx_images(good);
  CHECK(ds.rows == 1);
  CHECK(ds.features == 4);
  CHECK(ds.x == std::vector<double>{0.0, 255.0, 7.0, 128.0});
  CHECK_THROWS_AS(load_idx_images(bad), DataError);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST_CASE("linear task") {
  const auto t = gen_linear(200, 3, 0.5, 1);
  CHECK(t.data.rows == 200);
  CHECK(t.coef.size() == 3);
  double ss = 0.0;
  for (std::size_t i = 0; i < t.data.rows; ++i) {
    double f = t.intercept;
    for (std::size_t j = 0; j < 3; ++j) f += t.coef[j] * t.data.row_x(i)[j];
    ss += (t.data.y[i] - f) * (t.data.y[i] - f);
  }
  CHECK(std::sqrt(ss / 200.0) == Approx(0.5).epsilon(0.15));
}
