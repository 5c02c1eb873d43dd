#include "ggln/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace ggln {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      cur += ch;
    } else if (ch == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s == "nan" || s == "NaN" || s == "NA" || s.empty()) {
    v = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && ptr == end;
}

std::uint32_t read_be32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw DataError("truncated IDX header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> idx) const {
  Dataset out;
  out.rows = idx.size();
  out.features = features;
  out.targets = targets;
  out.feature_names = feature_names;
  out.target_names = target_names;
  out.x.reserve(idx.size() * features);
  out.y.reserve(idx.size() * targets);
  for (std::size_t i : idx) {
    const auto rx = row_x(i);
    const auto ry = row_y(i);
    out.x.insert(out.x.end(), rx.begin(), rx.end());
    out.y.insert(out.y.end(), ry.begin(), ry.end());
  }
  return out;
}

Dataset load_csv(const std::string& path, const std::vector<std::string>& target_columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const auto header = split_fields(line);
  std::vector<int> role(header.size(), -1);  // -1 feature, else target slot
  Dataset ds;
  for (std::size_t t = 0; t < target_columns.size(); ++t) {
    const auto it = std::find(header.begin(), header.end(), target_columns[t]);
    if (it == header.end()) throw DataError(path + ": no column named '" + target_columns[t] + "'");
    role[static_cast<std::size_t>(it - header.begin())] = static_cast<int>(t);
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (role[c] < 0) ds.feature_names.push_back(header[c]);
  }
  ds.target_names = target_columns;
  ds.features = ds.feature_names.size();
  ds.targets = target_columns.size();
  std::vector<double> xs(ds.features);
  std::vector<double> ys(ds.targets);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    bool has_nan = false;
    std::size_t fx = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_number(fields[c], v)) {
        throw DataError(path + ":" + std::to_string(line_no) + ": cannot parse '" + fields[c] + "' in column " +
                        header[c]);
      }
      has_nan |= std::isnan(v);
      if (role[c] < 0) {
        xs[fx++] = v;
      } else {
        ys[static_cast<std::size_t>(role[c])] = v;
      }
    }
    if (has_nan) {
      ++ds.dropped_rows;
      continue;
    }
    ds.x.insert(ds.x.end(), xs.begin(), xs.end());
    ds.y.insert(ds.y.end(), ys.begin(), ys.end());
    ++ds.rows;
  }
  if (ds.rows == 0) throw DataError(path + ": no data rows");
  return ds;
}

std::string to_string(ScaleMode m) { return m == ScaleMode::zscore ? "zscore" : "minmax"; }

ScaleMode scale_mode_from_string(const std::string& s) {
  if (s == "zscore") return ScaleMode::zscore;
  if (s == "minmax") return ScaleMode::minmax;
  throw std::invalid_argument("unknown scale mode '" + s + "'");
}

ColumnScaler ColumnScaler::fit(std::span<const double> data, std::size_t rows, std::size_t cols, ScaleMode mode) {
  ColumnScaler s;
  s.mode = mode;
  s.shift.assign(cols, 0.0);
  s.scale.assign(cols, 1.0);
  if (rows == 0) return s;
  for (std::size_t c = 0; c < cols; ++c) {
    double spread = 0.0;
    if (mode == ScaleMode::zscore) {
      double mean = 0.0;
      for (std::size_t i = 0; i < rows; ++i) mean += data[i * cols + c];
      mean /= static_cast<double>(rows);
      double var = 0.0;
      for (std::size_t i = 0; i < rows; ++i) var += (data[i * cols + c] - mean) * (data[i * cols + c] - mean);
      spread = std::sqrt(var / static_cast<double>(rows));
      s.shift[c] = mean;
    } else {
      double lo = data[c];
      double hi = data[c];
      for (std::size_t i = 1; i < rows; ++i) {
        lo = std::min(lo, data[i * cols + c]);
        hi = std::max(hi, data[i * cols + c]);
      }
      s.shift[c] = 0.5 * (lo + hi);
      spread = 0.5 * (hi - lo);
    }
    if (spread > 0.0) {
      s.scale[c] = spread;
    } else {
      s.constant_columns.push_back(c);
    }
  }
  return s;
}

void ColumnScaler::apply(std::span<double> data) const {
  const std::size_t cols = shift.size();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = (data[i] - shift[i % cols]) / scale[i % cols];
}

void ColumnScaler::invert(std::span<double> data) const {
  const std::size_t cols = shift.size();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = data[i] * scale[i % cols] + shift[i % cols];
}

Split split_normalize(const Dataset& ds, double train_fraction, std::uint64_t seed, ScaleMode mode) {
  if (ds.rows < 2) throw DataError("need at least two rows to split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw DataError("train fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(ds.rows) * train_fraction));
  if (n_train == 0 || n_train == ds.rows) throw DataError("split leaves an empty part");
  Rng rng(seed);
  const auto order = epoch_order(ds.rows, rng);
  const std::span<const std::size_t> all(order);
  Split s;
  s.train = ds.subset(all.first(n_train));
  s.test = ds.subset(all.subspan(n_train));
  s.x_scaler = ColumnScaler::fit(s.train.x, s.train.rows, ds.features, mode);
  s.y_scaler = ColumnScaler::fit(s.train.y, s.train.rows, ds.targets, mode);
  for (Dataset* part : {&s.train, &s.test}) {
    s.x_scaler.apply(part->x);
    s.y_scaler.apply(part->y);
  }
  return s;
}

std::vector<std::size_t> epoch_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Fisher-Yates with an explicit draw so the order is identical across
  // standard library implementations.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

double hetero_mean(double x) {
  return 2.0 * (std::exp(-30.0 * (x - 0.25) * (x - 0.25)) + std::sin(std::numbers::pi * x * x)) - 2.0;
}

double hetero_log_sigma(double x) { return std::sin(2.0 * std::numbers::pi * x); }

Dataset gen_heteroskedastic(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset ds;
  ds.rows = n;
  ds.features = 1;
  ds.targets = 1;
  ds.feature_names = {"x"};
  ds.target_names = {"y"};
  ds.x.resize(n);
  ds.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng);
    ds.x[i] = x;
    ds.y[i] = hetero_mean(x) + std::exp(hetero_log_sigma(x)) * g(rng);
  }
  return ds;
}

LinearTask gen_linear(std::size_t n, std::size_t d, double noise, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  LinearTask task;
  task.noise = noise;
  task.coef.resize(d);
  for (auto& a : task.coef) a = g(rng);
  task.intercept = g(rng);
  Dataset& ds = task.data;
  ds.rows = n;
  ds.features = d;
  ds.targets = 1;
  for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("x" + std::to_string(j));
  ds.target_names = {"y"};
  ds.x.resize(n * d);
  ds.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double y = task.intercept;
    for (std::size_t j = 0; j < d; ++j) {
      const double v = g(rng);
      ds.x[i * d + j] = v;
      y += task.coef[j] * v;
    }
    ds.y[i] = y + noise * g(rng);
  }
  return task;
}

std::array<double, 2> swiss_roll_point(double t) {
  const double scale = 4.5 * std::numbers::pi;
  return {t * std::cos(t) / scale, t * std::sin(t) / scale};
}

Dataset gen_swiss_roll(std::size_t n, double noise, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(1.5 * std::numbers::pi, 4.5 * std::numbers::pi);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset ds;
  ds.rows = n;
  ds.features = 2;
  ds.feature_names = {"x0", "x1"};
  ds.x.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = swiss_roll_point(u(rng));
    for (std::size_t k = 0; k < 2; ++k) ds.x[2 * i + k] = std::clamp(p[k] + noise * g(rng), -1.0, 1.0);
  }
  return ds;
}

SwissRollCurve::SwissRollCurve(std::size_t samples) {
  xs_.resize(samples);
  ys_.resize(samples);
  const double t0 = 1.5 * std::numbers::pi;
  const double t1 = 4.5 * std::numbers::pi;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const auto p = swiss_roll_point(t);
    xs_[i] = p[0];
    ys_[i] = p[1];
  }
}

double SwissRollCurve::distance(std::span<const double> p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const double dx = xs_[i] - p[0];
    const double dy = ys_[i] - p[1];
    best = std::min(best, dx * dx + dy * dy);
  }
  return std::sqrt(best);
}

Dataset load_idx_images(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  const std::uint32_t magic = read_be32(in);
  if (magic != 0x00000803u) {
    std::ostringstream msg;
    msg << path << ": bad IDX magic 0x" << std::hex << magic << " (expected 0x803)";
    throw DataError(msg.str());
  }
  const std::uint32_t n = read_be32(in);
  const std::uint32_t r = read_be32(in);
  const std::uint32_t c = read_be32(in);
  Dataset ds;
  ds.rows = n;
  ds.features = std::size_t{r} * c;
  std::vector<unsigned char> buf(ds.rows * ds.features);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) throw DataError(path + ": truncated IDX payload");
  ds.x.assign(buf.begin(), buf.end());
  return ds;
}

}  // namespace ggln
