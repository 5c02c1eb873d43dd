// ggln: regression benchmark, bandit simulation, denoising and property checks.
//
// Exit codes: 0 success, 1 a run failed or a property check failed, 2 bad
// usage or config.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <omp.h>

#include "ggln/bandits.hpp"
#include "ggln/checks.hpp"
#include "ggln/data.hpp"
#include "ggln/denoising.hpp"
#include "ggln/regression.hpp"
#include "run_config.hpp"

#ifndef GGLN_DEFAULT_DATA_DIR
#define GGLN_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace ggln;
using cli::json;

namespace {

struct RunFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

json mean_se(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())) : 0.0;
  return {{"mean", mean}, {"se", se}, {"n", v.size()}};
}

void write_json(const json& doc, const std::string& path) {
  if (path == "-") {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path);
  if (!out) throw RunFailure("cannot write " + path);
  out << doc.dump(2) << "\n";
}

std::string data_dir() {
  const char* env = std::getenv("GGLN_DATA_DIR");
  return env && *env ? env : GGLN_DEFAULT_DATA_DIR;
}

// Collects exceptions thrown inside an OpenMP loop and rethrows the first.
class ErrorSlot {
 public:
  void capture() {
#pragma omp critical(ggln_error_slot)
    if (!err_) err_ = std::current_exception();
  }
  void rethrow() const {
    if (err_) std::rethrow_exception(err_);
  }

 private:
  std::exception_ptr err_;
};

// ---------------------------------------------------------------------------
// regress

struct RegisteredDataset {
  std::string file;
  std::string target;
  std::vector<std::string> drop;
};

const std::map<std::string, RegisteredDataset>& registry() {
  static const std::map<std::string, RegisteredDataset> r{
      {"boston", {"boston_housing.csv", "MEDV", {}}},
      {"energy", {"energy_efficiency.csv", "Y1", {"Y2"}}},
      {"wine", {"winequality-red.csv", "quality", {}}},
  };
  return r;
}

Dataset drop_features(const Dataset& ds, const std::vector<std::string>& names) {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < ds.features; ++j) {
    if (std::find(names.begin(), names.end(), ds.feature_names[j]) == names.end()) keep.push_back(j);
  }
  if (keep.size() == ds.features) return ds;
  Dataset out = ds;
  out.features = keep.size();
  out.feature_names.clear();
  out.x.clear();
  for (std::size_t j : keep) out.feature_names.push_back(ds.feature_names[j]);
  for (std::size_t i = 0; i < ds.rows; ++i)
    for (std::size_t j : keep) out.x.push_back(ds.x[i * ds.features + j]);
  return out;
}

Dataset regress_dataset(const json& cfg) {
  const auto name = cfg["dataset"].get<std::string>();
  const auto path = cfg["data_path"].get<std::string>();
  const auto target = cfg["target"].get<std::string>();
  if (name == "synthetic_linear") {
    return gen_linear(cfg["synthetic_rows"].get<std::size_t>(), cfg["synthetic_features"].get<std::size_t>(),
                      cfg["synthetic_noise"].get<double>(), 0)
        .data;
  }
  if (name == "heteroskedastic") return gen_heteroskedastic(cfg["synthetic_rows"].get<std::size_t>(), 0);
  if (name == "csv") {
    if (path.empty() || target.empty()) throw cli::ConfigError("dataset: 'csv' needs data_path and target");
    return load_csv(path, {target});
  }
  const auto it = registry().find(name);
  if (it == registry().end()) {
    throw cli::ConfigError("dataset: unknown dataset '" + name +
                           "' (boston, energy, wine, csv, synthetic_linear, heteroskedastic)");
  }
  const std::string file = path.empty() ? (fs::path(data_dir()) / it->second.file).string() : path;
  if (!fs::exists(file)) throw RunFailure("dataset '" + name + "' not found at " + file);
  return drop_features(load_csv(file, {target.empty() ? it->second.target : target}), it->second.drop);
}

json epochs_json(const RegressionResult& r) {
  json a = json::array();
  for (const auto& e : r.epochs) {
    a.push_back({{"epoch", e.epoch}, {"online_rmse", e.online_rmse}, {"test_rmse", e.test_rmse},
                 {"test_nll", e.test_nll}});
  }
  return a;
}

int cmd_regress(const json& cfg, int jobs) {
  RegressionSetup base;
  base.net = cli::network_from_json(cfg["network"]);
  base.epochs = cfg["epochs"].get<std::size_t>();
  base.base = base_model_from_string(cfg["base"].get<std::string>());
  base.sigma_fixed = cfg["sigma_fixed"].get<double>();
  base.blr_tau = cfg["blr_tau"].get<double>();
  base.blr_tau0 = cfg["blr_tau0"].get<double>();
  base.train_fraction = cfg["train_fraction"].get<double>();
  base.scale = scale_mode_from_string(cfg["scale"].get<std::string>());

  auto lrs = cfg["sweep_learning_rates"].get<std::vector<double>>();
  auto dims = cfg["sweep_context_dims"].get<std::vector<std::size_t>>();
  if (lrs.empty()) lrs = {base.net.learning_rate};
  if (dims.empty()) dims = {base.net.context_dim};
  const auto seeds = cfg["seeds"].get<std::vector<std::uint64_t>>();
  if (seeds.empty()) throw cli::ConfigError("seeds: at least one seed is required");

  std::vector<RegressionSetup> setups;
  for (double lr : lrs) {
    for (std::size_t s : dims) {
      RegressionSetup st = base;
      st.net.learning_rate = lr;
      st.net.context_dim = s;
      st.exec = jobs > 1 ? Exec::serial : Exec::parallel;
      setups.push_back(st);
    }
  }

  const Dataset ds = regress_dataset(cfg);
  std::cerr << "regress: " << ds.rows << " rows, " << ds.features << " features, " << setups.size()
            << " configs x " << seeds.size() << " seeds\n";

  const std::size_t tasks = setups.size() * seeds.size();
  std::vector<RegressionResult> results(tasks);
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t i = 0; i < tasks; ++i) {
    try {
      results[i] = run_regression(ds, setups[i / seeds.size()], seeds[i % seeds.size()]);
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();

  json configs = json::array();
  std::size_t best = 0;
  double best_rmse = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < setups.size(); ++c) {
    json runs = json::array();
    std::vector<double> rmse;
    std::vector<double> nll;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const auto& r = results[c * seeds.size() + k];
      rmse.push_back(r.final().test_rmse);
      nll.push_back(r.final().test_nll);
      runs.push_back({{"seed", r.seed},
                      {"train_rows", r.train_rows},
                      {"test_rows", r.test_rows},
                      {"constant_columns", r.constant_columns},
                      {"test_rmse", r.final().test_rmse},
                      {"test_nll", r.final().test_nll},
                      {"epochs", epochs_json(r)}});
    }
    json entry = {{"learning_rate", setups[c].net.learning_rate},
                  {"context_dim", setups[c].net.context_dim},
                  {"test_rmse", mean_se(rmse)},
                  {"test_nll", mean_se(nll)},
                  {"runs", runs}};
    const double m = entry["test_rmse"]["mean"].get<double>();
    if (m < best_rmse) {
      best_rmse = m;
      best = c;
    }
    std::cerr << "  lr=" << setups[c].net.learning_rate << " s=" << setups[c].net.context_dim
              << "  test RMSE " << m << " +/- " << entry["test_rmse"]["se"].get<double>() << "\n";
    configs.push_back(entry);
  }

  json doc = {{"command", "regress"},
              {"timestamp", timestamp()},
              {"config", cfg},
              {"dataset", {{"name", cfg["dataset"]}, {"rows", ds.rows}, {"features", ds.features},
                           {"dropped_rows", ds.dropped_rows}}},
              {"configs", configs},
              {"best", {{"index", best},
                        {"learning_rate", configs[best]["learning_rate"]},
                        {"context_dim", configs[best]["context_dim"]},
                        {"test_rmse", configs[best]["test_rmse"]},
                        {"test_nll", configs[best]["test_nll"]}}}};
  write_json(doc, cfg["output"].get<std::string>());
  return 0;
}

// ---------------------------------------------------------------------------
// bandit

std::unique_ptr<BanditEnv> make_env(const json& cfg, std::uint64_t seed) {
  const auto name = cfg["env"].get<std::string>();
  if (name == "wheel") {
    WheelConfig w;
    w.delta = cfg["delta"].get<double>();
    w.mean_safe = cfg["mean_safe"].get<double>();
    w.mean_base = cfg["mean_base"].get<double>();
    w.mean_high = cfg["mean_high"].get<double>();
    w.noise = cfg["noise"].get<double>();
    return std::make_unique<WheelEnv>(w);
  }
  if (name == "linear") {
    LinearBanditConfig l;
    l.actions = cfg["linear_actions"].get<std::size_t>();
    l.context_dim = cfg["linear_context_dim"].get<std::size_t>();
    l.noise = cfg["linear_noise"].get<double>();
    l.seed = seed;
    return std::make_unique<LinearGaussianEnv>(l);
  }
  throw cli::ConfigError("env: unknown environment '" + name + "' (wheel, linear)");
}

int cmd_bandit(const json& cfg, int jobs) {
  GLCBConfig gc;
  gc.net = cli::network_from_json(cfg["network"]);
  gc.bonus = cfg["bonus"].get<double>();
  gc.reward_scale = cfg["reward_scale"].get<double>();
  gc.sigma_fixed = cfg["sigma_fixed"].get<double>();
  const auto seeds = cfg["seeds"].get<std::vector<std::uint64_t>>();
  if (seeds.empty()) throw cli::ConfigError("seeds: at least one seed is required");
  const auto horizon = cfg["horizon"].get<std::size_t>();
  const fs::path dir = cfg["output_dir"].get<std::string>();
  make_env(cfg, 0);  // validate before spending time
  fs::create_directories(dir);

  std::vector<BanditTrace> traces(seeds.size());
  std::vector<char> conserved(seeds.size(), 0);
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    try {
      Rng rng(seeds[i]);
      const auto env = make_env(cfg, seeds[i]);
      GLCBAgent agent(gc, env->context_dim(), env->actions(), rng);
      traces[i] = run_bandit(*env, agent, horizon, rng);
      conserved[i] = counters_conserved(agent);
      std::ofstream out(dir / ("trace_seed" + std::to_string(seeds[i]) + ".jsonl"));
      for (std::size_t t = 0; t < horizon; ++t) {
        out << json{{"t", t + 1},
                    {"action", traces[i].actions[t]},
                    {"reward", traces[i].rewards[t]},
                    {"pseudo_count", traces[i].pseudo_counts[t]},
                    {"regret", traces[i].regret[t]}}
                   .dump()
            << "\n";
      }
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();

  std::vector<double> reward;
  std::vector<double> regret;
  json runs = json::array();
  bool all_conserved = true;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    reward.push_back(traces[i].cumulative_reward());
    regret.push_back(horizon ? traces[i].regret.back() : 0.0);
    all_conserved &= conserved[i] != 0;
    runs.push_back({{"seed", seeds[i]},
                    {"cumulative_reward", reward.back()},
                    {"cumulative_regret", regret.back()},
                    {"counters_conserved", conserved[i] != 0}});
  }
  const json doc = {{"command", "bandit"},
                    {"timestamp", timestamp()},
                    {"config", cfg},
                    {"cumulative_reward", mean_se(reward)},
                    {"cumulative_regret", mean_se(regret)},
                    {"counters_conserved", all_conserved},
                    {"runs", runs}};
  write_json(doc, (dir / "summary.json").string());
  std::cerr << "bandit: mean cumulative reward " << doc["cumulative_reward"]["mean"].get<double>() << " over "
            << seeds.size() << " seeds; traces in " << dir.string() << "\n";
  return all_conserved ? 0 : 1;
}

// ---------------------------------------------------------------------------
// denoise

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int cmd_denoise(const json& cfg, int jobs) {
  const auto seed = cfg["seed"].get<std::uint64_t>();
  const auto name = cfg["dataset"].get<std::string>();
  Dataset data;
  if (name == "swiss_roll") {
    data = gen_swiss_roll(cfg["samples"].get<std::size_t>(), cfg["data_noise"].get<double>(), seed);
  } else if (name == "csv") {
    const auto path = cfg["data_path"].get<std::string>();
    if (path.empty()) throw cli::ConfigError("data_path: required for the 'csv' dataset");
    data = load_csv(path, {});
    ColumnScaler::fit(data.x, data.rows, data.features, ScaleMode::minmax).apply(data.x);
  } else {
    throw cli::ConfigError("dataset: unknown dataset '" + name + "' (swiss_roll, csv)");
  }
  const std::size_t d = data.features;

  DenoiserConfig dc;
  dc.lambda = cfg["lambda"].get<double>();
  dc.step = cfg["step"].get<double>();
  dc.sigma2_base = cfg["sigma2_base"].get<double>();
  dc.fixed_noise = cfg["fixed_noise"].get<bool>();
  dc.epochs = cfg["epochs"].get<std::size_t>();
  HMCConfig hc;
  hc.steps = cfg["hmc_steps"].get<std::size_t>();
  hc.substeps = cfg["hmc_substeps"].get<std::size_t>();
  hc.epsilon = cfg["hmc_epsilon"].get<double>();
  hc.mass = cfg["hmc_mass"].get<double>();
  dc.validate();
  hc.validate();

  NetworkConfig nc = cli::network_from_json(cfg["network"]);
  const NetworkConfig shape = denoiser_network(d);
  nc.side_info_dim = shape.side_info_dim;
  nc.base_count = shape.base_count;
  nc.target_dim = shape.target_dim;
  nc.form = shape.form;

  Rng rng(seed + 1);
  Network net(nc, rng);
  net.set_exec(jobs > 1 ? Exec::serial : Exec::parallel);
  train_denoiser(net, data, dc, rng);

  const fs::path dir = cfg["output_dir"].get<std::string>();
  fs::create_directories(dir);
  if (const auto snap = cfg["snapshot"].get<std::string>(); !snap.empty()) {
    std::ofstream out(snap, std::ios::binary);
    if (!out) throw RunFailure("cannot write snapshot " + snap);
    net.save(out);
  }

  json metrics = {{"command", "denoise"}, {"timestamp", timestamp()}, {"config", cfg}, {"train_rows", data.rows}};

  // Grid reconstruction and the score identity (two-dimensional data only).
  if (d == 2) {
    const auto g = cfg["grid"].get<std::size_t>();
    const auto steps = cfg["grid_steps"].get<std::size_t>();
    const SwissRollCurve curve;
    std::ofstream traj(dir / "trajectories.jsonl");
    double before = 0.0;
    double after = 0.0;
    std::size_t exact = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t j = 0; j < g; ++j) {
        const double x0[2] = {-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(g - 1, 1)),
                              -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(std::max<std::size_t>(g - 1, 1))};
        const auto path = denoise_steps(net, x0, steps, dc);
        json p = json::array();
        for (const auto& v : path) p.push_back(vec_json(v));
        traj << json{{"start", {x0[0], x0[1]}}, {"path", p}}.dump() << "\n";
        before += curve.distance(x0);
        after += curve.distance(std::span<const double>(path.back().data(), 2));

        const Vector mu = denoised_mean(net, x0, dc);
        const Vector back = score_field(net, x0, dc) * dc.lambda + Eigen::Map<const Vector>(x0, 2);
        if ((back.array() == mu.array()).all()) ++exact;
        worst = std::max(worst, (back - mu).cwiseAbs().maxCoeff());
      }
    }
    const double n = static_cast<double>(g * g);
    metrics["grid"] = {{"points", g * g},
                       {"steps", steps},
                       {"mean_distance_initial", before / n},
                       {"mean_distance_final", after / n},
                       {"reduction", after > 0.0 ? before / after : std::numeric_limits<double>::infinity()}};
    metrics["score_identity"] = {{"points", g * g}, {"bit_exact", exact}, {"max_abs_error", worst}};
    std::cerr << "denoise: grid distance " << before / n << " -> " << after / n << "\n";
  }

  // HMC chains on the learned score field.
  const auto chains = cfg["hmc_chains"].get<std::size_t>();
  std::vector<std::vector<Vector>> samples(chains);
  const ScoreFn score = [&](const Vector& x) { return score_field(net, std::span<const double>(x.data(), x.size()), dc); };
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t c = 0; c < chains; ++c) {
    try {
      std::seed_seq ss{seed, static_cast<std::uint64_t>(c)};
      Rng crng(ss);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      Vector x0(static_cast<Eigen::Index>(d));
      for (auto& v : x0) v = u(crng);
      samples[c] = hmc_sample(score, x0, hc, crng);
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();
  std::ofstream out(dir / "samples.jsonl");
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(d));
  std::size_t count = 0;
  for (std::size_t c = 0; c < chains; ++c) {
    for (std::size_t s = 0; s < samples[c].size(); ++s) {
      out << json{{"chain", c}, {"step", s + 1}, {"x", vec_json(samples[c][s])}}.dump() << "\n";
      mean += samples[c][s];
      ++count;
    }
  }
  if (count) mean /= static_cast<double>(count);
  metrics["hmc"] = {{"chains", chains}, {"samples", count}, {"mean", vec_json(mean)}};
  write_json(metrics, (dir / "metrics.json").string());
  return 0;
}

// ---------------------------------------------------------------------------
// props

int cmd_props(const json& cfg) {
  auto names = cfg["suites"].get<std::vector<std::string>>();
  if (names.empty()) names = checks::suite_names();
  const auto seed = cfg["seed"].get<std::uint64_t>();
  json report = json::array();
  bool ok = true;
  for (const auto& name : names) {
    checks::CheckResult r;
    try {
      r = checks::run_suite(name, seed);
    } catch (const std::invalid_argument& e) {
      throw cli::ConfigError(std::string("suites: ") + e.what());
    }
    ok &= r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " [" << std::fixed
              << std::setprecision(2) << r.seconds << "s]" << std::defaultfloat << std::setprecision(6) << "\n";
    report.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  if (const auto path = cfg["output"].get<std::string>(); !path.empty()) {
    write_json({{"command", "props"}, {"timestamp", timestamp()}, {"config", cfg}, {"suites", report}}, path);
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  bool emit = false;
  int jobs = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--set", c.sets, "Override a config key, e.g. --set network.learning_rate=0.01");
  app->add_flag("--emit-config", c.emit, "Print the resolved config and exit");
  app->add_option("-j,--jobs", c.jobs, "Worker threads across seeds / configs / chains")->check(CLI::PositiveNumber);
}

json resolve(const std::string& command, const Common& c, const std::vector<std::string>& flag_sets) {
  json cfg = cli::default_config(command);
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    json file = json::parse(in, nullptr, false);
    if (file.is_discarded()) throw cli::ConfigError(c.config_path + ": not valid JSON");
    cli::merge_checked(cfg, file);
  }
  for (const auto& s : flag_sets) cli::apply_override(cfg, s);
  for (const auto& s : c.sets) cli::apply_override(cfg, s);
  return cfg;
}

json seed_list(std::size_t n) {
  json a = json::array();
  for (std::size_t i = 0; i < n; ++i) a.push_back(i);
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian gated linear networks"};
  app.require_subcommand(1);

  std::map<std::string, Common> common;
  std::vector<std::string> flag_sets;
  auto set_from = [&](const std::string& key) {
    return [&flag_sets, key](const std::string& v) { flag_sets.push_back(key + "=" + v); };
  };

  auto* regress = app.add_subcommand("regress", "Tabular regression benchmark");
  add_common(regress, common["regress"]);
  regress->add_option_function<std::string>("--dataset", set_from("dataset"),
                                             "boston, energy, wine, csv, synthetic_linear, heteroskedastic");
  regress->add_option_function<std::string>("--data-path", set_from("data_path"), "CSV file");
  regress->add_option_function<std::string>("--output", set_from("output"), "Metrics file, '-' for stdout");
  regress->add_option_function<std::size_t>(
      "--epochs", [&](std::size_t v) { flag_sets.push_back("epochs=" + std::to_string(v)); }, "Training epochs");
  regress->add_option_function<std::size_t>(
      "--seeds", [&](std::size_t n) { flag_sets.push_back("seeds=" + seed_list(n).dump()); }, "Use seeds 0..n-1");
  regress->add_flag_callback(
      "--sweep",
      [&] {
        flag_sets.push_back("sweep_learning_rates=[0.001,0.003,0.01]");
        flag_sets.push_back("sweep_context_dims=[4,6,8,10]");
      },
      "Sweep learning rate x context dimension (12 configs)");

  auto* bandit = app.add_subcommand("bandit", "Contextual bandit simulation with GLCB");
  add_common(bandit, common["bandit"]);
  bandit->add_option_function<std::string>("--env", set_from("env"), "wheel or linear");
  bandit->add_option_function<std::size_t>(
      "--horizon", [&](std::size_t v) { flag_sets.push_back("horizon=" + std::to_string(v)); }, "Steps per run");
  bandit->add_option_function<std::size_t>(
      "--seeds", [&](std::size_t n) { flag_sets.push_back("seeds=" + seed_list(n).dump()); }, "Use seeds 0..n-1");
  bandit->add_option_function<double>(
      "--bonus", [&](double v) { flag_sets.push_back("bonus=" + json(v).dump()); }, "UCB bonus c");
  bandit->add_option_function<std::string>("--output-dir", set_from("output_dir"), "Trace directory");

  auto* denoise = app.add_subcommand("denoise", "Denoising, score field and HMC sampling");
  add_common(denoise, common["denoise"]);
  denoise->add_option_function<std::size_t>(
      "--seed", [&](std::size_t v) { flag_sets.push_back("seed=" + std::to_string(v)); }, "Run seed");
  denoise->add_option_function<std::size_t>(
      "--samples", [&](std::size_t v) { flag_sets.push_back("samples=" + std::to_string(v)); }, "Training rows");
  denoise->add_option_function<std::string>("--output-dir", set_from("output_dir"), "Output directory");
  denoise->add_option_function<std::string>("--snapshot", set_from("snapshot"), "Save the trained network here");

  auto* props = app.add_subcommand("props", "Run the property suites");
  add_common(props, common["props"]);
  props->add_option_function<std::size_t>(
      "--seed", [&](std::size_t v) { flag_sets.push_back("seed=" + std::to_string(v)); }, "Base seed");
  props->add_option_function<std::vector<std::string>>(
      "--suite", [&](const std::vector<std::string>& v) { flag_sets.push_back("suites=" + json(v).dump()); },
      "Suites to run (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const Common& c = common[command];
  json cfg;
  try {
    cfg = resolve(command, c, flag_sets);
    if (c.emit) {
      std::cout << cfg.dump(2) << "\n";
      return 0;
    }
    if (command == "regress") return cmd_regress(cfg, c.jobs);
    if (command == "bandit") return cmd_bandit(cfg, c.jobs);
    if (command == "denoise") return cmd_denoise(cfg, c.jobs);
    return cmd_props(cfg);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
