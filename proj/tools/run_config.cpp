#include "run_config.hpp"

namespace ggln::cli {
namespace {

json network_section(std::vector<std::size_t> layers, std::size_t s, double lr, double bias_scale,
                     const std::string& aggregation) {
  json c;
  c["w_max"] = 100.0;
  c["w_min"] = 0.0;
  c["sigma2_min"] = 1e-3;
  c["sigma2_max"] = 1e3;
  c["mu_min"] = nullptr;
  c["mu_max"] = nullptr;
  c["xi"] = 1e-4;
  c["use_barrier"] = true;
  c["barrier_margin"] = 1e-2;

  json n;
  n["layers"] = layers;
  n["context_dim"] = s;
  n["learning_rate"] = lr;
  n["context_bias_scale"] = bias_scale;
  n["bias_r"] = 5.0;
  n["sigma2_bias"] = 1.0;
  n["aggregation"] = aggregation;
  n["constraints"] = c;
  return n;
}

std::string type_name(const json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

void check_scalar(const json& slot, const json& v, const std::string& where) {
  const bool ok = [&] {
    if (slot.is_null()) return v.is_null() || v.is_number();
    if (slot.is_number_unsigned()) return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    if (slot.is_number_integer()) return v.is_number_integer();
    if (slot.is_number_float()) return v.is_number();
    if (slot.is_boolean()) return v.is_boolean();
    if (slot.is_string()) return v.is_string();
    return false;
  }();
  if (!ok) {
    const std::string want = slot.is_null() ? "number or null"
                             : slot.is_number_unsigned() ? "non-negative integer"
                                                         : type_name(slot);
    throw ConfigError(where + ": expected " + want + ", got " + type_name(v));
  }
}

}  // namespace

json default_config(const std::string& command) {
  json cfg;
  if (command == "regress") {
    cfg["dataset"] = "boston";
    cfg["data_path"] = "";
    cfg["target"] = "";
    cfg["synthetic_rows"] = 2000u;
    cfg["synthetic_features"] = 4u;
    cfg["synthetic_noise"] = 0.5;
    cfg["seeds"] = json::array({0u, 1u, 2u, 3u, 4u});
    cfg["epochs"] = 40u;
    cfg["base"] = "feature";
    cfg["sigma_fixed"] = 1.0;
    cfg["blr_tau"] = 1.0;
    cfg["blr_tau0"] = 1.0;
    cfg["train_fraction"] = 0.9;
    cfg["scale"] = "zscore";
    cfg["sweep_learning_rates"] = json::array();
    cfg["sweep_context_dims"] = json::array();
    cfg["network"] = network_section(std::vector<std::size_t>(12, 256), 4, 3e-3, 0.05, "switching");
    cfg["output"] = "regress_metrics.json";
  } else if (command == "bandit") {
    cfg["env"] = "wheel";
    cfg["delta"] = 0.5;
    cfg["mean_safe"] = 1.2;
    cfg["mean_base"] = 1.0;
    cfg["mean_high"] = 50.0;
    cfg["noise"] = 0.01;
    cfg["linear_actions"] = 4u;
    cfg["linear_context_dim"] = 4u;
    cfg["linear_noise"] = 0.1;
    cfg["horizon"] = 2000u;
    cfg["seeds"] = json::array({0u});
    cfg["bonus"] = 1.0;
    cfg["reward_scale"] = 0.02;
    cfg["sigma_fixed"] = 1.0;
    cfg["network"] = network_section({1000, 100, 1}, 1, 3e-3, 0.05, "top_neuron");
    cfg["output_dir"] = "bandit_out";
  } else if (command == "denoise") {
    cfg["dataset"] = "swiss_roll";
    cfg["data_path"] = "";
    cfg["samples"] = 5000u;
    cfg["data_noise"] = 0.0;
    cfg["seed"] = 0u;
    cfg["lambda"] = 0.01;
    cfg["step"] = 0.002;
    cfg["sigma2_base"] = 3.0;
    cfg["fixed_noise"] = false;
    cfg["epochs"] = 1u;
    cfg["grid"] = 20u;
    cfg["grid_steps"] = 24u;
    cfg["hmc_chains"] = 1u;
    cfg["hmc_steps"] = 15000u;
    cfg["hmc_substeps"] = 150u;
    cfg["hmc_epsilon"] = 0.003;
    cfg["hmc_mass"] = 1.0;
    json net = network_section({64, 64, 1}, 8, 0.01, 0.5, "top_neuron");
    net["constraints"]["use_barrier"] = false;
    net["constraints"]["w_max"] = 1000.0;
    net["constraints"]["sigma2_min"] = 1e-4;
    cfg["network"] = net;
    cfg["snapshot"] = "";
    cfg["output_dir"] = "denoise_out";
  } else if (command == "props") {
    cfg["seed"] = 42u;
    cfg["suites"] = json::array();
    cfg["output"] = "";
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return cfg;
}

void merge_checked(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected object");
  for (const auto& [key, v] : patch.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ConfigError(where + ": unknown key");
    json& slot = base[key];
    if (slot.is_object()) {
      merge_checked(slot, v, where);
    } else if (slot.is_array()) {
      if (!v.is_array()) throw ConfigError(where + ": expected array, got " + type_name(v));
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (slot.empty()) {
          if (!v[i].is_number() && !v[i].is_string()) throw ConfigError(at + ": expected number or string");
        } else {
          check_scalar(slot.front(), v[i], at);
        }
      }
      slot = v;
    } else {
      check_scalar(slot, v, where);
      slot = v;
    }
  }
}

void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment + ": expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json patch = value;
  std::string rest = key;
  std::vector<std::string> parts;
  for (std::size_t dot; (dot = rest.find('.')) != std::string::npos; rest = rest.substr(dot + 1)) {
    parts.push_back(rest.substr(0, dot));
  }
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  merge_checked(cfg, patch);
}

NetworkConfig network_from_json(const json& net) {
  NetworkConfig cfg;
  cfg.layer_sizes = net.at("layers").get<std::vector<std::size_t>>();
  cfg.context_dim = net.at("context_dim").get<std::size_t>();
  cfg.learning_rate = net.at("learning_rate").get<double>();
  cfg.context_bias_scale = net.at("context_bias_scale").get<double>();
  cfg.bias_r = net.at("bias_r").get<double>();
  cfg.sigma2_bias = net.at("sigma2_bias").get<double>();
  cfg.aggregation = aggregation_from_string(net.at("aggregation").get<std::string>());
  const json& c = net.at("constraints");
  ConstraintSet& cs = cfg.constraints;
  cs.w_max = c.at("w_max").get<double>();
  cs.w_min = c.at("w_min").get<double>();
  cs.sigma2_min = c.at("sigma2_min").get<double>();
  cs.sigma2_max = c.at("sigma2_max").get<double>();
  if (!c.at("mu_min").is_null()) cs.mu_min = c.at("mu_min").get<double>();
  if (!c.at("mu_max").is_null()) cs.mu_max = c.at("mu_max").get<double>();
  cs.xi = c.at("xi").get<double>();
  cs.use_barrier = c.at("use_barrier").get<bool>();
  cs.barrier_margin = c.at("barrier_margin").get<double>();
  return cfg;
}

}  // namespace ggln::cli
