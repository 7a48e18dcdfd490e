#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "io.hpp"
#include "scc/pipeline.hpp"
#include "scc/types.hpp"

namespace scc::app {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw InputError(what + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw InputError(what + ": unknown field '" + key + "'");
  }
}

template <typename T>
T get_field(const json& j, const std::string& field, const std::string& what) {
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw InputError(what + ": field '" + field + "': " + e.what());
  }
}

template <typename T>
std::optional<T> optional_field(const json& j, const std::string& field, const std::string& what) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  return get_field<T>(j, field, what);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

Vector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw InputError(field + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(field + ": entry " + std::to_string(i) + " is not a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError(field + ": expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector_from_json(j[r], field + "[" + std::to_string(r) + "]");
    if (static_cast<std::size_t>(row.size()) != cols) throw InputError(field + ": ragged rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

ChainProfile chain_profile(const std::string& name) {
  if (name == "simulation") return {name, 1500, 500};
  if (name == "application") return {name, 1000, 500};
  throw InputError("unknown profile '" + name + "' (expected simulation or application)");
}

void RunConfig::validate() const {
  if (data.empty()) throw InputError("fit config: field 'data' is required");
  if (graph_distance < 1) throw InputError("fit config: graph_distance must be >= 1");
  if (lambda_grid.empty()) throw InputError("fit config: lambda_grid must not be empty");
  for (double l : lambda_grid) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw InputError("fit config: lambda_grid values must be finite and >= 0");
  }
  if (iterations < 1) throw InputError("fit config: iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations) throw InputError("fit config: burn_in must satisfy 0 <= burn_in < iterations");
  if (threads < 1) throw InputError("fit config: threads must be >= 1");
  if (!(zero_pseudocount > 0.0)) throw InputError("fit config: zero_pseudocount must be positive");
}

FitConfig RunConfig::fit_config() const {
  FitConfig f;
  f.iterations = iterations;
  f.burn_in = burn_in;
  f.seed = seed;
  f.zero_pseudocount = zero_pseudocount;
  f.unweighted_eta = unweighted_eta;
  if (hyper.gamma) f.hyper.mfm.gamma = *hyper.gamma;
  if (hyper.zeta) f.hyper.mfm.zeta = *hyper.zeta;
  if (hyper.a0) f.hyper.nig.a0 = *hyper.a0;
  if (hyper.b0) f.hyper.nig.b0 = *hyper.b0;
  if (hyper.tau0) f.hyper.nig.tau0 = *hyper.tau0;
  if (hyper.sigma0) f.hyper.nig.sigma0 = *hyper.sigma0;
  if (hyper.eta0) f.hyper.eta.eta0 = *hyper.eta0;
  if (hyper.v0) f.hyper.eta.v0 = *hyper.v0;
  return f;
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  const std::string what = "fit config";
  reject_unknown_keys(j,
                      {"data", "adjacency", "graph_distance", "lambda_grid", "profile", "iterations", "burn_in",
                       "seed", "threads", "zero_pseudocount", "unweighted_eta", "write_traces", "hyper"},
                      what);
  RunConfig cfg;
  if (auto d = optional_field<std::string>(j, "data", what)) cfg.data = resolve(base_dir, *d);
  if (auto a = optional_field<std::string>(j, "adjacency", what)) cfg.adjacency = resolve(base_dir, *a);
  cfg.graph_distance = optional_field<int>(j, "graph_distance", what).value_or(1);
  cfg.lambda_grid = optional_field<std::vector<double>>(j, "lambda_grid", what).value_or(default_lambda_grid());
  cfg.profile = optional_field<std::string>(j, "profile", what).value_or("simulation");
  const ChainProfile profile = chain_profile(cfg.profile);
  cfg.iterations = optional_field<int>(j, "iterations", what).value_or(profile.iterations);
  cfg.burn_in = optional_field<int>(j, "burn_in", what).value_or(profile.burn_in);
  cfg.seed = optional_field<std::uint64_t>(j, "seed", what).value_or(1);
  cfg.threads = optional_field<int>(j, "threads", what).value_or(1);
  cfg.zero_pseudocount = optional_field<double>(j, "zero_pseudocount", what).value_or(kDefaultZeroPseudocount);
  cfg.unweighted_eta = optional_field<bool>(j, "unweighted_eta", what).value_or(false);
  cfg.write_traces = optional_field<bool>(j, "write_traces", what).value_or(true);

  if (j.contains("hyper")) {
    const json& h = j.at("hyper");
    const std::string hw = "fit config: hyper";
    reject_unknown_keys(h, {"gamma", "zeta", "a0", "b0", "tau0", "sigma0", "eta0", "v0"}, hw);
    cfg.hyper.gamma = optional_field<double>(h, "gamma", hw);
    cfg.hyper.zeta = optional_field<double>(h, "zeta", hw);
    cfg.hyper.a0 = optional_field<double>(h, "a0", hw);
    cfg.hyper.b0 = optional_field<double>(h, "b0", hw);
    if (h.contains("tau0")) cfg.hyper.tau0 = vector_from_json(h.at("tau0"), "hyper.tau0");
    if (h.contains("sigma0")) cfg.hyper.sigma0 = matrix_from_json(h.at("sigma0"), "hyper.sigma0");
    if (h.contains("eta0")) cfg.hyper.eta0 = vector_from_json(h.at("eta0"), "hyper.eta0");
    if (h.contains("v0")) cfg.hyper.v0 = matrix_from_json(h.at("v0"), "hyper.v0");
  }
  return cfg;
}

json to_json(const RunConfig& cfg, const FitConfig& resolved) {
  json j;
  j["data"] = cfg.data.string();
  j["adjacency"] = cfg.adjacency ? json(cfg.adjacency->string()) : json("builtin:us_states");
  j["graph_distance"] = cfg.graph_distance;
  j["lambda_grid"] = cfg.lambda_grid;
  j["profile"] = cfg.profile;
  j["iterations"] = resolved.iterations;
  j["burn_in"] = resolved.burn_in;
  j["seed"] = cfg.seed;
  j["zero_pseudocount"] = resolved.zero_pseudocount;
  j["unweighted_eta"] = resolved.unweighted_eta;
  j["write_traces"] = cfg.write_traces;
  j["hyper"] = {
      {"gamma", resolved.hyper.mfm.gamma},
      {"zeta", resolved.hyper.mfm.zeta},
      {"a0", resolved.hyper.nig.a0},
      {"b0", resolved.hyper.nig.b0},
      {"tau0", to_json(resolved.hyper.nig.tau0)},
      {"sigma0", to_json(resolved.hyper.nig.sigma0)},
      {"eta0", to_json(resolved.hyper.eta.eta0)},
      {"v0", to_json(resolved.hyper.eta.v0)},
  };
  return j;
}

SimulateConfig parse_simulate_config(const json& j, const fs::path& base_dir) {
  const std::string what = "simulate config";
  reject_unknown_keys(j,
                      {"setting", "partition", "adjacency", "replicates", "seed", "noise_sd", "x2_range", "eta",
                       "dirichlet_alpha", "beta_tilde"},
                      what);
  SimulateConfig cfg;
  cfg.partition_source = optional_field<std::string>(j, "partition", what).value_or("disjoint");
  if (auto a = optional_field<std::string>(j, "adjacency", what)) cfg.adjacency = resolve(base_dir, *a);

  NamedPartition partition;
  if (cfg.partition_source == "disjoint" || cfg.partition_source == "contiguous") {
    partition = builtin_partition(cfg.partition_source);
  } else {
    const fs::path path = resolve(base_dir, cfg.partition_source);
    cfg.partition_source = path.string();
    partition = read_partition_csv(path);
  }

  const auto setting = optional_field<std::string>(j, "setting", what);
  SimulationDesign& d = cfg.design;
  if (setting) {
    d = builtin_design(*setting, partition);
  } else {
    d.name = "custom";
    d.ids = partition.ids;
    d.partition = partition.labels;
    for (const char* required : {"beta_tilde", "dirichlet_alpha", "eta"}) {
      if (!j.contains(required)) throw InputError(what + ": field '" + std::string(required) + "' is required without 'setting'");
    }
  }
  if (j.contains("beta_tilde")) {
    const Matrix b = matrix_from_json(j.at("beta_tilde"), "beta_tilde");
    d.beta_tilde_per_cluster.clear();
    for (Eigen::Index r = 0; r < b.rows(); ++r) d.beta_tilde_per_cluster.emplace_back(b.row(r).transpose());
  }
  if (j.contains("dirichlet_alpha")) d.dirichlet_alpha = vector_from_json(j.at("dirichlet_alpha"), "dirichlet_alpha");
  if (j.contains("eta")) d.eta = vector_from_json(j.at("eta"), "eta");
  if (j.contains("x2_range")) {
    const Vector r = vector_from_json(j.at("x2_range"), "x2_range");
    if (r.size() != 2) throw InputError(what + ": field 'x2_range' must hold [low, high]");
    d.x2_low = r(0);
    d.x2_high = r(1);
  }
  if (auto s = optional_field<double>(j, "noise_sd", what)) d.noise_sd = *s;
  d.replicates = optional_field<int>(j, "replicates", what).value_or(1);
  d.seed = optional_field<std::uint64_t>(j, "seed", what).value_or(1);
  d.validate();
  return cfg;
}

json to_json(const SimulationDesign& d) {
  json clusters = json::array();
  for (const auto& b : d.beta_tilde_per_cluster) clusters.push_back(to_json(b));
  json partition = json::array();
  for (std::size_t i = 0; i < d.ids.size(); ++i) partition.push_back({{"id", d.ids[i]}, {"cluster", d.partition[i] + 1}});
  return {
      {"name", d.name},
      {"beta_tilde", clusters},
      {"dirichlet_alpha", to_json(d.dirichlet_alpha)},
      {"eta", to_json(d.eta)},
      {"x2_range", {d.x2_low, d.x2_high}},
      {"noise_sd", d.noise_sd},
      {"replicates", d.replicates},
      {"seed", d.seed},
      {"partition", partition},
  };
}

EvaluateConfig parse_evaluate_config(const json& j, const fs::path& base_dir) {
  const std::string what = "evaluate config";
  reject_unknown_keys(j, {"fits", "truth"}, what);
  EvaluateConfig cfg;
  if (auto f = optional_field<std::string>(j, "fits", what)) cfg.fits = resolve(base_dir, *f);
  if (auto t = optional_field<std::string>(j, "truth", what)) cfg.truth = resolve(base_dir, *t);
  return cfg;
}

}  // namespace scc::app
