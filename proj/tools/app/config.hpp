#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scc/sampler.hpp"
#include "scc/simulation.hpp"

namespace scc::app {

namespace fs = std::filesystem;

/// Chain-length presets: "simulation" (1500 sweeps, 500 burn-in) and
/// "application" (1000 sweeps, 500 burn-in).
struct ChainProfile {
  std::string name;
  int iterations = 0;
  int burn_in = 0;
};
ChainProfile chain_profile(const std::string& name);

/// Hyperparameter overrides; unset entries take the design-dependent defaults.
struct HyperOverrides {
  std::optional<double> gamma, zeta, a0, b0;
  std::optional<Vector> tau0;
  std::optional<Matrix> sigma0;
  std::optional<Vector> eta0;
  std::optional<Matrix> v0;
};

struct RunConfig {
  fs::path data;                    // data CSV, or a simulate output directory
  std::optional<fs::path> adjacency;// edge list; bundled state graph when absent
  int graph_distance = 1;
  std::vector<double> lambda_grid;
  std::string profile = "simulation";
  int iterations = 1500;
  int burn_in = 500;
  std::uint64_t seed = 1;
  int threads = 1;
  double zero_pseudocount = kDefaultZeroPseudocount;
  bool unweighted_eta = false;
  bool write_traces = true;
  HyperOverrides hyper;

  void validate() const;
  /// FitConfig with the hyperparameter overrides applied (lambda left at 0).
  FitConfig fit_config() const;
};

/// Reads a fit configuration. Relative paths are resolved against the
/// directory holding the config file.
RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base_dir);
/// Resolved configuration echo, every default spelled out.
nlohmann::json to_json(const RunConfig& cfg, const FitConfig& resolved);

struct SimulateConfig {
  SimulationDesign design;
  std::string partition_source;  // built-in name or path
  std::optional<fs::path> adjacency;
};

SimulateConfig parse_simulate_config(const nlohmann::json& j, const fs::path& base_dir);
nlohmann::json to_json(const SimulationDesign& design);

struct EvaluateConfig {
  fs::path fits;
  fs::path truth;
};

EvaluateConfig parse_evaluate_config(const nlohmann::json& j, const fs::path& base_dir);

nlohmann::json read_json_file(const fs::path& path);

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
Vector vector_from_json(const nlohmann::json& j, const std::string& field);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& field);

}  // namespace scc::app
