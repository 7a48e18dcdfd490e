#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "io.hpp"

namespace scc::app {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Replicate directories (`replicate_001`, ...) directly under `dir`, sorted.
std::vector<fs::path> replicate_dirs(const fs::path& dir);
std::string replicate_name(int index);

/// Fits every lambda in the grid for one data CSV, or for every replicate of
/// a simulate output directory, and writes the results under `out`.
void cmd_fit(const RunConfig& config, const fs::path& out);

void cmd_simulate(const SimulateConfig& config, const fs::path& out, int threads);

struct ReplicateMetrics {
  std::string name;
  double rand_index = 0.0;
  std::size_t k_hat = 0;
  double lambda = 0.0;
};

struct EvaluationReport {
  std::vector<ReplicateMetrics> replicates;
  double median_rand_index = 0.0;
  std::map<std::size_t, int> k_hat_histogram;
  EstimationMetrics beta_tilde;
  EstimationMetrics eta;
};

EvaluationReport evaluate(const EvaluateConfig& config);
nlohmann::json to_json(const EvaluationReport& report);
void cmd_evaluate(const EvaluateConfig& config, const fs::path& out);

/// Parses arguments, runs the subcommand and maps failures to exit codes.
/// Numerical failures also leave `diagnostics.json` in the output directory.
int run_cli(int argc, char** argv);

}  // namespace scc::app
