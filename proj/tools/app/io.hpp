#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scc/composition.hpp"
#include "scc/posterior_summary.hpp"
#include "scc/sampler.hpp"
#include "scc/simulation.hpp"
#include "scc/spatial_graph.hpp"

namespace scc::app {

namespace fs = std::filesystem;

/// Shortest text that parses back to the same double (at most 17 digits).
std::string format_double(double v);

/// Header `id,y,comp_1..comp_K,cov_1..cov_p`.
CompositionalDataset read_dataset_csv(const fs::path& path);
void write_dataset_csv(const fs::path& path, const CompositionalDataset& data);

/// Header `src,dst`.
std::vector<Edge> read_edge_list_csv(const fs::path& path);
void write_edge_list_csv(const fs::path& path, std::span<const Edge> edges);

/// Header `id,cluster` with 1-based cluster labels.
NamedPartition read_partition_csv(const fs::path& path);
void write_partition_csv(const fs::path& path, std::span<const std::string> ids, std::span<const Label> labels);

/// Rows of `graph` reordered to match `ids`. Throws InputError listing the
/// identifiers present on one side only.
SpatialGraph align_graph(const SpatialGraph& graph, const std::vector<std::string>& ids);

/// One JSON object per post-burn-in draw: iteration, z (1-based), beta,
/// sigma2, eta, loglik.
void write_trace_jsonl(const fs::path& path, const ChainTrace& trace);
/// Snapshots and loglik of a trace file; the config is not stored.
ChainTrace read_trace_jsonl(const fs::path& path);

struct FitReport {
  std::vector<std::string> ids;
  double lambda = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> lpml_grid;
  PosteriorSummary summary;
};

nlohmann::json to_json(const FitReport& report);
FitReport fit_report_from_json(const nlohmann::json& j);

struct Truth {
  std::vector<std::string> ids;
  std::vector<Label> labels;  // 0-based
  Matrix beta_tilde;          // locations x K
  Vector eta;
};

nlohmann::json to_json(const Truth& truth);
Truth truth_from_json(const nlohmann::json& j);

/// Pretty-printed JSON followed by a newline.
void write_json_file(const fs::path& path, const nlohmann::json& j);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace scc::app
