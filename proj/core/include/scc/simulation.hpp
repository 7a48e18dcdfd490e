#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scc/composition.hpp"
#include "scc/rng.hpp"
#include "scc/spatial_graph.hpp"
#include "scc/types.hpp"

namespace scc {

/// Dirichlet(alpha) draw via normalized independent Gamma(alpha_k, 1)
/// variates, drawn in coordinate order.
Vector sample_dirichlet(const Vector& alpha, Rng& rng);

/// A ground-truth clustering of named locations (0-based labels).
struct NamedPartition {
  std::string name;
  std::vector<std::string> ids;
  std::vector<Label> labels;

  std::size_t cluster_count() const;
};

/// Contiguity graph of the 50 states plus DC bundled with the library.
/// Vertices are ordered by postal code.
SpatialGraph us_state_graph();

/// The two bundled 3-cluster partitions of the state graph: "disjoint" (one
/// cluster split into separate western and eastern parts) and "contiguous"
/// (every cluster connected).
std::vector<NamedPartition> builtin_partitions();
NamedPartition builtin_partition(std::string_view name);

struct SimulationDesign {
  std::string name;
  std::vector<std::string> ids;
  std::vector<Label> partition;
  std::vector<Vector> beta_tilde_per_cluster;
  Vector dirichlet_alpha;
  Vector eta;
  double x2_low = -1.0;
  double x2_high = 1.0;
  double noise_sd = 1.0;
  int replicates = 1;
  std::uint64_t seed = 0;

  /// Throws InputError with a field-level message.
  void validate() const;
};

/// Built-in parameter settings "setting1" (K = 3, Dir(1, 3, 6), X2 ~ U(-1, 1))
/// and "setting2" (K = 10, X2 ~ U(-10, 10)); both use eta = (1, 2, 1) and
/// unit-variance noise.
SimulationDesign builtin_design(std::string_view setting, const NamedPartition& partition);

struct SimulatedDataset {
  CompositionalDataset data;
  std::vector<Label> truth;
  Matrix beta_tilde;  // locations x K, row i is the true coefficient of location i
  Vector eta;
};

/// Seeded by derive_seed(design.seed, replicate_index). Per location, in
/// order: K gamma draws (composition), p uniforms (covariates), one normal
/// (noise).
SimulatedDataset generate_dataset(const SimulationDesign& design, int replicate_index);

}  // namespace scc
