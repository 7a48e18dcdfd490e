#include "scc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fixtures.hpp"
#include "scc/csv.hpp"

namespace scc {
namespace {

NamedPartition parse_partition(const char* text, std::string name) {
  const CsvTable table = parse_csv(text, "builtin partition '" + name + "'");
  const std::size_t id_col = table.column("id");
  const std::size_t cluster_col = table.column("cluster");
  NamedPartition p;
  p.name = std::move(name);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    p.ids.push_back(table.rows[r][id_col]);
    p.labels.push_back(static_cast<Label>(table.number(r, cluster_col)) - 1);
  }
  return p;
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

Vector sample_dirichlet(const Vector& alpha, Rng& rng) {
  if (alpha.size() < 1 || !(alpha.minCoeff() > 0.0)) {
    throw std::invalid_argument("Dirichlet concentrations must be positive");
  }
  Vector g(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) g(k) = rng.gamma(alpha(k));
  const double total = g.sum();
  if (!(total > 0.0)) throw NumericalError("Dirichlet draw underflowed to zero");
  return g / total;
}

std::size_t NamedPartition::cluster_count() const {
  return std::set<Label>(labels.begin(), labels.end()).size();
}

SpatialGraph us_state_graph() {
  const CsvTable edges_csv = parse_csv(fixtures::kStatesAdjacencyCsv, "builtin state adjacency");
  const std::size_t src = edges_csv.column("src");
  const std::size_t dst = edges_csv.column("dst");
  std::vector<Edge> edges;
  std::set<std::string> ids;
  for (const auto& row : edges_csv.rows) {
    edges.emplace_back(row[src], row[dst]);
    ids.insert(row[src]);
    ids.insert(row[dst]);
  }
  return SpatialGraph::from_edge_list(edges, std::vector<std::string>(ids.begin(), ids.end()));
}

std::vector<NamedPartition> builtin_partitions() {
  return {parse_partition(fixtures::kPartitionDisjointCsv, "disjoint"),
          parse_partition(fixtures::kPartitionContiguousCsv, "contiguous")};
}

NamedPartition builtin_partition(std::string_view name) {
  for (auto& p : builtin_partitions()) {
    if (p.name == name) return p;
  }
  throw InputError("unknown built-in partition '" + std::string(name) + "' (expected disjoint or contiguous)");
}

void SimulationDesign::validate() const {
  auto fail = [this](const std::string& field, const std::string& what) {
    throw InputError("simulation design '" + name + "': " + field + ": " + what);
  };
  if (ids.empty()) fail("partition", "no locations");
  if (ids.size() != partition.size()) fail("partition", "id count differs from label count");
  if (dirichlet_alpha.size() < 2) fail("dirichlet_alpha", "need at least 2 parts");
  if (!(dirichlet_alpha.minCoeff() > 0.0)) fail("dirichlet_alpha", "entries must be positive");
  if (beta_tilde_per_cluster.empty()) fail("beta_tilde", "no clusters");
  for (std::size_t c = 0; c < beta_tilde_per_cluster.size(); ++c) {
    const Vector& b = beta_tilde_per_cluster[c];
    const std::string field = "beta_tilde[" + std::to_string(c + 1) + "]";
    if (b.size() != dirichlet_alpha.size()) fail(field, "length differs from dirichlet_alpha");
    if (std::abs(b.sum()) > 1e-10) fail(field, "entries must sum to zero");
  }
  for (Label l : partition) {
    if (l < 0 || static_cast<std::size_t>(l) >= beta_tilde_per_cluster.size()) {
      fail("partition", "cluster label " + std::to_string(l + 1) + " has no coefficient vector");
    }
  }
  if (!(x2_high > x2_low)) fail("x2_range", "upper bound must exceed lower bound");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) fail("noise_sd", "must be finite and >= 0");
  if (replicates < 1) fail("replicates", "must be at least 1");
}

SimulationDesign builtin_design(std::string_view setting, const NamedPartition& partition) {
  SimulationDesign d;
  d.name = std::string(setting);
  d.ids = partition.ids;
  d.partition = partition.labels;
  d.eta = vec({1, 2, 1});
  d.noise_sd = 1.0;
  if (setting == "setting1") {
    d.beta_tilde_per_cluster = {vec({1, -2, 1}), vec({-4, -3, 7}), vec({10, -9, -1})};
    d.dirichlet_alpha = vec({1, 3, 6});
    d.x2_low = -1.0;
    d.x2_high = 1.0;
  } else if (setting == "setting2") {
    d.beta_tilde_per_cluster = {vec({1, 1, 1, 1, 1, -1, -1, -1, -1, -1}),
                                vec({-2, 5, -3, -2, 5, -3, -3, 6, -1, -2}),
                                vec({3, -3, -2, 8, -4, -2, 8, -2, -4, -2})};
    d.dirichlet_alpha = vec({1, 4, 5, 3, 8, 7, 1, 3, 2, 6});
    d.x2_low = -10.0;
    d.x2_high = 10.0;
  } else {
    throw InputError("unknown built-in setting '" + std::string(setting) + "' (expected setting1 or setting2)");
  }
  return d;
}

SimulatedDataset generate_dataset(const SimulationDesign& design, int replicate_index) {
  design.validate();
  const auto n = static_cast<Eigen::Index>(design.ids.size());
  const Eigen::Index parts = design.dirichlet_alpha.size();
  const Eigen::Index p = design.eta.size();
  Rng rng(derive_seed(design.seed, static_cast<std::uint64_t>(replicate_index)));

  Matrix comp(n, parts);
  Matrix x2(n, p);
  Vector noise(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    comp.row(i) = sample_dirichlet(design.dirichlet_alpha, rng).transpose();
    for (Eigen::Index j = 0; j < p; ++j) x2(i, j) = design.x2_low + (design.x2_high - design.x2_low) * rng.uniform();
    noise(i) = rng.normal();
  }

  CompositionMatrix composition = CompositionMatrix::from_proportions(comp);
  const Matrix z = log_transform(composition);

  SimulatedDataset out{
      CompositionalDataset{design.ids, Vector(n), std::move(composition), std::move(x2)},
      design.partition, Matrix(n, parts), design.eta};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector& beta = design.beta_tilde_per_cluster[design.partition[i]];
    out.beta_tilde.row(i) = beta.transpose();
    const double mean = z.row(i).dot(beta) + (p > 0 ? out.data.covariates.row(i).dot(design.eta) : 0.0);
    out.data.y(i) = mean + design.noise_sd * noise(i);
  }
  return out;
}

}  // namespace scc
