#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scc/types.hpp"

namespace scc {

using Edge = std::pair<std::string, std::string>;

/// Undirected, unweighted, irreflexive graph over opaque vertex identifiers.
/// Vertex indices follow the order of the `vertices` argument at construction.
class SpatialGraph {
 public:
  SpatialGraph() = default;

  /// Self-loops and duplicate edges are dropped. Throws InputError for an
  /// endpoint not present in `vertices` or for a repeated vertex identifier.
  static SpatialGraph from_edge_list(std::span<const Edge> edges, std::vector<std::string> vertices);

  /// Graph with the given (sorted, symmetric) neighbor lists.
  static SpatialGraph from_neighbor_lists(std::vector<std::string> vertices,
                                          std::vector<std::vector<std::size_t>> neighbors);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const std::size_t> neighbors(std::size_t i) const { return neighbors_.at(i); }
  std::optional<std::size_t> index_of(std::string_view id) const;
  bool adjacent(std::size_t i, std::size_t j) const;
  std::size_t edge_count() const;
  std::vector<Edge> edges() const;

  friend bool operator==(const SpatialGraph&, const SpatialGraph&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Connects every pair at shortest-path distance <= d_max in `g`.
SpatialGraph expand_neighbors(const SpatialGraph& g, int d_max);

/// lambda * #{l in neighbors(i) : z[l] == candidate}.
double mrf_log_weight(std::span<const Label> z, std::size_t i, Label candidate, const SpatialGraph& g,
                      double lambda);

/// Connected components of the subgraph induced by `members`.
std::vector<std::vector<std::size_t>> connected_components(const SpatialGraph& g,
                                                           std::span<const std::size_t> members);

}  // namespace scc
