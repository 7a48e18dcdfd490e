#include "scc/spatial_graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace scc {
namespace {

std::unordered_map<std::string, std::size_t> build_index(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], i).second) {
      throw InputError("graph: duplicate vertex identifier '" + labels[i] + "'");
    }
  }
  return index;
}

}  // namespace

SpatialGraph SpatialGraph::from_edge_list(std::span<const Edge> edges, std::vector<std::string> vertices) {
  SpatialGraph g;
  g.index_ = build_index(vertices);
  g.labels_ = std::move(vertices);
  g.neighbors_.resize(g.labels_.size());

  std::vector<std::string> unknown;
  for (const auto& [src, dst] : edges) {
    const auto a = g.index_of(src);
    const auto b = g.index_of(dst);
    if (!a) unknown.push_back(src);
    if (!b) unknown.push_back(dst);
    if (!a || !b || *a == *b) continue;
    g.neighbors_[*a].push_back(*b);
    g.neighbors_[*b].push_back(*a);
  }
  if (!unknown.empty()) {
    std::sort(unknown.begin(), unknown.end());
    unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
    std::ostringstream msg;
    msg << "graph: edge endpoints not among the vertices:";
    for (const auto& id : unknown) msg << ' ' << id;
    throw InputError(msg.str());
  }
  for (auto& nb : g.neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

SpatialGraph SpatialGraph::from_neighbor_lists(std::vector<std::string> vertices,
                                               std::vector<std::vector<std::size_t>> neighbors) {
  if (neighbors.size() != vertices.size()) throw std::invalid_argument("graph: neighbor list count mismatch");
  SpatialGraph g;
  g.index_ = build_index(vertices);
  g.labels_ = std::move(vertices);
  g.neighbors_ = std::move(neighbors);
  for (std::size_t i = 0; i < g.neighbors_.size(); ++i) {
    auto& nb = g.neighbors_[i];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (std::size_t j : nb) {
      if (j >= g.size() || j == i) throw std::invalid_argument("graph: invalid neighbor index");
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j : g.neighbors_[i]) {
      if (!g.adjacent(j, i)) throw std::invalid_argument("graph: neighbor lists are not symmetric");
    }
  }
  return g;
}

std::optional<std::size_t> SpatialGraph::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool SpatialGraph::adjacent(std::size_t i, std::size_t j) const {
  const auto& nb = neighbors_.at(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::size_t SpatialGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nb : neighbors_) twice += nb.size();
  return twice / 2;
}

std::vector<Edge> SpatialGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j : neighbors_[i]) {
      if (i < j) out.emplace_back(labels_[i], labels_[j]);
    }
  }
  return out;
}

SpatialGraph expand_neighbors(const SpatialGraph& g, int d_max) {
  if (d_max < 1) throw std::invalid_argument("expand_neighbors: d_max must be >= 1");
  const std::size_t n = g.size();
  std::vector<std::vector<std::size_t>> expanded(n);
  std::vector<int> dist(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      if (dist[u] == d_max) continue;
      for (std::size_t v : g.neighbors(u)) {
        if (dist[v] >= 0) continue;
        dist[v] = dist[u] + 1;
        expanded[s].push_back(v);
        queue.push_back(v);
      }
    }
  }
  return SpatialGraph::from_neighbor_lists(g.labels(), std::move(expanded));
}

double mrf_log_weight(std::span<const Label> z, std::size_t i, Label candidate, const SpatialGraph& g,
                      double lambda) {
  if (z.size() != g.size()) throw std::invalid_argument("mrf_log_weight: label count differs from vertex count");
  if (i >= g.size()) throw std::out_of_range("mrf_log_weight: vertex index out of range");
  if (lambda == 0.0) return 0.0;
  int matches = 0;
  for (std::size_t l : g.neighbors(i)) matches += (z[l] == candidate) ? 1 : 0;
  return lambda * matches;
}

std::vector<std::vector<std::size_t>> connected_components(const SpatialGraph& g,
                                                           std::span<const std::size_t> members) {
  std::vector<char> in_set(g.size(), 0);
  for (std::size_t m : members) in_set.at(m) = 1;
  std::vector<char> seen(g.size(), 0);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t start : members) {
    if (seen[start]) continue;
    std::vector<std::size_t> comp;
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (std::size_t v : g.neighbors(u)) {
        if (in_set[v] && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

}  // namespace scc
