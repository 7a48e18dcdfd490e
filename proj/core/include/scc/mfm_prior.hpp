#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "scc/spatial_graph.hpp"
#include "scc/types.hpp"

namespace scc {

/// Mixture-of-finite-mixtures hyperparameters: K - 1 ~ Poisson(zeta),
/// weights ~ Dirichlet(gamma, ..., gamma), n observations.
struct MfmHyper {
  double gamma = 1.0;
  double zeta = 1.0;
  std::size_t n = 1;

  void validate() const;
};

/// Cached log V_n(w) for w = 0 .. n+1, where
///
///   V_n(w) = sum_{k >= 1} k_(w) / (gamma k)^(n) * p(k),
///
/// k_(w) is the falling factorial (zero for k < w), (x)^(n) the rising
/// factorial and p the Poisson(zeta) pmf shifted to k >= 1. The series is
/// accumulated in log space and stops once five consecutive terms each fall
/// below `tol` relative to the running sum.
class VnTable {
 public:
  static VnTable build(const MfmHyper& hyper, double tol = 1e-12);

  double log_v(std::size_t w) const { return log_v_.at(w); }
  std::size_t n() const { return hyper_.n; }
  double tol() const { return tol_; }
  const MfmHyper& hyper() const { return hyper_; }

 private:
  MfmHyper hyper_;
  double tol_ = 0.0;
  std::vector<double> log_v_;
};

/// log of the exchangeable partition probability V_n(t) * prod_c gamma^(|c|).
/// Labels may be any nonnegative integers; only the induced partition matters.
double partition_log_prior(std::span<const Label> z, const MfmHyper& hyper, const VnTable& vn);

/// log(size + gamma) + lambda * matching_neighbors.
inline double existing_cluster_log_weight(std::size_t size, int matching_neighbors, double gamma,
                                          double lambda);

/// log gamma + log V_n(k_star + 1) - log V_n(k_star).
double new_cluster_log_weight(std::size_t k_star, double gamma, const VnTable& vn);

/// Unnormalized reassignment weights for observation i.
struct UrnWeights {
  std::vector<Label> labels;    // distinct existing labels, ascending
  std::vector<double> existing; // one log weight per entry of `labels`
  double new_cluster = 0.0;     // log weight of opening a new cluster
};

/// Urn-scheme weights for placing observation i given the other labels.
/// Entries of z_minus equal to kUnassigned, and z_minus[i] itself, are
/// ignored.
UrnWeights urn_log_weights(std::size_t i, std::span<const Label> z_minus, const SpatialGraph& g,
                           double lambda, const MfmHyper& hyper, const VnTable& vn);

inline double existing_cluster_log_weight(std::size_t size, int matching_neighbors, double gamma,
                                          double lambda) {
  return std::log(static_cast<double>(size) + gamma) + lambda * matching_neighbors;
}

}  // namespace scc
