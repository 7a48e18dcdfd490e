#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scc/composition.hpp"
#include "scc/mfm_prior.hpp"
#include "scc/rng.hpp"
#include "scc/spatial_graph.hpp"
#include "scc/types.hpp"

namespace scc {

/// Normal-inverse-gamma base measure for cluster parameters:
/// sigma2 ~ IG(a0, b0), beta | sigma2 ~ N(tau0, sigma2 * sigma0).
struct NigHyper {
  Vector tau0;
  Matrix sigma0;
  double a0 = 0.01;
  double b0 = 0.01;

  static NigHyper defaults(Eigen::Index dim);
  void validate() const;
};

/// eta ~ N(eta0, v0).
struct EtaPrior {
  Vector eta0;
  Matrix v0;

  static EtaPrior defaults(Eigen::Index p);
  void validate() const;
};

struct Hyperparameters {
  MfmHyper mfm;
  NigHyper nig;
  EtaPrior eta;
};

struct FitConfig {
  int iterations = 1500;
  int burn_in = 500;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  Hyperparameters hyper;
  double zero_pseudocount = kDefaultZeroPseudocount;
  double vn_tol = 1e-12;
  // Use the unweighted eta update (no 1/sigma2 scaling of each observation).
  bool unweighted_eta = false;

  void validate() const;
  /// Copy with empty hyperparameter blocks filled by the defaults for this
  /// design (tau0 = 0, sigma0 = I, eta0 = 0, v0 = 100 I) and mfm.n = rows.
  FitConfig resolved_for(const LogContrastDesign& design) const;
};

struct ClusterState {
  std::vector<Label> z;
  std::vector<Vector> betas;
  std::vector<double> sigma2s;
  Vector eta;

  std::size_t k_star() const { return betas.size(); }
  std::vector<std::size_t> cluster_sizes() const;
  /// Throws std::logic_error unless labels are exactly 0..k_star-1, every
  /// cluster is nonempty and every variance is positive.
  void check_invariants() const;

  friend bool operator==(const ClusterState& a, const ClusterState& b);
};

struct Snapshot {
  int iteration = 0;
  ClusterState state;
};

struct ChainTrace {
  std::vector<Snapshot> snapshots;
  FitConfig config;
  // (iterations - burn_in) x n matrix of log N(y_i | fitted mean, sigma2_{z_i}).
  Matrix loglik;
};

/// Conjugate posterior NIG(tau, precision^{-1}, a, b).
struct NigPosterior {
  Vector tau;
  Matrix precision;
  double a = 0.0;
  double b = 0.0;

  double log_density(const Vector& beta, double sigma2) const;
};

/// Per-cluster sufficient statistics of the residual regression r = y - x2 eta
/// on x1.
struct ClusterStats {
  Matrix xtx;
  Vector xtr;
  double rtr = 0.0;
  std::size_t count = 0;

  explicit ClusterStats(Eigen::Index dim) : xtx(Matrix::Zero(dim, dim)), xtr(Vector::Zero(dim)) {}
  void add(const Eigen::Ref<const Vector>& x1, double residual);
};

/// NigHyper with its prior factorization cached.
class NigModel {
 public:
  explicit NigModel(NigHyper hyper);

  Eigen::Index dim() const { return hyper_.tau0.size(); }
  const NigHyper& hyper() const { return hyper_; }

  /// log of the single-observation marginal likelihood of `residual`
  /// (y - x2 eta) with design row x1, beta and sigma2 integrated out.
  double log_marginal(double residual, const Eigen::Ref<const Vector>& x1) const;

  NigPosterior posterior(const ClusterStats& stats) const;

  /// Draws (beta, sigma2): sigma2 first from IG(a, b), then dim standard
  /// normals for beta.
  std::pair<Vector, double> sample(const NigPosterior& post, Rng& rng) const;

 private:
  NigHyper hyper_;
  Matrix prior_precision_;
  Vector prior_precision_tau0_;
  double tau0_quad_ = 0.0;
  double log_marginal_const_ = 0.0;
};

double loglik_existing(double y, const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2,
                       const Vector& beta, double sigma2, const Vector& eta);

double logmarg_new(double y, const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2,
                   const Vector& eta, const NigHyper& nig);

/// Collapsed Gibbs sampler over one design, one graph and one configuration.
/// Graph vertex i corresponds to design row i. An instance reuses scratch
/// buffers, so concurrent chains need separate instances.
class GibbsSampler {
 public:
  GibbsSampler(const LogContrastDesign& design, const SpatialGraph& graph, const FitConfig& config);

  const FitConfig& config() const { return config_; }
  const VnTable& vn_table() const { return vn_; }
  const NigModel& nig_model() const { return nig_; }

  /// All observations in one cluster with (beta, sigma2) from the base
  /// measure and eta = eta0.
  ClusterState initial_state(Rng& rng) const;

  /// Removes observation i from its cluster (dropping the cluster if it
  /// empties and shifting higher labels down) and draws its new label.
  void sample_label(ClusterState& state, std::size_t i, Rng& rng) const;
  /// sample_label for i = 0 .. n-1 in order.
  void sample_labels(ClusterState& state, Rng& rng) const;
  void update_cluster_params(ClusterState& state, Rng& rng) const;
  void update_eta(ClusterState& state, Rng& rng) const;
  void sweep(ClusterState& state, Rng& rng) const;

  NigPosterior cluster_posterior(const ClusterState& state, Label cluster) const;
  /// Mean and precision of the full conditional of eta.
  std::pair<Vector, Matrix> eta_conditional(const ClusterState& state) const;

  Vector observation_loglik(const ClusterState& state) const;

  ChainTrace run() const;

 private:
  void reassign(ClusterState& state, std::vector<std::size_t>& sizes, const Vector& offset, std::size_t i,
                Rng& rng) const;
  Vector covariate_offset(const ClusterState& state) const;

  const LogContrastDesign& design_;
  const SpatialGraph& graph_;
  FitConfig config_;
  NigModel nig_;
  VnTable vn_;
  Matrix x1t_;  // (K-1) x n, columns are observations
  Matrix x2t_;  // p x n
  Matrix eta_prior_precision_;
  Vector eta_prior_shift_;  // v0^{-1} eta0
  mutable std::vector<int> scratch_matches_;
  mutable std::vector<double> scratch_weights_;
};

// Single-step entry points. Each builds a sampler for the call.
ClusterState sample_labels(ClusterState state, const LogContrastDesign& design, const SpatialGraph& graph,
                           const FitConfig& config, Rng& rng);
ClusterState update_cluster_params(ClusterState state, const LogContrastDesign& design, const FitConfig& config,
                                   Rng& rng);
ClusterState update_eta(ClusterState state, const LogContrastDesign& design, const FitConfig& config, Rng& rng);

/// Runs config.iterations sweeps seeded by config.seed and records the
/// post-burn-in draws.
ChainTrace run_chain(const LogContrastDesign& design, const SpatialGraph& graph, const FitConfig& config);

}  // namespace scc
