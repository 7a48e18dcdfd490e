#include "scc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace scc {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // log(2 pi)

bool is_spd(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.isApprox(m.transpose(), 1e-10)) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

double log_normal_density(double residual, double sigma2) {
  return -0.5 * (kLogTwoPi + std::log(sigma2)) - 0.5 * residual * residual / sigma2;
}

Eigen::LLT<Matrix> factor_or_throw(const Matrix& precision, const char* what) {
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": precision matrix is not positive definite");
  }
  return llt;
}

}  // namespace

NigHyper NigHyper::defaults(Eigen::Index dim) {
  NigHyper h;
  h.tau0 = Vector::Zero(dim);
  h.sigma0 = Matrix::Identity(dim, dim);
  return h;
}

void NigHyper::validate() const {
  if (tau0.size() < 1) throw std::invalid_argument("NIG prior: tau0 is empty");
  if (sigma0.rows() != tau0.size() || sigma0.cols() != tau0.size()) {
    throw std::invalid_argument("NIG prior: sigma0 dimensions do not match tau0");
  }
  if (!is_spd(sigma0)) throw std::invalid_argument("NIG prior: sigma0 is not symmetric positive definite");
  if (!(a0 > 0.0) || !(b0 > 0.0)) throw std::invalid_argument("NIG prior: a0 and b0 must be positive");
}

EtaPrior EtaPrior::defaults(Eigen::Index p) {
  EtaPrior e;
  e.eta0 = Vector::Zero(p);
  e.v0 = 100.0 * Matrix::Identity(p, p);
  return e;
}

void EtaPrior::validate() const {
  if (v0.rows() != eta0.size() || v0.cols() != eta0.size()) {
    throw std::invalid_argument("eta prior: v0 dimensions do not match eta0");
  }
  if (eta0.size() > 0 && !is_spd(v0)) {
    throw std::invalid_argument("eta prior: v0 is not symmetric positive definite");
  }
}

void FitConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw std::invalid_argument("burn-in must satisfy 0 <= B < M");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
  if (!(zero_pseudocount > 0.0)) throw std::invalid_argument("zero pseudocount must be positive");
  hyper.mfm.validate();
  hyper.nig.validate();
  hyper.eta.validate();
}

FitConfig FitConfig::resolved_for(const LogContrastDesign& design) const {
  FitConfig out = *this;
  const Eigen::Index dim = design.x1.cols();
  const Eigen::Index p = design.x2.cols();
  if (out.hyper.nig.tau0.size() == 0) out.hyper.nig.tau0 = Vector::Zero(dim);
  if (out.hyper.nig.sigma0.size() == 0) out.hyper.nig.sigma0 = Matrix::Identity(dim, dim);
  if (out.hyper.eta.eta0.size() == 0 && p > 0) out.hyper.eta.eta0 = Vector::Zero(p);
  if (out.hyper.eta.v0.size() == 0 && p > 0) out.hyper.eta.v0 = 100.0 * Matrix::Identity(p, p);
  out.hyper.mfm.n = static_cast<std::size_t>(design.size());
  if (out.hyper.nig.tau0.size() != dim) throw std::invalid_argument("tau0 length differs from K-1");
  if (out.hyper.eta.eta0.size() != p) throw std::invalid_argument("eta0 length differs from covariate count");
  out.validate();
  return out;
}

std::vector<std::size_t> ClusterState::cluster_sizes() const {
  std::vector<std::size_t> sizes(k_star(), 0);
  for (Label l : z) {
    if (l >= 0 && static_cast<std::size_t>(l) < sizes.size()) ++sizes[l];
  }
  return sizes;
}

void ClusterState::check_invariants() const {
  if (sigma2s.size() != betas.size()) throw std::logic_error("cluster state: betas/sigma2s length mismatch");
  const auto sizes = cluster_sizes();
  for (Label l : z) {
    if (l < 0 || static_cast<std::size_t>(l) >= k_star()) throw std::logic_error("cluster state: label out of range");
  }
  for (std::size_t s : sizes) {
    if (s == 0) throw std::logic_error("cluster state: empty cluster");
  }
  for (double s2 : sigma2s) {
    if (!(s2 > 0.0) || !std::isfinite(s2)) throw std::logic_error("cluster state: non-positive variance");
  }
}

bool operator==(const ClusterState& a, const ClusterState& b) {
  if (a.z != b.z || a.sigma2s != b.sigma2s || a.betas.size() != b.betas.size()) return false;
  if (a.eta.size() != b.eta.size() || a.eta != b.eta) return false;
  for (std::size_t k = 0; k < a.betas.size(); ++k) {
    if (a.betas[k].size() != b.betas[k].size() || a.betas[k] != b.betas[k]) return false;
  }
  return true;
}

double NigPosterior::log_density(const Vector& beta, double sigma2) const {
  const auto d = static_cast<double>(tau.size());
  Eigen::LLT<Matrix> llt(precision);
  const Matrix l = llt.matrixL();
  const double log_det_precision = 2.0 * l.diagonal().array().log().sum();
  const Vector diff = beta - tau;
  const double quad = diff.dot(precision * diff);
  const double log_normal = -0.5 * d * (kLogTwoPi + std::log(sigma2)) + 0.5 * log_det_precision - 0.5 * quad / sigma2;
  const double log_ig = a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(sigma2) - b / sigma2;
  return log_normal + log_ig;
}

void ClusterStats::add(const Eigen::Ref<const Vector>& x1, double residual) {
  xtx.noalias() += x1 * x1.transpose();
  xtr += residual * x1;
  rtr += residual * residual;
  ++count;
}

NigModel::NigModel(NigHyper hyper) : hyper_(std::move(hyper)) {
  hyper_.validate();
  auto llt = factor_or_throw(hyper_.sigma0, "NIG prior");
  prior_precision_ = llt.solve(Matrix::Identity(dim(), dim()));
  prior_precision_ = 0.5 * (prior_precision_ + prior_precision_.transpose());
  prior_precision_tau0_ = prior_precision_ * hyper_.tau0;
  tau0_quad_ = hyper_.tau0.dot(prior_precision_tau0_);
  const double a0 = hyper_.a0;
  log_marginal_const_ = a0 * std::log(hyper_.b0) + std::lgamma(a0 + 0.5) - std::lgamma(a0) - 0.5 * kLogTwoPi;
}

double NigModel::log_marginal(double residual, const Eigen::Ref<const Vector>& x1) const {
  // With precision P = sigma0^{-1} + x1 x1^T, the determinant lemma gives
  // |sigma|/|sigma0| = 1 / (1 + q) with q = x1^T sigma0 x1, and
  // tau0' P0 tau0 + r^2 - tau' P tau collapses to (r - x1' tau0)^2 / (1 + q).
  const double q = x1.dot(hyper_.sigma0 * x1);
  const double centered = residual - x1.dot(hyper_.tau0);
  const double one_plus_q = 1.0 + q;
  const double rate = hyper_.b0 + 0.5 * centered * centered / one_plus_q;
  return log_marginal_const_ - 0.5 * std::log(one_plus_q) - (hyper_.a0 + 0.5) * std::log(rate);
}

NigPosterior NigModel::posterior(const ClusterStats& stats) const {
  NigPosterior post;
  post.precision = prior_precision_ + stats.xtx;
  const Vector rhs = prior_precision_tau0_ + stats.xtr;
  auto llt = factor_or_throw(post.precision, "cluster update");
  post.tau = llt.solve(rhs);
  post.a = hyper_.a0 + 0.5 * static_cast<double>(stats.count);
  post.b = hyper_.b0 + 0.5 * (tau0_quad_ + stats.rtr - rhs.dot(post.tau));
  if (!(post.b > 0.0) || !std::isfinite(post.b)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "cluster update: posterior rate b* = " << post.b << " is not positive (N_c = " << stats.count
        << ", sum r^2 = " << stats.rtr << ", tau0' P0 tau0 = " << tau0_quad_ << ")";
    throw NumericalError(msg.str());
  }
  return post;
}

std::pair<Vector, double> NigModel::sample(const NigPosterior& post, Rng& rng) const {
  const double sigma2 = rng.inverse_gamma(post.a, post.b);
  Vector xi(dim());
  for (Eigen::Index j = 0; j < dim(); ++j) xi(j) = rng.normal();
  auto llt = factor_or_throw(post.precision, "cluster draw");
  Vector beta = post.tau + std::sqrt(sigma2) * llt.matrixU().solve(xi);
  return {std::move(beta), sigma2};
}

double loglik_existing(double y, const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2,
                       const Vector& beta, double sigma2, const Vector& eta) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("loglik_existing: sigma2 must be positive");
  const double mean = x1.dot(beta) + (x2.size() > 0 ? x2.dot(eta) : 0.0);
  return log_normal_density(y - mean, sigma2);
}

double logmarg_new(double y, const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2,
                   const Vector& eta, const NigHyper& nig) {
  const NigModel model(nig);
  if (x1.size() != model.dim()) throw std::invalid_argument("logmarg_new: x1 length differs from tau0");
  const double residual = y - (x2.size() > 0 ? x2.dot(eta) : 0.0);
  return model.log_marginal(residual, x1);
}

GibbsSampler::GibbsSampler(const LogContrastDesign& design, const SpatialGraph& graph, const FitConfig& config)
    : design_(design),
      graph_(graph),
      config_(config.resolved_for(design)),
      nig_(config_.hyper.nig),
      vn_(VnTable::build(config_.hyper.mfm, config_.vn_tol)),
      x1t_(design.x1.transpose()),
      x2t_(design.x2.transpose()) {
  if (graph.size() != static_cast<std::size_t>(design.size())) {
    throw std::invalid_argument("sampler: graph vertex count differs from observation count");
  }
  const Eigen::Index p = design.x2.cols();
  if (p > 0) {
    auto llt = factor_or_throw(config_.hyper.eta.v0, "eta prior");
    eta_prior_precision_ = llt.solve(Matrix::Identity(p, p));
    eta_prior_precision_ = 0.5 * (eta_prior_precision_ + eta_prior_precision_.transpose());
    eta_prior_shift_ = eta_prior_precision_ * config_.hyper.eta.eta0;
  }
}

ClusterState GibbsSampler::initial_state(Rng& rng) const {
  const auto n = static_cast<std::size_t>(design_.size());
  ClusterState state;
  state.z.assign(n, 0);
  NigPosterior prior;
  prior.tau = config_.hyper.nig.tau0;
  prior.precision = nig_.posterior(ClusterStats(nig_.dim())).precision;
  prior.a = config_.hyper.nig.a0;
  prior.b = config_.hyper.nig.b0;
  auto [beta, sigma2] = nig_.sample(prior, rng);
  // Shape a0 = 0.01 puts mass at astronomically large or small variances;
  // keep the starting value representable.
  if (!std::isfinite(sigma2) || sigma2 > 1e100 || !std::isfinite(beta.sum())) {
    sigma2 = 1e100;
    beta = prior.tau;
  }
  sigma2 = std::max(sigma2, 1e-100);
  state.betas.push_back(std::move(beta));
  state.sigma2s.push_back(sigma2);
  state.eta = design_.x2.cols() > 0 ? config_.hyper.eta.eta0 : Vector();
  return state;
}

void GibbsSampler::reassign(ClusterState& state, std::vector<std::size_t>& sizes, const Vector& offset,
                            std::size_t i, Rng& rng) const {
  const double gamma = config_.hyper.mfm.gamma;
  const double lambda = config_.lambda;

  const Label old = state.z[i];
  state.z[i] = kUnassigned;
  if (--sizes[old] == 0) {
    sizes.erase(sizes.begin() + old);
    state.betas.erase(state.betas.begin() + old);
    state.sigma2s.erase(state.sigma2s.begin() + old);
    for (Label& l : state.z) {
      if (l > old) --l;
    }
  }

  const std::size_t k_star = state.k_star();
  std::vector<int>& matches = scratch_matches_;
  std::vector<double>& log_w = scratch_weights_;
  matches.assign(k_star, 0);
  if (lambda != 0.0) {
    for (std::size_t l : graph_.neighbors(i)) {
      if (state.z[l] != kUnassigned) ++matches[state.z[l]];
    }
  }

  const double residual = design_.y(static_cast<Eigen::Index>(i)) - offset(static_cast<Eigen::Index>(i));
  const auto x1 = x1t_.col(static_cast<Eigen::Index>(i));
  log_w.resize(k_star + 1);
  for (std::size_t k = 0; k < k_star; ++k) {
    const double r = residual - x1.dot(state.betas[k]);
    log_w[k] = existing_cluster_log_weight(sizes[k], matches[k], gamma, lambda) +
               log_normal_density(r, state.sigma2s[k]);
  }
  log_w[k_star] = new_cluster_log_weight(k_star, gamma, vn_) + nig_.log_marginal(residual, x1);

  const std::size_t choice = rng.categorical(log_w);
  if (choice == k_star) {
    ClusterStats stats(nig_.dim());
    stats.add(x1, residual);
    auto [beta, sigma2] = nig_.sample(nig_.posterior(stats), rng);
    state.betas.push_back(std::move(beta));
    state.sigma2s.push_back(sigma2);
    sizes.push_back(1);
  } else {
    ++sizes[choice];
  }
  state.z[i] = static_cast<Label>(choice);
}

Vector GibbsSampler::covariate_offset(const ClusterState& state) const {
  if (design_.x2.cols() > 0) return design_.x2 * state.eta;
  return Vector::Zero(design_.size());
}

void GibbsSampler::sample_label(ClusterState& state, std::size_t i, Rng& rng) const {
  if (i >= state.z.size()) throw std::out_of_range("sample_label: observation index out of range");
  std::vector<std::size_t> sizes = state.cluster_sizes();
  reassign(state, sizes, covariate_offset(state), i, rng);
}

void GibbsSampler::sample_labels(ClusterState& state, Rng& rng) const {
  std::vector<std::size_t> sizes = state.cluster_sizes();
  const Vector offset = covariate_offset(state);
  for (std::size_t i = 0; i < state.z.size(); ++i) reassign(state, sizes, offset, i, rng);
}

NigPosterior GibbsSampler::cluster_posterior(const ClusterState& state, Label cluster) const {
  ClusterStats stats(nig_.dim());
  for (Eigen::Index i = 0; i < design_.size(); ++i) {
    if (state.z[static_cast<std::size_t>(i)] != cluster) continue;
    const double offset = design_.x2.cols() > 0 ? x2t_.col(i).dot(state.eta) : 0.0;
    stats.add(x1t_.col(i), design_.y(i) - offset);
  }
  return nig_.posterior(stats);
}

void GibbsSampler::update_cluster_params(ClusterState& state, Rng& rng) const {
  std::vector<ClusterStats> stats(state.k_star(), ClusterStats(nig_.dim()));
  for (Eigen::Index i = 0; i < design_.size(); ++i) {
    const double offset = design_.x2.cols() > 0 ? x2t_.col(i).dot(state.eta) : 0.0;
    stats[state.z[static_cast<std::size_t>(i)]].add(x1t_.col(i), design_.y(i) - offset);
  }
  for (std::size_t k = 0; k < state.k_star(); ++k) {
    auto [beta, sigma2] = nig_.sample(nig_.posterior(stats[k]), rng);
    state.betas[k] = std::move(beta);
    state.sigma2s[k] = sigma2;
  }
}

std::pair<Vector, Matrix> GibbsSampler::eta_conditional(const ClusterState& state) const {
  Matrix precision = eta_prior_precision_;
  Vector rhs = eta_prior_shift_;
  for (Eigen::Index i = 0; i < design_.size(); ++i) {
    const Label k = state.z[static_cast<std::size_t>(i)];
    const double w = config_.unweighted_eta ? 1.0 : 1.0 / state.sigma2s[k];
    const auto x2 = x2t_.col(i);
    const double r = design_.y(i) - x1t_.col(i).dot(state.betas[k]);
    precision.noalias() += w * x2 * x2.transpose();
    rhs.noalias() += (w * r) * x2;
  }
  auto llt = factor_or_throw(precision, "eta update");
  Vector mean = llt.solve(rhs);
  return {std::move(mean), std::move(precision)};
}

void GibbsSampler::update_eta(ClusterState& state, Rng& rng) const {
  const Eigen::Index p = design_.x2.cols();
  if (p == 0) return;
  auto [mean, precision] = eta_conditional(state);
  Vector xi(p);
  for (Eigen::Index j = 0; j < p; ++j) xi(j) = rng.normal();
  auto llt = factor_or_throw(precision, "eta update");
  state.eta = mean + llt.matrixU().solve(xi);
}

void GibbsSampler::sweep(ClusterState& state, Rng& rng) const {
  sample_labels(state, rng);
  update_cluster_params(state, rng);
  update_eta(state, rng);
}

Vector GibbsSampler::observation_loglik(const ClusterState& state) const {
  Vector out(design_.size());
  for (Eigen::Index i = 0; i < design_.size(); ++i) {
    const Label k = state.z[static_cast<std::size_t>(i)];
    const double offset = design_.x2.cols() > 0 ? x2t_.col(i).dot(state.eta) : 0.0;
    const double r = design_.y(i) - offset - x1t_.col(i).dot(state.betas[k]);
    out(i) = log_normal_density(r, state.sigma2s[k]);
  }
  return out;
}

ChainTrace GibbsSampler::run() const {
  Rng rng(config_.seed);
  ChainTrace trace;
  trace.config = config_;
  const int kept = config_.iterations - config_.burn_in;
  trace.snapshots.reserve(static_cast<std::size_t>(kept));
  trace.loglik.resize(kept, design_.size());

  ClusterState state = initial_state(rng);
  for (int it = 1; it <= config_.iterations; ++it) {
    try {
      sweep(state, rng);
      if (it > config_.burn_in) {
        const int row = it - config_.burn_in - 1;
        trace.loglik.row(row) = observation_loglik(state).transpose();
        if (!trace.loglik.row(row).allFinite()) throw NumericalError("non-finite observation log-likelihood");
        trace.snapshots.push_back({it, state});
      }
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(it) + " (lambda = " + std::to_string(config_.lambda) +
                           "): " + e.what());
    }
  }
  return trace;
}

namespace {

SpatialGraph empty_graph(Eigen::Index n) {
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return SpatialGraph::from_edge_list({}, std::move(ids));
}

}  // namespace

ClusterState sample_labels(ClusterState state, const LogContrastDesign& design, const SpatialGraph& graph,
                           const FitConfig& config, Rng& rng) {
  const GibbsSampler sampler(design, graph, config);
  sampler.sample_labels(state, rng);
  return state;
}

ClusterState update_cluster_params(ClusterState state, const LogContrastDesign& design, const FitConfig& config,
                                   Rng& rng) {
  const SpatialGraph graph = empty_graph(design.size());
  const GibbsSampler sampler(design, graph, config);
  sampler.update_cluster_params(state, rng);
  return state;
}

ClusterState update_eta(ClusterState state, const LogContrastDesign& design, const FitConfig& config, Rng& rng) {
  const SpatialGraph graph = empty_graph(design.size());
  const GibbsSampler sampler(design, graph, config);
  sampler.update_eta(state, rng);
  return state;
}

ChainTrace run_chain(const LogContrastDesign& design, const SpatialGraph& graph, const FitConfig& config) {
  const GibbsSampler sampler(design, graph, config);
  return sampler.run();
}

}  // namespace scc
