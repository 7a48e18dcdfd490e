#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "scc/sampler.hpp"
#include "scc/types.hpp"

namespace scc {

/// b_ij = 1 iff z_i == z_j.
using MembershipMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

MembershipMatrix membership_matrix(std::span<const Label> z);

/// Dahl's least-squares clustering: index of the draw whose membership
/// matrix is closest in squared Frobenius distance to the mean membership
/// matrix. Ties go to the smallest index.
std::size_t dahl_select(std::span<const std::vector<Label>> draws);
std::size_t dahl_select(const ChainTrace& trace);

/// log CPO_i = -log( mean_m exp(-loglik(m, i)) ), one entry per observation.
Vector log_cpo(const Matrix& loglik);
/// Sum of log CPO_i. Throws NumericalError naming the observation and draw of
/// any non-finite log-likelihood.
double lpml(const Matrix& loglik);
double lpml(const ChainTrace& trace);

/// Fraction of unordered pairs on which the two labelings agree.
double rand_index(std::span<const Label> a, std::span<const Label> b);

/// Per-coefficient estimation accuracy over replicates.
struct EstimationMetrics {
  Vector mab;
  Vector mmse;
  // Undefined with a single replicate.
  std::optional<Vector> msd;
};

/// `estimates[r]` is a locations x coefficients matrix for replicate r and
/// `truth` has the same shape. Averages run over replicates, then locations.
/// For globally shared coefficients pass 1 x p matrices.
EstimationMetrics estimation_metrics(std::span<const Matrix> estimates, const Matrix& truth);

/// Mean over locations of the across-replicate sample standard deviation
/// (divisor R - 1). Throws std::invalid_argument with fewer than 2 replicates.
Vector mean_standard_deviation(std::span<const Matrix> estimates);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double prob);

struct PosteriorSummary {
  std::size_t m_best = 0;            // index into the post-burn-in draws
  int iteration = 0;                 // sweep number of that draw
  std::vector<Label> z_hat;          // 0-based, compact
  std::vector<Vector> beta_hat;      // unconstrained, per cluster
  std::vector<Vector> beta_tilde_hat;// zero-sum log-contrast coefficients, per cluster
  std::vector<double> sigma2_hat;
  Vector eta_hat;
  std::size_t k_hat = 0;
  double lpml = 0.0;
  // 2.5% and 97.5% quantiles over post-burn-in draws.
  std::vector<Interval> eta_interval;
  // Per selected cluster: quantiles of sigma2_{z_i} pooled over draws and the
  // cluster's members.
  std::vector<Interval> sigma2_interval;
};

PosteriorSummary summarize(const ChainTrace& trace, const Matrix& m1);

/// Per-location zero-sum coefficients implied by a summary: row i is
/// beta_tilde_hat[z_hat[i]].
Matrix location_coefficients(const PosteriorSummary& summary);

}  // namespace scc
