#pragma once

// Independent reference computations used only by the tests.

#include <cstdint>
#include <functional>
#include <vector>

#include "scc/sampler.hpp"
#include "scc/types.hpp"

namespace scc::testing {

/// Every set partition of {0..n-1} as a restricted growth string.
std::vector<std::vector<Label>> set_partitions(int n);

/// Plain partial sum of the V_n(w) series with `terms` terms, in long double.
long double vn_partial_sum(int n, int w, double gamma, double zeta, int terms);

/// MRF-weighted MFM prior mass of every partition of {0..n-1}, normalized by
/// enumeration. `edges` are index pairs.
std::vector<double> mrf_mfm_partition_probs(const std::vector<std::vector<Label>>& partitions,
                                            const std::vector<std::pair<int, int>>& edges, double lambda,
                                            const MfmHyper& hyper);

/// Single-observation marginal from the general NIG posterior formula with
/// explicit determinants (no rank-one reduction).
double nig_log_marginal_direct(double residual, const Vector& x1, const NigHyper& nig);

/// log N(beta | tau0, sigma2 sigma0) + log IG(sigma2 | a0, b0).
double nig_log_prior(const Vector& beta, double sigma2, const NigHyper& nig);

/// Adaptive Gauss-Kronrod over the real line.
double integrate_line(const std::function<double(double)>& f, double center, double scale);
/// Integral over beta in R and sigma2 > 0 (via sigma2 = exp(t)).
double integrate_beta_sigma2(const std::function<double(double, double)>& f, double beta_center, double beta_scale,
                             double log_sigma2_center);

/// Kolmogorov-Smirnov statistic of a sample against Uniform(0, 1).
double ks_statistic_uniform(std::vector<double> sample);

/// Batch-means standard error of the mean.
double batch_means_se(const std::vector<double>& x, int batches = 50);

/// Tiny design with K = 2 (x1 has one column), p covariates.
LogContrastDesign small_design(const Matrix& x1, const Matrix& x2, const Vector& y);

/// Path graph 0 - 1 - ... - (n-1) with string labels "0".."n-1".
SpatialGraph path_graph(int n);

}  // namespace scc::testing
