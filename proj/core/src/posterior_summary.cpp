#include "scc/posterior_summary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "scc/composition.hpp"

namespace scc {

MembershipMatrix membership_matrix(std::span<const Label> z) {
  const auto n = static_cast<Eigen::Index>(z.size());
  MembershipMatrix b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = z[i] == z[j] ? 1 : 0;
  }
  return b;
}

std::size_t dahl_select(std::span<const std::vector<Label>> draws) {
  if (draws.empty()) throw std::invalid_argument("dahl_select: no draws");
  const std::size_t n = draws.front().size();
  for (const auto& d : draws) {
    if (d.size() != n) throw std::invalid_argument("dahl_select: draws differ in length");
  }

  // Co-clustering counts over the strict upper triangle; the diagonal is
  // always 1 and the matrix is symmetric, so the argmin is unchanged. Scaling
  // the squared distance by M^2 keeps it an integer, so ties are exact and go
  // to the earliest draw.
  std::vector<std::int64_t> count(n * n, 0);
  for (const auto& z : draws) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) count[i * n + j] += z[i] == z[j] ? 1 : 0;
    }
  }
  const auto m_total = static_cast<std::int64_t>(draws.size());

  std::size_t best = 0;
  std::int64_t best_distance = std::numeric_limits<std::int64_t>::max();
  for (std::size_t m = 0; m < draws.size(); ++m) {
    const auto& z = draws[m];
    std::int64_t distance = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::int64_t diff = (z[i] == z[j] ? m_total : 0) - count[i * n + j];
        distance += diff * diff;
      }
    }
    if (distance < best_distance) {
      best_distance = distance;
      best = m;
    }
  }
  return best;
}

std::size_t dahl_select(const ChainTrace& trace) {
  std::vector<std::vector<Label>> draws;
  draws.reserve(trace.snapshots.size());
  for (const auto& s : trace.snapshots) draws.push_back(s.state.z);
  return dahl_select(draws);
}

Vector log_cpo(const Matrix& loglik) {
  if (loglik.rows() < 1 || loglik.cols() < 1) throw std::invalid_argument("lpml: empty log-likelihood matrix");
  const auto m = static_cast<double>(loglik.rows());
  Vector out(loglik.cols());
  for (Eigen::Index i = 0; i < loglik.cols(); ++i) {
    double max_neg = -std::numeric_limits<double>::infinity();
    for (Eigen::Index d = 0; d < loglik.rows(); ++d) {
      const double v = loglik(d, i);
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "lpml: non-finite log-likelihood for observation " << i << " at draw " << d;
        throw NumericalError(msg.str());
      }
      max_neg = std::max(max_neg, -v);
    }
    double sum = 0.0;
    for (Eigen::Index d = 0; d < loglik.rows(); ++d) sum += std::exp(-loglik(d, i) - max_neg);
    out(i) = std::log(m) - (max_neg + std::log(sum));
  }
  return out;
}

double lpml(const Matrix& loglik) { return log_cpo(loglik).sum(); }

double lpml(const ChainTrace& trace) { return lpml(trace.loglik); }

double rand_index(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw std::invalid_argument("rand_index: label vectors differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("rand_index: need at least two items");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      agree += ((a[i] == a[j]) == (b[i] == b[j])) ? 1 : 0;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(agree) / pairs;
}

namespace {

void check_replicates(std::span<const Matrix> estimates) {
  if (estimates.empty()) throw std::invalid_argument("estimation metrics: no replicates");
  for (const auto& e : estimates) {
    if (e.rows() != estimates.front().rows() || e.cols() != estimates.front().cols()) {
      throw std::invalid_argument("estimation metrics: replicate shapes differ");
    }
  }
}

}  // namespace

Vector mean_standard_deviation(std::span<const Matrix> estimates) {
  check_replicates(estimates);
  if (estimates.size() < 2) throw std::invalid_argument("MSD is undefined with fewer than 2 replicates");
  const auto r = static_cast<double>(estimates.size());
  const Eigen::Index locations = estimates.front().rows();
  const Eigen::Index coefs = estimates.front().cols();
  Vector msd = Vector::Zero(coefs);
  for (Eigen::Index l = 0; l < locations; ++l) {
    for (Eigen::Index m = 0; m < coefs; ++m) {
      double mean = 0.0;
      for (const auto& e : estimates) mean += e(l, m);
      mean /= r;
      double ss = 0.0;
      for (const auto& e : estimates) ss += (e(l, m) - mean) * (e(l, m) - mean);
      msd(m) += std::sqrt(ss / (r - 1.0));
    }
  }
  return msd / static_cast<double>(locations);
}

EstimationMetrics estimation_metrics(std::span<const Matrix> estimates, const Matrix& truth) {
  check_replicates(estimates);
  if (truth.rows() != estimates.front().rows() || truth.cols() != estimates.front().cols()) {
    throw std::invalid_argument("estimation metrics: truth shape differs from estimates");
  }
  const auto r = static_cast<double>(estimates.size());
  const auto locations = static_cast<double>(truth.rows());
  EstimationMetrics out;
  out.mab = Vector::Zero(truth.cols());
  out.mmse = Vector::Zero(truth.cols());
  for (const auto& e : estimates) {
    const Matrix diff = e - truth;
    out.mab += diff.cwiseAbs().colwise().sum().transpose();
    out.mmse += diff.cwiseAbs2().colwise().sum().transpose();
  }
  out.mab /= r * locations;
  out.mmse /= r * locations;
  if (estimates.size() >= 2) out.msd = mean_standard_deviation(estimates);
  return out;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

PosteriorSummary summarize(const ChainTrace& trace, const Matrix& m1) {
  if (trace.snapshots.empty()) throw std::invalid_argument("summarize: empty trace");
  PosteriorSummary s;
  s.m_best = dahl_select(trace);
  const Snapshot& best = trace.snapshots[s.m_best];
  s.iteration = best.iteration;
  s.z_hat = best.state.z;
  s.k_hat = best.state.k_star();
  s.beta_hat = best.state.betas;
  s.sigma2_hat = best.state.sigma2s;
  s.eta_hat = best.state.eta;
  for (const auto& b : s.beta_hat) s.beta_tilde_hat.push_back(recover_constrained(b, m1).beta_tilde);
  s.lpml = lpml(trace);

  const Eigen::Index p = s.eta_hat.size();
  for (Eigen::Index j = 0; j < p; ++j) {
    std::vector<double> draws;
    draws.reserve(trace.snapshots.size());
    for (const auto& snap : trace.snapshots) draws.push_back(snap.state.eta(j));
    s.eta_interval.push_back({quantile(draws, 0.025), quantile(std::move(draws), 0.975)});
  }
  for (std::size_t c = 0; c < s.k_hat; ++c) {
    std::vector<double> pooled;
    for (const auto& snap : trace.snapshots) {
      for (std::size_t i = 0; i < s.z_hat.size(); ++i) {
        if (s.z_hat[i] == static_cast<Label>(c)) pooled.push_back(snap.state.sigma2s[snap.state.z[i]]);
      }
    }
    s.sigma2_interval.push_back({quantile(pooled, 0.025), quantile(std::move(pooled), 0.975)});
  }
  return s;
}

Matrix location_coefficients(const PosteriorSummary& summary) {
  if (summary.beta_tilde_hat.empty()) return Matrix();
  const Eigen::Index parts = summary.beta_tilde_hat.front().size();
  Matrix out(static_cast<Eigen::Index>(summary.z_hat.size()), parts);
  for (std::size_t i = 0; i < summary.z_hat.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = summary.beta_tilde_hat.at(summary.z_hat[i]).transpose();
  }
  return out;
}

}  // namespace scc
