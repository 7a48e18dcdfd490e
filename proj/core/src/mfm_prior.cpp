#include "scc/mfm_prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace scc {
namespace {

constexpr std::size_t kMaxSeriesTerms = 1'000'000;
constexpr int kSmallTermsToStop = 5;

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log of the rising factorial x (x+1) ... (x+m-1).
double log_rising(double x, double m) { return std::lgamma(x + m) - std::lgamma(x); }

double log_vn(std::size_t w, const MfmHyper& h, double tol) {
  const double n = static_cast<double>(h.n);
  const double log_tol = std::log(tol);
  const double log_zeta = std::log(h.zeta);
  double log_sum = -std::numeric_limits<double>::infinity();
  int small = 0;
  const std::size_t first = std::max<std::size_t>(w, 1);
  for (std::size_t k = first; k < first + kMaxSeriesTerms; ++k) {
    const double kd = static_cast<double>(k);
    const double log_falling = std::lgamma(kd + 1.0) - std::lgamma(kd - static_cast<double>(w) + 1.0);
    const double log_poisson = (kd - 1.0) * log_zeta - h.zeta - std::lgamma(kd);
    const double term = log_falling - log_rising(h.gamma * kd, n) + log_poisson;
    log_sum = log_add(log_sum, term);
    small = (term - log_sum < log_tol) ? small + 1 : 0;
    if (small >= kSmallTermsToStop) return log_sum;
  }
  std::ostringstream msg;
  msg << "V_n series did not converge within " << kMaxSeriesTerms << " terms (n=" << h.n << ", w=" << w << ")";
  throw NumericalError(msg.str());
}

}  // namespace

void MfmHyper::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("MFM gamma must be positive");
  if (!(zeta > 0.0)) throw std::invalid_argument("MFM zeta must be positive");
  if (n < 1) throw std::invalid_argument("MFM sample size must be at least 1");
}

VnTable VnTable::build(const MfmHyper& hyper, double tol) {
  hyper.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("V_n tolerance must be positive");
  VnTable table;
  table.hyper_ = hyper;
  table.tol_ = tol;
  table.log_v_.resize(hyper.n + 2);
  for (std::size_t w = 0; w <= hyper.n + 1; ++w) {
    const double v = log_vn(w, hyper, tol);
    if (!std::isfinite(v)) throw NumericalError("V_n table entry is not finite");
    table.log_v_[w] = v;
  }
  // For the default hyperparameters V_n(w) is non-increasing in w (strictly
  // once n >= 2; V_1(1) = V_1(2) = 1).
  if (hyper.gamma == 1.0 && hyper.zeta == 1.0) {
    for (std::size_t w = 1; w <= hyper.n; ++w) {
      const bool ok = hyper.n >= 2 ? table.log_v_[w + 1] < table.log_v_[w]
                                   : table.log_v_[w + 1] <= table.log_v_[w] + 1e-12;
      if (!ok) throw NumericalError("V_n table is not decreasing in w");
    }
  }
  return table;
}

double partition_log_prior(std::span<const Label> z, const MfmHyper& hyper, const VnTable& vn) {
  if (z.size() != vn.n()) throw std::invalid_argument("partition_log_prior: label count differs from table n");
  std::map<Label, std::size_t> sizes;
  for (Label l : z) {
    if (l < 0) throw std::invalid_argument("partition_log_prior: unassigned label");
    ++sizes[l];
  }
  double out = vn.log_v(sizes.size());
  for (const auto& [label, size] : sizes) out += log_rising(hyper.gamma, static_cast<double>(size));
  return out;
}

double new_cluster_log_weight(std::size_t k_star, double gamma, const VnTable& vn) {
  return std::log(gamma) + vn.log_v(k_star + 1) - vn.log_v(k_star);
}

UrnWeights urn_log_weights(std::size_t i, std::span<const Label> z_minus, const SpatialGraph& g,
                           double lambda, const MfmHyper& hyper, const VnTable& vn) {
  if (z_minus.size() != g.size()) throw std::invalid_argument("urn_log_weights: label count differs from graph size");
  if (i >= z_minus.size()) throw std::out_of_range("urn_log_weights: index out of range");

  std::map<Label, std::size_t> sizes;
  for (std::size_t j = 0; j < z_minus.size(); ++j) {
    if (j == i || z_minus[j] == kUnassigned) continue;
    ++sizes[z_minus[j]];
  }
  std::map<Label, int> matches;
  for (std::size_t l : g.neighbors(i)) {
    if (z_minus[l] != kUnassigned) ++matches[z_minus[l]];
  }

  UrnWeights out;
  for (const auto& [label, size] : sizes) {
    const auto it = matches.find(label);
    const int m = it == matches.end() ? 0 : it->second;
    out.labels.push_back(label);
    out.existing.push_back(existing_cluster_log_weight(size, m, hyper.gamma, lambda));
  }
  out.new_cluster = new_cluster_log_weight(sizes.size(), hyper.gamma, vn);
  return out;
}

}  // namespace scc
