#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace scc::testing {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

void grow(int n, std::vector<Label>& current, Label max_label, std::vector<std::vector<Label>>& out) {
  if (static_cast<int>(current.size()) == n) {
    out.push_back(current);
    return;
  }
  for (Label l = 0; l <= max_label + 1; ++l) {
    current.push_back(l);
    grow(n, current, std::max(max_label, l), out);
    current.pop_back();
  }
}

}  // namespace

std::vector<std::vector<Label>> set_partitions(int n) {
  std::vector<std::vector<Label>> out;
  std::vector<Label> current;
  if (n == 0) return {{}};
  current.push_back(0);
  grow(n, current, 0, out);
  return out;
}

long double vn_partial_sum(int n, int w, double gamma, double zeta, int terms) {
  long double sum = 0.0L;
  for (int k = std::max(w, 1); k <= terms; ++k) {
    // k_(w) / (gamma k)^(n) * Poisson(k - 1 | zeta)
    long double log_term = std::lgamma(static_cast<long double>(k) + 1) - std::lgamma(static_cast<long double>(k - w) + 1);
    log_term -= std::lgamma(static_cast<long double>(gamma) * k + n) - std::lgamma(static_cast<long double>(gamma) * k);
    log_term += (k - 1) * std::log(static_cast<long double>(zeta)) - zeta - std::lgamma(static_cast<long double>(k));
    sum += std::exp(log_term);
  }
  return sum;
}

std::vector<double> mrf_mfm_partition_probs(const std::vector<std::vector<Label>>& partitions,
                                            const std::vector<std::pair<int, int>>& edges, double lambda,
                                            const MfmHyper& hyper) {
  std::vector<double> logw;
  const int n = partitions.empty() ? 0 : static_cast<int>(partitions.front().size());
  std::vector<long double> vn(static_cast<std::size_t>(n) + 2);
  for (int w = 1; w <= n + 1; ++w) vn[static_cast<std::size_t>(w)] = vn_partial_sum(n, w, hyper.gamma, hyper.zeta, 2000);
  for (const auto& z : partitions) {
    const Label t = *std::max_element(z.begin(), z.end()) + 1;
    double lw = static_cast<double>(std::log(vn[static_cast<std::size_t>(t)]));
    for (Label c = 0; c < t; ++c) {
      const auto size = std::count(z.begin(), z.end(), c);
      lw += std::lgamma(hyper.gamma + static_cast<double>(size)) - std::lgamma(hyper.gamma);
    }
    for (const auto& [a, b] : edges) {
      if (z[static_cast<std::size_t>(a)] == z[static_cast<std::size_t>(b)]) lw += lambda;
    }
    logw.push_back(lw);
  }
  const double mx = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& v : logw) total += (v = std::exp(v - mx));
  for (double& v : logw) v /= total;
  return logw;
}

double nig_log_marginal_direct(double residual, const Vector& x1, const NigHyper& nig) {
  const Matrix p0 = nig.sigma0.inverse();
  const Matrix p_star = p0 + x1 * x1.transpose();
  const Vector rhs = p0 * nig.tau0 + residual * x1;
  const Vector tau_star = p_star.ldlt().solve(rhs);
  const double a_star = nig.a0 + 0.5;
  const double b_star =
      nig.b0 + 0.5 * (nig.tau0.dot(p0 * nig.tau0) + residual * residual - tau_star.dot(p_star * tau_star));
  const double log_det_sigma_star = -std::log(p_star.determinant());
  const double log_det_sigma0 = std::log(nig.sigma0.determinant());
  return nig.a0 * std::log(nig.b0) - std::lgamma(nig.a0) + std::lgamma(a_star) - a_star * std::log(b_star) +
         0.5 * (log_det_sigma_star - log_det_sigma0) - 0.5 * kLogTwoPi;
}

double nig_log_prior(const Vector& beta, double sigma2, const NigHyper& nig) {
  const auto d = static_cast<double>(beta.size());
  const Vector diff = beta - nig.tau0;
  const double quad = diff.dot(nig.sigma0.inverse() * diff);
  const double log_normal =
      -0.5 * d * (kLogTwoPi + std::log(sigma2)) - 0.5 * std::log(nig.sigma0.determinant()) - 0.5 * quad / sigma2;
  const double log_ig = nig.a0 * std::log(nig.b0) - std::lgamma(nig.a0) - (nig.a0 + 1) * std::log(sigma2) - nig.b0 / sigma2;
  return log_normal + log_ig;
}

double integrate_line(const std::function<double(double)>& f, double center, double scale) {
  using boost::math::quadrature::gauss_kronrod;
  auto g = [&](double u) { return scale * f(center + scale * u); };
  const double inf = std::numeric_limits<double>::infinity();
  return gauss_kronrod<double, 61>::integrate(g, -inf, inf, 15, 1e-9);
}

double integrate_beta_sigma2(const std::function<double(double, double)>& f, double beta_center, double beta_scale,
                             double log_sigma2_center) {
  using boost::math::quadrature::gauss_kronrod;
  // exp(t) leaves the double range long before +-40 matters for any density
  // the tests integrate, and a finite window keeps sigma2 representable.
  auto outer = [&](double t) {
    const double sigma2 = std::exp(t);
    // Beta's spread shrinks with sigma2; scale the inner variable with it.
    const double s = beta_scale * std::sqrt(sigma2);
    return sigma2 * integrate_line([&](double beta) { return f(beta, sigma2); }, beta_center, s);
  };
  return gauss_kronrod<double, 61>::integrate(outer, log_sigma2_center - 40.0, log_sigma2_center + 40.0, 15, 1e-9);
}

double ks_statistic_uniform(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = std::clamp(sample[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double batch_means_se(const std::vector<double>& x, int batches) {
  const std::size_t per = x.size() / static_cast<std::size_t>(batches);
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    const auto first = x.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(b) * per);
    means.push_back(std::accumulate(first, first + static_cast<std::ptrdiff_t>(per), 0.0) / static_cast<double>(per));
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  return std::sqrt(ss / (batches - 1) / batches);
}

LogContrastDesign small_design(const Matrix& x1, const Matrix& x2, const Vector& y) {
  LogContrastDesign d;
  d.projection = HelmertProjection::for_parts(static_cast<int>(x1.cols()) + 1);
  d.x1 = x1;
  d.z = x1 * d.projection.m1.transpose();
  d.x2 = x2;
  d.y = y;
  return d;
}

SpatialGraph path_graph(int n) {
  std::vector<std::string> ids;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(i) + 1]);
  return SpatialGraph::from_edge_list(edges, ids);
}

}  // namespace scc::testing
