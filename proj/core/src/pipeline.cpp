#include "scc/pipeline.hpp"

#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>

#include "scc/rng.hpp"

namespace scc {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(0.5 * k);
  return grid;
}

std::size_t select_by_lpml(std::span<const double> lambdas, std::span<const double> lpmls) {
  if (lambdas.empty() || lambdas.size() != lpmls.size()) {
    throw std::invalid_argument("select_by_lpml: need one LPML per lambda");
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < lpmls.size(); ++j) {
    if (lpmls[j] > lpmls[best] || (lpmls[j] == lpmls[best] && lambdas[j] < lambdas[best])) best = j;
  }
  return best;
}

GridFit fit_lambda_grid(const LogContrastDesign& design, const SpatialGraph& graph, const FitConfig& base,
                        std::span<const double> lambdas, int threads) {
  if (lambdas.empty()) throw std::invalid_argument("lambda grid is empty");
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw std::invalid_argument("lambda grid values must be >= 0");
  }
  GridFit fit;
  fit.points.resize(lambdas.size());
  parallel_for(lambdas.size(), threads, [&](std::size_t j) {
    FitConfig cfg = base;
    cfg.lambda = lambdas[j];
    cfg.seed = derive_seed(base.seed, j);
    GridPoint& point = fit.points[j];
    point.lambda = lambdas[j];
    point.trace = run_chain(design, graph, cfg);
    point.lpml = lpml(point.trace);
  });
  std::vector<double> lpmls;
  for (const auto& p : fit.points) lpmls.push_back(p.lpml);
  fit.selected = select_by_lpml(lambdas, lpmls);
  return fit;
}

}  // namespace scc
