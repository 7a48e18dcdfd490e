#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "scc/composition.hpp"
#include "scc/posterior_summary.hpp"
#include "scc/sampler.hpp"
#include "scc/spatial_graph.hpp"

namespace scc {

/// Runs fn(0) .. fn(count - 1) on up to `threads` workers. Every index runs
/// even if another throws; afterwards the exception from the lowest failing
/// index is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// {0, 0.5, ..., 5}.
std::vector<double> default_lambda_grid();

struct GridPoint {
  double lambda = 0.0;
  ChainTrace trace;
  double lpml = 0.0;
};

struct GridFit {
  std::vector<GridPoint> points;
  std::size_t selected = 0;  // argmax LPML, ties to the smaller lambda
};

/// Index of the largest LPML; ties go to the smaller lambda.
std::size_t select_by_lpml(std::span<const double> lambdas, std::span<const double> lpmls);

/// One chain per lambda, chain j seeded with derive_seed(base.seed, j).
/// Results do not depend on `threads`.
GridFit fit_lambda_grid(const LogContrastDesign& design, const SpatialGraph& graph, const FitConfig& base,
                        std::span<const double> lambdas, int threads);

}  // namespace scc
