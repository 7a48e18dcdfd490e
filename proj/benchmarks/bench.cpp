#include <random>

#include <benchmark/benchmark.h>

#include "scc/mfm_prior.hpp"
#include "scc/posterior_summary.hpp"
#include "scc/sampler.hpp"
#include "scc/simulation.hpp"

namespace {

using namespace scc;

LogContrastDesign setting_one_design() {
  const auto design = builtin_design("setting1", builtin_partition("disjoint"));
  return make_design(generate_dataset(design, 0).data);
}

void BM_VnTableBuild(benchmark::State& state) {
  const MfmHyper h{1.0, 1.0, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(VnTable::build(h));
}
BENCHMARK(BM_VnTableBuild)->Arg(51)->Arg(500)->Arg(5000);

void BM_LogmargNew(benchmark::State& state) {
  const NigHyper h = NigHyper::defaults(state.range(0));
  const Vector x1 = Vector::LinSpaced(state.range(0), -1.0, 1.0);
  const Vector x2 = Vector::Ones(3);
  const Vector eta = Vector::Constant(3, 0.5);
  double y = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(logmarg_new(y, x1, x2, eta, h));
    y += 1e-9;
  }
}
BENCHMARK(BM_LogmargNew)->Arg(2)->Arg(9);

void BM_Sweep(benchmark::State& state) {
  const LogContrastDesign d = setting_one_design();
  const SpatialGraph g = expand_neighbors(us_state_graph(), static_cast<int>(state.range(0)));
  FitConfig cfg;
  cfg.lambda = 1.0;
  const GibbsSampler sampler(d, g, cfg);
  Rng rng(1);
  ClusterState s = sampler.initial_state(rng);
  for (int i = 0; i < 50; ++i) sampler.sweep(s, rng);
  for (auto _ : state) sampler.sweep(s, rng);
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(2);

void BM_DahlSelect(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<Label> lab(0, 3);
  std::vector<std::vector<Label>> draws(static_cast<std::size_t>(state.range(0)), std::vector<Label>(51));
  for (auto& d : draws)
    for (auto& l : d) l = lab(gen);
  for (auto _ : state) benchmark::DoNotOptimize(dahl_select(draws));
}
BENCHMARK(BM_DahlSelect)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
