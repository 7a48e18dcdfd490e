#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scc/simulation.hpp"

namespace scc {
namespace {

std::vector<std::size_t> members_of(const NamedPartition& p, Label c, const SpatialGraph& g) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.ids.size(); ++i) {
    if (p.labels[i] == c) out.push_back(*g.index_of(p.ids[i]));
  }
  return out;
}

TEST(SampleDirichlet, MeanMatchesConcentrations) {
  Rng rng(1);
  Vector alpha(3);
  alpha << 1, 3, 6;
  Vector mean = Vector::Zero(3);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    const Vector x = sample_dirichlet(alpha, rng);
    ASSERT_NEAR(x.sum(), 1.0, 1e-12);
    ASSERT_TRUE((x.array() >= 0).all());
    mean += x;
  }
  mean /= draws;
  EXPECT_NEAR(mean(0), 0.1, 0.01);
  EXPECT_NEAR(mean(1), 0.3, 0.01);
  EXPECT_NEAR(mean(2), 0.6, 0.01);
}

TEST(SampleDirichlet, FlatTwoPartMarginalIsUniform) {
  Rng rng(2);
  Vector alpha(2);
  alpha << 1, 1;
  std::vector<double> first;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) first.push_back(sample_dirichlet(alpha, rng)(0));
  // 1% critical value of the one-sample KS statistic.
  EXPECT_LT(testing::ks_statistic_uniform(first), 1.628 / std::sqrt(static_cast<double>(draws)));
}

TEST(SampleDirichlet, RejectsNonPositive) {
  Rng rng(3);
  Vector alpha(2);
  alpha << 1, 0;
  EXPECT_THROW(sample_dirichlet(alpha, rng), std::invalid_argument);
}

TEST(BuiltinPartitions, ThreeClustersEach) {
  const auto parts = builtin_partitions();
  ASSERT_EQ(parts.size(), 2u);
  const auto g = us_state_graph();
  for (const auto& p : parts) {
    EXPECT_EQ(p.cluster_count(), 3u) << p.name;
    EXPECT_EQ(p.ids.size(), 51u);
    EXPECT_EQ(std::set<std::string>(p.ids.begin(), p.ids.end()).size(), 51u);
    for (const auto& id : p.ids) EXPECT_TRUE(g.index_of(id).has_value()) << id;
  }
}

TEST(BuiltinPartitions, DisjointHasSplitCluster) {
  const auto g = us_state_graph();
  const auto p = builtin_partition("disjoint");
  std::size_t max_components = 0;
  for (Label c = 0; c < 3; ++c) max_components = std::max(max_components, connected_components(g, members_of(p, c, g)).size());
  EXPECT_GE(max_components, 2u);
}

TEST(BuiltinPartitions, ContiguousClustersConnected) {
  const auto g = us_state_graph();
  const auto p = builtin_partition("contiguous");
  for (Label c = 0; c < 3; ++c) EXPECT_EQ(connected_components(g, members_of(p, c, g)).size(), 1u) << c;
}

TEST(BuiltinPartitions, UnknownNameRejected) { EXPECT_THROW(builtin_partition("checkerboard"), InputError); }

TEST(BuiltinDesign, SettingOneParameters) {
  const auto d = builtin_design("setting1", builtin_partition("disjoint"));
  ASSERT_EQ(d.beta_tilde_per_cluster.size(), 3u);
  Vector b(3);
  b << 1, -2, 1;
  EXPECT_EQ(d.beta_tilde_per_cluster[0], b);
  b << -4, -3, 7;
  EXPECT_EQ(d.beta_tilde_per_cluster[1], b);
  b << 10, -9, -1;
  EXPECT_EQ(d.beta_tilde_per_cluster[2], b);
  Vector alpha(3);
  alpha << 1, 3, 6;
  EXPECT_EQ(d.dirichlet_alpha, alpha);
  Vector eta(3);
  eta << 1, 2, 1;
  EXPECT_EQ(d.eta, eta);
  EXPECT_EQ(d.x2_low, -1.0);
  EXPECT_EQ(d.x2_high, 1.0);
  EXPECT_EQ(d.noise_sd, 1.0);
}

TEST(BuiltinDesign, CoefficientsSumToZeroExactly) {
  for (const char* s : {"setting1", "setting2"}) {
    const auto d = builtin_design(s, builtin_partition("contiguous"));
    for (const auto& b : d.beta_tilde_per_cluster) {
      EXPECT_EQ(b.sum(), 0.0) << s;
      EXPECT_EQ(b.size(), d.dirichlet_alpha.size());
    }
  }
  const auto d2 = builtin_design("setting2", builtin_partition("contiguous"));
  EXPECT_EQ(d2.dirichlet_alpha.size(), 10);
  EXPECT_EQ(d2.x2_low, -10.0);
  EXPECT_THROW(builtin_design("setting3", builtin_partition("contiguous")), InputError);
}

TEST(SimulationDesign, FieldLevelValidation) {
  auto d = builtin_design("setting1", builtin_partition("disjoint"));
  auto expect_field = [](const SimulationDesign& bad, const std::string& field) {
    try {
      bad.validate();
      FAIL() << field;
    } catch (const InputError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  auto bad = d;
  bad.beta_tilde_per_cluster[1](0) += 0.5;
  expect_field(bad, "beta_tilde");
  bad = d;
  bad.dirichlet_alpha(2) = 0.0;
  expect_field(bad, "dirichlet_alpha");
  bad = d;
  bad.noise_sd = -1.0;
  expect_field(bad, "noise_sd");
  bad = d;
  bad.replicates = 0;
  expect_field(bad, "replicates");
  bad = d;
  bad.x2_high = bad.x2_low - 1;
  expect_field(bad, "x2");
}

TEST(GenerateDataset, NoiselessResponseIsLinearPredictor) {
  auto d = builtin_design("setting1", builtin_partition("disjoint"));
  d.noise_sd = 0.0;
  d.seed = 5;
  const auto sim = generate_dataset(d, 0);
  const Matrix z = log_transform(sim.data.composition);
  for (Eigen::Index i = 0; i < sim.data.size(); ++i) {
    const double mean = z.row(i).dot(sim.beta_tilde.row(i)) + sim.data.covariates.row(i).dot(d.eta);
    EXPECT_NEAR(sim.data.y(i), mean, 1e-12);
  }
}

TEST(GenerateDataset, DeterministicPerReplicate) {
  auto d = builtin_design("setting2", builtin_partition("contiguous"));
  d.seed = 77;
  const auto a = generate_dataset(d, 3);
  const auto b = generate_dataset(d, 3);
  const auto c = generate_dataset(d, 4);
  EXPECT_EQ(a.data.y, b.data.y);
  EXPECT_EQ(a.data.composition.values(), b.data.composition.values());
  EXPECT_EQ(a.data.covariates, b.data.covariates);
  EXPECT_NE(a.data.y, c.data.y);
}

TEST(GenerateDataset, CovariatesInRangeAndTruthAttached) {
  auto d = builtin_design("setting2", builtin_partition("disjoint"));
  const auto sim = generate_dataset(d, 0);
  EXPECT_EQ(sim.data.covariates.cols(), 3);
  EXPECT_LE(sim.data.covariates.maxCoeff(), 10.0);
  EXPECT_GE(sim.data.covariates.minCoeff(), -10.0);
  EXPECT_EQ(sim.truth, d.partition);
  for (Eigen::Index i = 0; i < sim.beta_tilde.rows(); ++i) {
    EXPECT_EQ(sim.beta_tilde.row(i).transpose(), d.beta_tilde_per_cluster[d.partition[i]]);
  }
}

TEST(GenerateDataset, SignalAddsVariance) {
  auto d = builtin_design("setting1", builtin_partition("disjoint"));
  int ok = 0;
  for (int r = 0; r < 20; ++r) {
    const auto sim = generate_dataset(d, r);
    std::vector<double> ys;
    for (std::size_t i = 0; i < d.partition.size(); ++i)
      if (d.partition[i] == 2) ys.push_back(sim.data.y(static_cast<Eigen::Index>(i)));
    double mean = 0.0;
    for (double y : ys) mean += y;
    mean /= static_cast<double>(ys.size());
    double var = 0.0;
    for (double y : ys) var += (y - mean) * (y - mean);
    var /= static_cast<double>(ys.size() - 1);
    ok += var >= d.noise_sd * d.noise_sd;
  }
  EXPECT_GE(ok, 19);
}

}  // namespace
}  // namespace scc
