#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scc/mfm_prior.hpp"

namespace scc {
namespace {

using testing::set_partitions;

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

SpatialGraph isolated(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return SpatialGraph::from_edge_list({}, ids);
}

TEST(MfmHyper, Validation) {
  EXPECT_THROW((MfmHyper{0.0, 1.0, 3}).validate(), std::invalid_argument);
  EXPECT_THROW((MfmHyper{1.0, -1.0, 3}).validate(), std::invalid_argument);
  EXPECT_THROW((MfmHyper{1.0, 1.0, 0}).validate(), std::invalid_argument);
}

TEST(VnTable, SingleObservationIsOne) {
  const auto vn = VnTable::build({1.0, 1.0, 1});
  EXPECT_NEAR(vn.log_v(1), 0.0, 1e-12);
}

TEST(VnTable, MatchesBruteForcePartialSum) {
  const auto vn = VnTable::build({1.0, 1.0, 3}, 1e-14);
  const long double direct = testing::vn_partial_sum(3, 2, 1.0, 1.0, 100000);
  EXPECT_NEAR(vn.log_v(2), static_cast<double>(std::log(direct)), 1e-12);
}

TEST(VnTable, AgreesWithPartialSumsAcrossHyperparameters) {
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double zeta : {0.5, 1.0, 3.0}) {
      for (int n : {1, 4, 9}) {
        const auto vn = VnTable::build({gamma, zeta, static_cast<std::size_t>(n)});
        for (int w = 0; w <= n + 1; ++w) {
          const long double direct = testing::vn_partial_sum(n, w, gamma, zeta, 5000);
          EXPECT_NEAR(vn.log_v(static_cast<std::size_t>(w)), static_cast<double>(std::log(direct)), 1e-9)
              << gamma << " " << zeta << " " << n << " " << w;
        }
      }
    }
  }
}

TEST(VnTable, LastEntryExistsAndFinite) {
  const auto vn = VnTable::build({1.0, 1.0, 51});
  EXPECT_TRUE(std::isfinite(vn.log_v(52)));
  EXPECT_THROW(vn.log_v(53), std::out_of_range);
}

TEST(VnTable, DecreasingForDefaults) {
  for (std::size_t n : {2u, 5u, 51u, 500u}) {
    const auto vn = VnTable::build({1.0, 1.0, n});
    for (std::size_t w = 1; w <= n; ++w) EXPECT_LT(vn.log_v(w + 1), vn.log_v(w)) << n << " " << w;
  }
}

TEST(VnTable, LargeSampleStaysFinite) {
  const auto vn = VnTable::build({1.0, 1.0, 5000});
  EXPECT_TRUE(std::isfinite(vn.log_v(1)));
  EXPECT_TRUE(std::isfinite(vn.log_v(5001)));
}

TEST(PartitionLogPrior, SingleObservation) {
  const MfmHyper h{1.7, 1.0, 1};
  const auto vn = VnTable::build(h);
  const std::vector<Label> z{0};
  EXPECT_NEAR(partition_log_prior(z, h, vn), vn.log_v(1) + std::log(1.7), 1e-12);
}

TEST(PartitionLogPrior, SumsToOneOverAllPartitions) {
  for (int n = 1; n <= 6; ++n) {
    for (double gamma : {1.0, 0.4}) {
      const MfmHyper h{gamma, 1.0, static_cast<std::size_t>(n)};
      const auto vn = VnTable::build(h);
      std::vector<double> logp;
      for (const auto& z : set_partitions(n)) logp.push_back(partition_log_prior(z, h, vn));
      EXPECT_NEAR(std::exp(log_sum_exp(logp)), 1.0, 1e-8) << n;
    }
  }
}

TEST(PartitionLogPrior, FiveElementsHaveBellNumberPartitions) {
  EXPECT_EQ(set_partitions(3).size(), 5u);
  EXPECT_EQ(set_partitions(5).size(), 52u);
}

TEST(PartitionLogPrior, DependsOnlyOnInducedPartition) {
  const MfmHyper h{1.0, 1.0, 4};
  const auto vn = VnTable::build(h);
  const std::vector<Label> a{0, 0, 1, 2};
  const std::vector<Label> b{5, 5, 3, 0};
  EXPECT_DOUBLE_EQ(partition_log_prior(a, h, vn), partition_log_prior(b, h, vn));
}

TEST(UrnLogWeights, FirstObservationOnlyNewCluster) {
  const MfmHyper h{1.0, 1.0, 3};
  const auto vn = VnTable::build(h);
  const std::vector<Label> z{kUnassigned, kUnassigned, kUnassigned};
  const auto w = urn_log_weights(0, z, isolated(3), 0.0, h, vn);
  EXPECT_TRUE(w.existing.empty());
  EXPECT_TRUE(std::isfinite(w.new_cluster));
}

TEST(UrnLogWeights, SizesTwoAndOne) {
  const MfmHyper h{1.0, 1.0, 4};
  const auto vn = VnTable::build(h);
  const std::vector<Label> z{0, 0, 1, kUnassigned};
  const auto w = urn_log_weights(3, z, isolated(4), 0.0, h, vn);
  ASSERT_EQ(w.existing.size(), 2u);
  EXPECT_NEAR(w.existing[0], std::log(3.0), 1e-14);
  EXPECT_NEAR(w.existing[1], std::log(2.0), 1e-14);
  EXPECT_NEAR(w.new_cluster, vn.log_v(3) - vn.log_v(2), 1e-14);
}

TEST(UrnLogWeights, NeighborFactor) {
  const MfmHyper h{1.0, 1.0, 4};
  const auto vn = VnTable::build(h);
  const std::vector<Edge> edges{{"0", "3"}};
  const auto g = SpatialGraph::from_edge_list(edges, {"0", "1", "2", "3"});
  const std::vector<Label> z{0, 0, 1, kUnassigned};
  const auto base = urn_log_weights(3, z, g, 0.0, h, vn);
  const auto smooth = urn_log_weights(3, z, g, 2.0, h, vn);
  EXPECT_NEAR(smooth.existing[0] - base.existing[0], 2.0, 1e-14);
  EXPECT_EQ(smooth.existing[1], base.existing[1]);
  EXPECT_EQ(smooth.new_cluster, base.new_cluster);
}

TEST(UrnLogWeights, MonotoneInLambdaForNeighborClusters) {
  const MfmHyper h{1.0, 1.0, 5};
  const auto vn = VnTable::build(h);
  const auto g = testing::path_graph(5);
  const std::vector<Label> z{0, 1, kUnassigned, 1, 2};
  double previous = -INFINITY;
  for (double lambda : {0.0, 0.5, 1.0, 4.0}) {
    const auto w = urn_log_weights(2, z, g, lambda, h, vn);
    EXPECT_GE(w.existing[1], previous);
    previous = w.existing[1];
  }
}

TEST(UrnLogWeights, LabelSymmetry) {
  const MfmHyper h{1.0, 1.0, 5};
  const auto vn = VnTable::build(h);
  const auto g = testing::path_graph(5);
  const std::vector<Label> a{0, 0, kUnassigned, 1, 2};
  const std::vector<Label> b{2, 2, kUnassigned, 0, 1};
  const auto wa = urn_log_weights(2, a, g, 1.3, h, vn);
  const auto wb = urn_log_weights(2, b, g, 1.3, h, vn);
  // Label 0 in `a` is label 2 in `b`, and so on.
  EXPECT_DOUBLE_EQ(wa.existing[0], wb.existing[2]);
  EXPECT_DOUBLE_EQ(wa.existing[1], wb.existing[0]);
  EXPECT_DOUBLE_EQ(wa.existing[2], wb.existing[1]);
  EXPECT_DOUBLE_EQ(wa.new_cluster, wb.new_cluster);
}

// Seating observations one at a time, with the table for the current prefix
// size, reproduces the partition probability.
TEST(UrnLogWeights, SequentialUrnReproducesPartitionPrior) {
  for (int n = 1; n <= 5; ++n) {
    const MfmHyper full{1.0, 1.0, static_cast<std::size_t>(n)};
    const auto vn_full = VnTable::build(full);
    const auto g = isolated(static_cast<std::size_t>(n));
    for (const auto& z : set_partitions(n)) {
      double log_p = 0.0;
      std::vector<Label> prefix(static_cast<std::size_t>(n), kUnassigned);
      for (int m = 0; m < n; ++m) {
        const MfmHyper h{1.0, 1.0, static_cast<std::size_t>(m + 1)};
        const auto vn = VnTable::build(h);
        const auto w = urn_log_weights(static_cast<std::size_t>(m), prefix, g, 0.0, h, vn);
        std::vector<double> all = w.existing;
        all.push_back(w.new_cluster);
        const auto label = static_cast<std::size_t>(z[static_cast<std::size_t>(m)]);
        log_p += all[std::min(label, w.existing.size())] - log_sum_exp(all);
        prefix[static_cast<std::size_t>(m)] = z[static_cast<std::size_t>(m)];
      }
      EXPECT_NEAR(std::exp(log_p), std::exp(partition_log_prior(z, full, vn_full)), 1e-8);
    }
  }
}

}  // namespace
}  // namespace scc
