/*******************************************************************************
 * MIT License
 *
 * This file is part of nlevel.
 *
 * Copyright (C) 2026 nlevel contributors
 *
 * Permission is hereby granted, free of charge, to any person obtaining a copy
 * of this software and associated documentation files (the "Software"), to deal
 * in the Software without restriction, including without limitation the rights
 * to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
 * copies of the Software, and to permit persons to whom the Software is
 * furnished to do so, subject to the following conditions:
 *
 * The above copyright notice and this permission notice shall be included in all
 * copies or substantial portions of the Software.
 *
 * THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
 * IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
 * FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
 * AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
 * LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
 * OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
 * SOFTWARE.
 ******************************************************************************/

#include <gtest/gtest.h>

#include <cmath>

#include <tbb/task_arena.h>

#include "nlevel/initial_partitioner.h"
#include "nlevel/metrics.h"
#include "test_util.h"

namespace nlevel {
namespace {

TEST(PoolRule, Examples) {
  EXPECT_FALSE(pool_should_run_again(10.0, 1.0, 7));
  EXPECT_TRUE(pool_should_run_again(10.0, 2.0, 7));
  EXPECT_TRUE(pool_should_run_again(7.0, 0.0, 7)) << "runs equal to the best keep going";
}

TEST(FlatPoolStats, MeanAndSampleDeviation) {
  FlatPoolStats stats(2);
  EXPECT_EQ(stats.best(), std::numeric_limits<Weight>::max());
  stats.record(0, 4, false);
  EXPECT_TRUE(std::isinf(stats.stddev(0)));
  EXPECT_EQ(stats.best(), 4);
  stats.record(0, 6, true);
  stats.record(1, 5, true);
  EXPECT_DOUBLE_EQ(stats.mean(0), 5.0);
  EXPECT_DOUBLE_EQ(stats.stddev(0), std::sqrt(2.0));
  EXPECT_EQ(stats.best(), 5) << "balanced runs take precedence";
  EXPECT_EQ(stats.runs(1), 1u);
}

TEST(FlatAlgorithms, NamesRoundTrip) {
  for (FlatAlgorithm a : kAllFlatAlgorithms) EXPECT_EQ(parse_flat_algorithm(to_string(a)), a);
  EXPECT_THROW(parse_flat_algorithm("spectral"), InvalidInput);
}

TEST(FlatAlgorithms, ProduceCompleteBipartitions) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = testing::random_hypergraph(rng, {.max_vertices = 150, .max_nets = 300});
    const Weight half = max_block_weight(h.total_weight(), 2, 0.03);
    for (FlatAlgorithm a : kAllFlatAlgorithms) {
      Rng local(trial);
      const auto parts = run_flat_algorithm(a, h, {half, half}, local);
      ASSERT_EQ(parts.size(), h.num_vertices()) << to_string(a);
      Weight w1 = 0;
      for (VertexId v = 0; v < h.num_vertices(); ++v) {
        ASSERT_TRUE(parts[v] == 0 || parts[v] == 1) << to_string(a);
        if (parts[v] == 1) w1 += h.vertex_weight(v);
      }
      if (a != FlatAlgorithm::Random && a != FlatAlgorithm::LabelPropagation) {
        EXPECT_LE(w1, half) << to_string(a);
      }
    }
  }
}

TEST(FlatBipartitionPool, RunCountsStayWithinBounds) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto h = testing::random_hypergraph(rng, {.max_vertices = 120, .max_nets = 200});
    const Weight half = max_block_weight(h.total_weight(), 2, 0.1) + 3;
    const auto result = flat_bipartition_pool(h, {half, half}, {}, 17 + trial);
    ASSERT_EQ(result.parts.size(), h.num_vertices());
    EXPECT_TRUE(result.balanced);
    EXPECT_EQ(result.objective, connectivity_objective(h, result.parts));
    EXPECT_EQ(result.objective, result.stats.best());
    for (std::size_t a = 0; a < kAllFlatAlgorithms.size(); ++a) {
      EXPECT_GE(result.stats.runs(a), 5u);
      EXPECT_LE(result.stats.runs(a), 20u);
    }
  }
}

TEST(FlatBipartitionPool, ConstantObjectiveRunsToTheCap) {
  // No nets: every run scores 0, so mu - 2 sigma equals the best forever.
  const StaticHypergraph h(10, {});
  const auto result = flat_bipartition_pool(h, {5, 5}, {}, 1);
  for (std::size_t a = 0; a < kAllFlatAlgorithms.size(); ++a) EXPECT_EQ(result.stats.runs(a), 20u);
  EXPECT_TRUE(result.balanced);
}

TEST(FlatBipartitionPool, DeterministicOnOneThread) {
  Rng rng(8);
  const auto h = testing::random_hypergraph(rng, {.max_vertices = 150, .max_nets = 300});
  const Weight half = max_block_weight(h.total_weight(), 2, 0.03) + 2;
  tbb::task_arena arena(1);
  const auto a = arena.execute([&] { return flat_bipartition_pool(h, {half, half}, {}, 5); });
  const auto b = arena.execute([&] { return flat_bipartition_pool(h, {half, half}, {}, 5); });
  EXPECT_EQ(a.parts, b.parts);
}

TEST(AdaptedEpsilon, ComposesToTheFinalBound) {
  EXPECT_EQ(adapted_epsilon(100, 200, 1), 0.0);
  EXPECT_NEAR(adapted_epsilon(103, 200, 2), 0.03, 1e-12);
  const double eps = adapted_epsilon(103, 400, 4);
  EXPECT_NEAR((1 + eps) * (1 + eps) * 100, 103, 1e-9);
}

TEST(ExtractBlock, SplitsCutNets) {
  const StaticHypergraph h(5, {{0, 1, 2}, {2, 3}, {3, 4}, {0, 4}}, {1, 2, 3, 4}, {1, 1, 1, 2, 2});
  std::vector<VertexId> vertices;
  const auto sub = extract_block(h, {0, 0, 1, 1, 1}, 1, vertices);
  EXPECT_EQ(vertices, (std::vector<VertexId>{2, 3, 4}));
  const StaticHypergraph expected(3, {{0, 1}, {1, 2}}, {2, 3}, {1, 2, 2});
  EXPECT_TRUE(sub.structurally_equal(expected));
}

// Four clusters of 160 vertices with dense internal nets and a sparse ring
// between clusters.
StaticHypergraph four_clusters(Rng& rng) {
  const VertexId size = 160;
  std::vector<std::vector<VertexId>> nets;
  for (VertexId c = 0; c < 4; ++c) {
    for (int i = 0; i < 600; ++i) {
      std::set<VertexId> pins;
      const std::size_t k = 2 + rng() % 4;
      while (pins.size() < k) pins.insert(c * size + static_cast<VertexId>(rng() % size));
      nets.emplace_back(pins.begin(), pins.end());
    }
    for (int i = 0; i < 3; ++i) {
      nets.push_back({c * size + static_cast<VertexId>(rng() % size), ((c + 1) % 4) * size + static_cast<VertexId>(rng() % size)});
    }
  }
  return StaticHypergraph(4 * size, nets);
}

InitialPartitionConfig small_config() {
  InitialPartitionConfig config;
  config.bipartitioning.b_max = 1000;
  return config;
}

TEST(RecursiveInitialPartition, SingleBlock) {
  const auto h = testing::h0();
  EXPECT_EQ(recursive_initial_partition(h, 1, 4, small_config(), 1), (std::vector<BlockId>{0, 0, 0, 0}));
}

TEST(RecursiveInitialPartition, BisectsH0Optimally) {
  const auto h = testing::h0();
  const Weight bound = max_block_weight(h.total_weight(), 2, 0.03);
  const auto parts = recursive_initial_partition(h, 2, bound, small_config(), 1);
  EXPECT_EQ(connectivity_objective(h, parts), 1);
  EXPECT_EQ(imbalance(h, parts, 2), 0.0);
}

TEST(RecursiveInitialPartition, FindsFourClusters) {
  Rng rng(21);
  const auto h = four_clusters(rng);
  const Weight bound = max_block_weight(h.total_weight(), 4, 0.03);
  for (int threads : {1, 4}) {
    tbb::task_arena arena(threads);
    const auto parts = arena.execute([&] { return recursive_initial_partition(h, 4, bound, small_config(), 3); });
    const PartitionState state(h, 4, 0.03, parts);
    EXPECT_TRUE(validate_partition(h, state).empty());
    EXPECT_LE(connectivity_objective(h, parts), 12);
  }
}

TEST(RecursiveInitialPartition, OddBlockCountsStayBalanced) {
  Rng rng(22);
  for (BlockId k : {3, 5, 7}) {
    const auto h = testing::random_hypergraph(rng, {.max_vertices = 400, .max_nets = 600, .max_net_size = 6});
    const Weight bound = max_block_weight(h.total_weight(), k, 0.03);
    const auto parts = recursive_initial_partition(h, k, bound, small_config(), static_cast<std::uint64_t>(k));
    const PartitionState state(h, k, 0.03, parts);
    for (const auto& violation : validate_partition(h, state)) ADD_FAILURE() << "k=" << k << ": " << violation.message;
  }
}

}  // namespace
}  // namespace nlevel
