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

#pragma once

#include <array>
#include <limits>
#include <string_view>
#include <vector>

#include "nlevel/multilevel.h"
#include "nlevel/random.h"

namespace nlevel {

enum class FlatAlgorithm : std::uint8_t { Random, Bfs, LabelPropagation, NetGrowing, GreedyGrowing };
inline constexpr std::array<FlatAlgorithm, 5> kAllFlatAlgorithms = {
    FlatAlgorithm::Random, FlatAlgorithm::Bfs, FlatAlgorithm::LabelPropagation, FlatAlgorithm::NetGrowing,
    FlatAlgorithm::GreedyGrowing};

std::string_view to_string(FlatAlgorithm algorithm);
/// Parses the names printed by to_string; throws InvalidInput.
FlatAlgorithm parse_flat_algorithm(std::string_view name);

struct FlatPoolConfig {
  std::vector<FlatAlgorithm> algorithms{kAllFlatAlgorithms.begin(), kAllFlatAlgorithms.end()};
  std::size_t min_runs = 5;
  std::size_t max_runs = 20;
  /// Polish every run with LP and FM before it is scored.
  bool refine_runs = true;
  LpConfig lp;
  FmConfig fm;
};

/// Objectives of all runs per algorithm and the best balanced objective.
class FlatPoolStats {
 public:
  explicit FlatPoolStats(std::size_t algorithms = 0) : objectives_(algorithms) {}

  void record(std::size_t algorithm, Weight objective, bool balanced);
  std::size_t runs(std::size_t algorithm) const { return objectives_[algorithm].size(); }
  const std::vector<Weight>& objectives(std::size_t algorithm) const { return objectives_[algorithm]; }
  double mean(std::size_t algorithm) const;
  /// Sample standard deviation; infinity with fewer than two runs.
  double stddev(std::size_t algorithm) const;
  /// Best balanced objective so far, or the best of any run if none was
  /// balanced; max() before the first run.
  Weight best() const { return best_balanced_ != kNone ? best_balanced_ : best_any_; }

 private:
  static constexpr Weight kNone = std::numeric_limits<Weight>::max();
  std::vector<std::vector<Weight>> objectives_;
  Weight best_balanced_ = kNone;
  Weight best_any_ = kNone;
};

/// Another run is likely to improve on `best` while mu - 2 sigma <= best.
inline bool pool_should_run_again(double mean, double stddev, Weight best) {
  return mean - 2.0 * stddev <= static_cast<double>(best);
}

struct Bipartition {
  std::vector<BlockId> parts;
  Weight objective = 0;
  bool balanced = false;
  FlatPoolStats stats;
};

/// One run of a flat algorithm: a bipartition grown towards the weight
/// ratio of the two bounds, not yet rebalanced or refined.
std::vector<BlockId> run_flat_algorithm(FlatAlgorithm algorithm, const StaticHypergraph& hypergraph,
                                        const std::array<Weight, 2>& max_weights, Rng& rng);

/// Runs every algorithm at least min_runs times and repeats an algorithm
/// (up to max_runs) while it is likely to beat the best run. Returns the
/// best balanced run (lower overload breaks ties, then the earlier run).
Bipartition flat_bipartition_pool(const StaticHypergraph& hypergraph, const std::array<Weight, 2>& max_weights,
                                  const FlatPoolConfig& config, std::uint64_t seed);

struct InitialPartitionConfig {
  FlatPoolConfig pool;
  MultilevelConfig bipartitioning;  // k and bounds are set per call
};

/// Epsilon for bisecting a subhypergraph of weight `sub_weight` into k
/// blocks so that the composed bisections meet the per-block bound.
double adapted_epsilon(Weight max_block_weight, Weight sub_weight, BlockId k);

/// Vertices of `block` with the nets restricted to them; nets left with one
/// pin are dropped. `vertices` maps sub ids to ids of `hypergraph`.
StaticHypergraph extract_block(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts, BlockId block,
                               std::vector<VertexId>& vertices);

/// k-way partition by recursive multilevel bisection; the two halves are
/// independent tasks. Every block targets weight <= max_block_weight.
std::vector<BlockId> recursive_initial_partition(const StaticHypergraph& hypergraph, BlockId k,
                                                 Weight max_block_weight, const InitialPartitionConfig& config,
                                                 std::uint64_t seed);

}  // namespace nlevel
