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

#include <cmath>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <tbb/enumerable_thread_specific.h>

#include "nlevel/coarsener.h"
#include "nlevel/partitioned_hypergraph.h"

namespace nlevel {

struct LpConfig {
  std::size_t max_rounds = 5;
};

struct FmConfig {
  std::size_t seeds_per_search = 25;
  /// Hard cap on moves per search; also the fallback if the adaptive rule
  /// is switched off.
  std::size_t max_moves_per_search = 350;
  bool adaptive_stop = true;
  double alpha = 1.0;
  std::size_t max_rounds = 1;
  /// Nets with more pins are not used to expand a search.
  std::size_t max_expansion_net_size = 1000;
};

struct Move {
  VertexId vertex;
  BlockId from;
  BlockId to;
  Gain gain;
};

struct RefinementStats {
  Gain improvement = 0;
  std::size_t moves = 0;
};

/// Random-walk model of a local search: with mean mu and variance s^2 of the
/// gains since the last improvement after p steps, stop once p > beta and
/// p * mu^2 >= (alpha / 2 - 1/4) * s^2, or mu = 0.
class AdaptiveStoppingRule {
 public:
  explicit AdaptiveStoppingRule(double alpha = 1.0) : stop_factor_(alpha / 2.0 - 0.25) {}
  void update(Gain gain);
  void reset() { steps_ = 0, mean_ = 0.0, sum_sq_ = 0.0, variance_ = 0.0; }
  bool should_stop(double beta) const;

 private:
  double stop_factor_;
  std::size_t steps_ = 0;
  double mean_ = 0.0;
  double sum_sq_ = 0.0;
  double variance_ = 0.0;
};

/// Parallel label propagation: every seed moves to its best feasible block
/// if the gain is strictly positive at application time.
class LabelPropagationRefiner {
 public:
  LabelPropagationRefiner(PartitionedHypergraph& phg, LpConfig config) : phg_(phg), config_(config) {}
  RefinementStats refine(std::span<const VertexId> seeds, std::uint64_t seed);

 private:
  PartitionedHypergraph& phg_;
  LpConfig config_;
};

/// Localized parallel FM. Searches claim vertices, apply moves directly to
/// the shared partition and keep their best local prefix. After a round the
/// global move log is replayed sequentially and only its best prefix that
/// keeps the balance is kept.
class FmRefiner {
 public:
  FmRefiner(PartitionedHypergraph& phg, FmConfig config);
  ~FmRefiner();

  RefinementStats refine(std::span<const VertexId> seeds, std::uint64_t seed);
  /// Moves of the last round's global log in commit order (before replay).
  const std::vector<Move>& last_round_log() const { return log_; }
  /// Controls the beta = ln(n) term of the stopping rule.
  void set_num_vertices(std::size_t n) { stop_beta_ = std::log(static_cast<double>(std::max<std::size_t>(n, 2))); }

 private:
  struct Workspace;
  void run_search(std::span<const VertexId> seeds, Workspace& ws);
  Gain apply_best_global_prefix(const std::vector<Weight>& weights_before);

  PartitionedHypergraph& phg_;
  FmConfig config_;
  double stop_beta_;
  std::unique_ptr<std::atomic<std::uint32_t>[]> claim_;
  std::atomic<std::uint32_t> next_search_id_{1};
  std::mutex log_mutex_;
  std::vector<Move> log_;
  std::unique_ptr<tbb::enumerable_thread_specific<Workspace>> workspaces_;
};

inline RefinementStats lp_refine(PartitionedHypergraph& phg, std::span<const VertexId> seeds, LpConfig config = {},
                                 std::uint64_t seed = 0) {
  return LabelPropagationRefiner(phg, config).refine(seeds, seed);
}

inline RefinementStats fm_refine(PartitionedHypergraph& phg, std::span<const VertexId> seeds, FmConfig config = {},
                                 std::uint64_t seed = 0) {
  return FmRefiner(phg, config).refine(seeds, seed);
}

struct RefinerConfig {
  LpConfig lp;
  FmConfig fm;
  bool use_lp = true;
  bool use_fm = true;
  /// Localized refinement runs once more than beta boundary vertices have
  /// been uncontracted; 0 refines after every batch.
  std::size_t beta = 0;
  std::uint64_t seed = 0;

  static std::size_t beta_for(std::size_t b_max, std::size_t threads) { return std::max(b_max, 50 * threads); }
};

struct RefinerStats {
  std::size_t localized_calls = 0;
  std::size_t global_calls = 0;
  std::size_t lp_moves = 0;
  std::size_t fm_moves = 0;
  Gain improvement = 0;
  double lp_seconds = 0.0;
  double fm_seconds = 0.0;
};

/// Drives LP and FM during uncoarsening.
class Refiner {
 public:
  Refiner(PartitionedHypergraph& phg, RefinerConfig config);

  /// Records the boundary vertices among a batch and their representatives
  /// and refines around them once more than beta have accumulated.
  void after_batch(std::span<const VertexId> batch, const ContractionForest& forest);
  /// Flushes pending seeds, then refines over all boundary vertices.
  void after_pass();
  /// Refines around the given seeds (LP, then FM).
  void refine(std::span<const VertexId> seeds);
  void set_num_vertices(std::size_t n) { fm_.set_num_vertices(n); }

  const RefinerStats& stats() const { return stats_; }
  std::size_t pending() const { return pending_.size(); }

 private:
  void add_pending(VertexId v);

  PartitionedHypergraph& phg_;
  RefinerConfig config_;
  LabelPropagationRefiner lp_;
  FmRefiner fm_;
  std::vector<VertexId> pending_;
  std::vector<std::uint8_t> is_pending_;
  std::uint64_t calls_ = 0;
  RefinerStats stats_;
};

}  // namespace nlevel
