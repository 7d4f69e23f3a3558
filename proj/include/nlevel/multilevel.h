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

#include <functional>
#include <vector>

#include "nlevel/refiner.h"
#include "nlevel/static_hypergraph.h"

namespace nlevel {

/// Partitions the coarsest hypergraph; returns one block per coarse vertex.
using CoarsePartitioner = std::function<std::vector<BlockId>(const StaticHypergraph& coarse, std::uint64_t seed)>;

struct MultilevelConfig {
  BlockId k = 2;
  std::vector<Weight> max_block_weights;
  std::uint64_t seed = 0;
  std::size_t b_max = 1000;
  /// Sizes the batch construction and the refinement threshold.
  std::size_t threads = 1;
  /// Refine after every batch (beta = 0).
  bool initial_partitioning_mode = false;
  VertexId contraction_factor = kContractionLimitFactor;
  std::size_t max_rated_net_size = 1000;
  LpConfig lp;
  FmConfig fm;
  bool use_lp = true;
  bool use_fm = true;
  /// Recount the gain table after every batch and throw on mismatch.
  bool audit = false;
};

/// Disjoint phase times in seconds; their sum is at most `total`.
struct PhaseTimes {
  double coarsening = 0.0;
  double initial_partitioning = 0.0;
  double uncontraction = 0.0;
  double lp = 0.0;
  double fm = 0.0;
  double total = 0.0;
};

struct MultilevelResult {
  std::vector<BlockId> parts;
  Weight objective = 0;
  bool balanced = true;
  PhaseTimes times;
  std::size_t levels = 0;
  std::size_t contractions = 0;
  std::size_t discarded = 0;
  std::size_t batches = 0;
  std::size_t coarse_vertices = 0;
  RefinerStats refinement;
};

/// n-level pipeline: coarsen, partition the coarsest hypergraph, then
/// uncontract batch by batch with localized refinement and one global
/// refinement per coarsening pass. Runs in the caller's task arena.
MultilevelResult multilevel_partition(const StaticHypergraph& hypergraph, const MultilevelConfig& config,
                                      const CoarsePartitioner& initial);

}  // namespace nlevel
