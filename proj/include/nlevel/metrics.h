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

#include <string>
#include <vector>

#include "nlevel/static_hypergraph.h"

namespace nlevel {

/// Block assignment plus the derived per-net pin counts and block weights,
/// always rebuilt from the assignment. This is the reference model that the
/// incremental structures in the refiner are checked against.
class PartitionState {
 public:
  PartitionState(const StaticHypergraph& hypergraph, BlockId k, double epsilon, std::vector<BlockId> parts);

  BlockId k() const { return k_; }
  double epsilon() const { return epsilon_; }
  Weight max_block_weight() const { return max_block_weight_; }
  const std::vector<BlockId>& parts() const { return parts_; }
  BlockId part(VertexId v) const { return parts_[v]; }

  int pin_count(NetId e, BlockId i) const { return pin_counts_[static_cast<std::size_t>(e) * k_ + i]; }
  int& pin_count_mutable(NetId e, BlockId i) { return pin_counts_[static_cast<std::size_t>(e) * k_ + i]; }
  std::vector<BlockId> connectivity_set(NetId e) const;
  int connectivity(NetId e) const;

  Weight block_weight(BlockId i) const { return block_weights_[i]; }
  Weight& block_weight_mutable(BlockId i) { return block_weights_[i]; }
  const std::vector<Weight>& block_weights() const { return block_weights_; }

  /// Moves v and updates pin counts and block weights.
  void move(const StaticHypergraph& hypergraph, VertexId v, BlockId to);

 private:
  BlockId k_;
  double epsilon_;
  Weight max_block_weight_;
  std::vector<BlockId> parts_;
  std::vector<int> pin_counts_;
  std::vector<Weight> block_weights_;
};

/// L_max = (1 + epsilon) * c(V) / k, floored to an integer weight.
Weight max_block_weight(Weight total_weight, BlockId k, double epsilon);

/// (lambda - 1) objective recomputed from the assignment alone.
Weight connectivity_objective(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts);
Weight cut_objective(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts);

/// max_i c(V_i) * k / c(V) - 1.
double imbalance(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts, BlockId k);

/// Exact gain of moving u to block i: the objective decrease.
Gain gain(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts, VertexId u, BlockId i);

struct Violation {
  enum class Kind { Unassigned, PinCount, BlockWeight, Balance };
  Kind kind;
  std::string message;
};

/// Checks pin counts, block weights and the balance constraint of `state`
/// against a from-scratch recount. Empty result means valid.
std::vector<Violation> validate_partition(const StaticHypergraph& hypergraph, const PartitionState& state);

}  // namespace nlevel
