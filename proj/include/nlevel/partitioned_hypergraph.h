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

#include <atomic>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "nlevel/dynamic_hypergraph.h"

namespace nlevel {

/// k-way partition of the current DynamicHypergraph with pin counts
/// Phi(e, i), connectivity lambda(e), block weights and the gain table
///   g(u, i) = b(u) - w(I(u)) + p(u, i)
/// where b(u) sums w(e) over e in I(u) with Phi(e, Pi(u)) = 1 and p(u, i)
/// sums w(e) over e in I(u) with Phi(e, i) >= 1. Only enabled nets count.
///
/// Moves lock all incident nets of the moved vertex in ascending order, so a
/// pin's block never changes while a net it belongs to is locked and every
/// move sees a consistent Phi. As an UncontractionObserver it keeps the
/// table exact during batch uncontraction.
class PartitionedHypergraph final : public UncontractionObserver {
 public:
  struct MoveResult {
    bool applied = false;
    /// Decrease of the connectivity objective caused by the move.
    Gain gain = 0;
  };

  PartitionedHypergraph(DynamicHypergraph& hypergraph, BlockId k, std::vector<Weight> max_block_weights);

  DynamicHypergraph& hypergraph() { return hypergraph_; }
  const DynamicHypergraph& hypergraph() const { return hypergraph_; }
  BlockId k() const { return k_; }

  /// Quiescent. Assigns every active vertex (parts[v] for active v) and
  /// rebuilds pin counts, block weights and gains.
  void initialize(const std::vector<BlockId>& parts);

  BlockId part(VertexId v) const { return load_relaxed(part_[v]); }
  std::vector<BlockId> parts() const { return part_; }
  Weight block_weight(BlockId i) const { return block_weight_[i].load(std::memory_order_relaxed); }
  Weight max_block_weight(BlockId i) const { return max_block_weight_[i]; }
  const std::vector<Weight>& max_block_weights() const { return max_block_weight_; }
  bool is_balanced() const;

  int pin_count(NetId e, BlockId i) const { return load_relaxed(phi_[index(e, i)]); }
  int connectivity(NetId e) const { return load_relaxed(lambda_[e]); }

  Weight benefit(VertexId u) const { return load_relaxed(b_[u]); }
  Weight incident_weight(VertexId u) const { return load_relaxed(incident_weight_[u]); }
  Weight penalty_term(VertexId u, BlockId i) const { return load_relaxed(p_[static_cast<std::size_t>(u) * k_ + i]); }
  Gain gain(VertexId u, BlockId to) const { return benefit(u) - incident_weight(u) + penalty_term(u, to); }
  /// Has an incident enabled net with connectivity > 1.
  bool is_boundary(VertexId u) const;

  static constexpr Gain kAnyGain = std::numeric_limits<Gain>::min();

  /// Moves u from `from` to `to`. With balance enforcement the move is
  /// rejected if `to` would exceed its maximum weight. The move is also
  /// rejected if its exact gain, evaluated under the net locks, is below
  /// `min_gain`.
  MoveResult change_part(VertexId u, BlockId from, BlockId to, bool enforce_balance = true, Gain min_gain = kAnyGain);

  /// Sum of (lambda(e) - 1) w(e) over enabled nets.
  Weight objective() const;

  /// Quiescent. Re-enables the nets of a removal record and adds their
  /// contributions; representative weights are reset.
  void restore_removal(const RemovalRecord& record);

  /// Quiescent. Recomputes everything from the assignment and compares.
  /// Empty string if consistent.
  std::string check_consistency() const;

  void on_begin(VertexId u, VertexId v) override;
  void on_replace(VertexId u, VertexId v, NetId e) override;
  void on_restore(VertexId u, VertexId v, NetId e, std::size_t base_size) override;

 private:
  std::size_t index(NetId e, BlockId i) const { return static_cast<std::size_t>(e) * k_ + i; }
  void add_net_contribution(NetId e, Weight weight);
  void add_p(VertexId u, BlockId i, Weight delta) { fetch_add_relaxed(p_[static_cast<std::size_t>(u) * k_ + i], delta); }
  void add_b(VertexId u, Weight delta) { fetch_add_relaxed(b_[u], delta); }

  DynamicHypergraph& hypergraph_;
  BlockId k_;
  std::vector<Weight> max_block_weight_;
  std::vector<BlockId> part_;
  std::unique_ptr<std::atomic<Weight>[]> block_weight_;
  std::vector<int> phi_;
  std::vector<int> lambda_;
  std::vector<Weight> b_;
  std::vector<Weight> p_;
  std::vector<Weight> incident_weight_;
};

}  // namespace nlevel
