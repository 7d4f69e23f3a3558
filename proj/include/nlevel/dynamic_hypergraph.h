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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlevel/spinlock.h"
#include "nlevel/static_hypergraph.h"

namespace nlevel {

/// Thread-local scratch for contract(): an epoch-stamped bitset over nets
/// (the set X of nets shared by u and v).
class ContractionScratch {
 public:
  explicit ContractionScratch(NetId num_nets = 0) : stamp_(num_nets, 0) {}

  void reset() {
    if (++epoch_ == 0) {
      std::ranges::fill(stamp_, 0u);
      epoch_ = 1;
    }
    empty_ = true;
  }
  void mark(NetId e) {
    stamp_[e] = epoch_;
    empty_ = false;
  }
  bool contains(NetId e) const { return stamp_[e] == epoch_; }
  bool empty() const { return empty_; }
  std::size_t capacity() const { return stamp_.size(); }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  bool empty_ = true;
};

/// Receives the per-net case of an uncontraction while the net's lock is
/// held. The refiner implements this to keep its gain table current.
class UncontractionObserver {
 public:
  virtual ~UncontractionObserver() = default;
  /// Called before any edit; v has no block yet.
  virtual void on_begin(VertexId u, VertexId v) = 0;
  /// v replaced u in the active pins of e.
  virtual void on_replace(VertexId u, VertexId v, NetId e) = 0;
  /// v re-entered e next to u. Pins at positions < base_size were active
  /// before this batch started restoring pins of e.
  virtual void on_restore(VertexId u, VertexId v, NetId e, std::size_t base_size) = 0;
};

/// Records what remove_identical_and_single_pin_nets() did so it can be undone.
struct RemovalRecord {
  std::vector<NetId> removed;
  /// (representative net, weight before it absorbed its identical nets)
  std::vector<std::pair<NetId, Weight>> weight_changes;
};

/// Mutable hypergraph supporting concurrent single-pair contraction and
/// batched uncontraction without allocation.
///
/// Incident nets are kept per original vertex w in a fixed slot range of one
/// adjacency array. A counter t_w and per-entry markers encode which entries
/// are active (marker >= t_w, always a prefix). The current incident nets of
/// a representative u are the active entries of I_w over all w in the member
/// list L_u. Pin-lists keep an active prefix; pins removed by a contraction
/// move into the inactive suffix.
///
/// Disabled nets (single-pin or identical) stay in the structure and keep
/// receiving contraction edits; public iterators skip them.
class DynamicHypergraph {
 public:
  enum class ContractionResult { Contracted, WeightRejected };

  explicit DynamicHypergraph(const StaticHypergraph& hypergraph);

  VertexId initial_num_vertices() const { return num_vertices_; }
  NetId initial_num_nets() const { return num_nets_; }
  Weight total_weight() const { return total_weight_; }

  Weight vertex_weight(VertexId v) const { return load_relaxed(weight_[v]); }
  /// True if v is not contracted onto another vertex.
  bool is_active(VertexId v) const { return load_relaxed(contracted_[v]) == 0; }
  VertexId num_active_vertices() const;

  bool net_enabled(NetId e) const { return enabled_[e] != 0; }
  Weight net_weight(NetId e) const { return net_weight_[e]; }
  std::size_t net_size(NetId e) const { return load_relaxed(size_[e]); }
  std::size_t net_capacity(NetId e) const { return pin_begin_[e + 1] - pin_begin_[e]; }
  /// Active pins; only safe when no thread edits e concurrently.
  std::span<const VertexId> pins(NetId e) const { return {pins_.data() + pin_begin_[e], net_size(e)}; }
  /// Full slot range including the inactive suffix.
  std::span<const VertexId> all_pin_slots(NetId e) const {
    return {pins_.data() + pin_begin_[e], pins_.data() + pin_begin_[e + 1]};
  }
  VertexId pin_racy(NetId e, std::size_t i) const { return load_relaxed(pins_[pin_begin_[e] + i]); }
  SpinLock& net_lock(NetId e) { return net_locks_[e]; }

  /// Calls f(e) for every enabled net in the current I(u), each exactly once.
  /// Tolerates concurrent contractions (may then see a stale view).
  template <typename F>
  void for_each_incident_net(VertexId u, F&& f) const {
    for (VertexId w = u; w != kInvalidVertex; w = load_relaxed(it_next_[w])) {
      const std::size_t begin = inc_begin_[w];
      const std::size_t end = begin + load_relaxed(active_count_[w]);
      for (std::size_t i = begin; i < end; ++i) {
        const NetId e = load_relaxed(inc_nets_[i]);
        if (enabled_[e]) f(e);
      }
    }
  }
  std::vector<NetId> incident_nets(VertexId u) const;
  std::size_t current_degree(VertexId u) const;

  /// Member list L_u in list order (u first).
  std::vector<VertexId> members(VertexId u) const;

  /// Contracts v onto u. The caller guarantees that all contractions onto v
  /// have finished and u's own contraction has not started. Returns
  /// WeightRejected without any mutation if c(u) + c(v) > max_weight.
  ContractionResult contract(VertexId u, VertexId v, Weight max_weight, ContractionScratch& scratch);

  /// Reverts the contraction of v onto u within batch `batch`. Requires
  /// sort_inactive_pins_by_batch() to have been called with a schedule in
  /// which `batch` is v's batch. Nets whose restore bit was set are appended
  /// to `touched` for reset_restore_bits().
  void uncontract(VertexId u, VertexId v, std::uint32_t batch, UncontractionObserver* observer,
                  std::vector<NetId>& touched);

  void reset_restore_bits(std::span<const NetId> nets);

  /// Quiescent. Disables single-pin nets and all but one net of each class
  /// of identical enabled nets, whose weight becomes the class sum.
  RemovalRecord remove_identical_and_single_pin_nets();
  /// Quiescent. Undoes one removal record (records must be undone in reverse).
  void restore(const RemovalRecord& record);

  /// Quiescent. Orders each inactive suffix so that pins restored in the
  /// earliest batch sit next to the active prefix.
  void sort_inactive_pins_by_batch(std::vector<std::uint32_t> batch_of_vertex);
  std::uint32_t batch_of(VertexId v) const { return batch_of_[v]; }

  /// Contracted hypergraph: active vertices renumbered densely and enabled
  /// nets only. `to_compact[v]` is set for every active vertex.
  StaticHypergraph contracted_hypergraph(std::vector<VertexId>& to_compact) const;
  /// Every net's active pins with current weights, on the original vertex ids.
  StaticHypergraph current_as_static() const;

  // Introspection for tests and debugging.
  std::uint32_t removal_counter(VertexId w) const { return t_[w]; }
  std::size_t active_entry_count(VertexId w) const { return active_count_[w]; }
  std::span<const NetId> incidence_slots(VertexId w) const {
    return {inc_nets_.data() + inc_begin_[w], inc_nets_.data() + inc_begin_[w + 1]};
  }
  std::span<const std::uint32_t> incidence_markers(VertexId w) const {
    return {markers_.data() + inc_begin_[w], markers_.data() + inc_begin_[w + 1]};
  }
  /// Checks marker order, member-list integrity and the skip list; returns
  /// a description of the first problem found or an empty string.
  std::string check_internal_invariants() const;
  /// Per-net active/inactive pins and per-vertex (t_w, markers) table.
  std::string debug_dump() const;

 private:
  void remove_marked_entries(VertexId w, const ContractionScratch& scratch);
  void rebuild_skip_list(VertexId head);

  VertexId num_vertices_;
  NetId num_nets_;
  Weight total_weight_;

  // vertices
  std::vector<Weight> weight_;
  std::vector<std::uint8_t> contracted_;
  SpinLockArray vertex_locks_;

  // incident net arrays
  std::vector<std::size_t> inc_begin_;
  std::vector<NetId> inc_nets_;
  std::vector<std::uint32_t> markers_;
  std::vector<std::uint32_t> t_;
  std::vector<std::uint32_t> active_count_;
  std::vector<std::uint8_t> removed_any_;

  // member lists L_u; the head's prev points at the tail
  std::vector<VertexId> member_next_;
  std::vector<VertexId> member_prev_;
  std::vector<VertexId> saved_tail_;
  // skip list over members with at least one active entry (head always in)
  std::vector<VertexId> it_next_;
  std::vector<VertexId> it_prev_;
  std::vector<std::uint8_t> in_skip_list_;

  // pin-lists
  std::vector<std::size_t> pin_begin_;
  std::vector<VertexId> pins_;
  std::vector<std::uint32_t> size_;
  std::vector<Weight> net_weight_;
  std::vector<std::uint8_t> enabled_;
  SpinLockArray net_locks_;
  std::unique_ptr<std::atomic<bool>[]> restore_bit_;
  std::vector<std::uint32_t> restore_base_;
  std::vector<std::uint32_t> batch_of_;
};

}  // namespace nlevel
