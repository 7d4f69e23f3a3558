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
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nlevel/dynamic_hypergraph.h"
#include "nlevel/random.h"
#include "nlevel/spinlock.h"

namespace nlevel {

/// Representatives, pending counters and contraction intervals of every
/// vertex. rep[v] = v for roots.
class ContractionForest {
 public:
  static constexpr std::uint32_t kNoPass = std::numeric_limits<std::uint32_t>::max();

  explicit ContractionForest(VertexId n = 0);

  VertexId size() const { return static_cast<VertexId>(rep_.size()); }
  VertexId rep(VertexId v) const { return load_relaxed(rep_[v]); }
  std::uint32_t pending(VertexId v) const { return load_relaxed(pending_[v]); }
  bool is_root(VertexId v) const { return rep(v) == v; }
  Timestamp start(VertexId v) const { return start_[v]; }
  Timestamp end(VertexId v) const { return end_[v]; }
  /// Coarsening pass in which v was contracted, kNoPass for roots.
  std::uint32_t pass_of(VertexId v) const { return pass_[v]; }

  /// Children of u (vertices with rep = u), by decreasing end timestamp.
  std::span<const VertexId> children(VertexId u) const {
    return {children_.data() + child_begin_[u], children_.data() + child_begin_[u + 1]};
  }
  void build_children();

  /// Empty if the rep graph is a rooted forest with zero pending counters
  /// and sound intervals; otherwise the first problem found.
  std::string check_invariants() const;

  /// "v rep s e" per contracted vertex.
  void dump(std::ostream& out) const;

  // Raw access for the coarsener and tests that script forests by hand.
  std::vector<VertexId>& rep_array() { return rep_; }
  std::vector<std::uint32_t>& pending_array() { return pending_; }
  void set_interval(VertexId v, Timestamp s, Timestamp e) {
    start_[v] = s;
    end_[v] = e;
  }
  void set_pass(VertexId v, std::uint32_t pass) { pass_[v] = pass; }

 private:
  std::vector<VertexId> rep_;
  std::vector<std::uint32_t> pending_;
  std::vector<Timestamp> start_;
  std::vector<Timestamp> end_;
  std::vector<std::uint32_t> pass_;
  std::vector<std::size_t> child_begin_;
  std::vector<VertexId> children_;
};

struct CoarseningConfig {
  VertexId contraction_limit = 160;
  Weight max_vertex_weight = std::numeric_limits<Weight>::max();
  std::uint64_t seed = 0;
  std::size_t max_rated_net_size = 1000;
  std::size_t chunk_size = 1024;

  /// limit = factor * k, c_max = ceil(c(V) / limit).
  static CoarseningConfig for_blocks(Weight total_weight, BlockId k, std::uint64_t seed, VertexId factor = 160);
};

struct CoarseningResult {
  std::vector<RemovalRecord> removal_records;  // one per pass
  std::vector<std::size_t> contractions_per_pass;
  std::size_t discarded = 0;
  std::size_t weight_rejected = 0;
  std::uint32_t passes() const { return static_cast<std::uint32_t>(removal_records.size()); }
};

/// Thread-local scratch for rating: a sparse score map over vertices.
class RatingMap {
 public:
  explicit RatingMap(VertexId n = 0) : score_(n, 0.0) {}
  void add(VertexId v, double s) {
    if (score_[v] == 0.0) keys_.push_back(v);
    score_[v] += s;
  }
  std::span<const VertexId> keys() const { return keys_; }
  double score(VertexId v) const { return score_[v]; }
  void clear() {
    for (VertexId v : keys_) score_[v] = 0.0;
    keys_.clear();
  }
  std::size_t capacity() const { return score_.size(); }

 private:
  std::vector<double> score_;
  std::vector<VertexId> keys_;
};

/// n-level coarsening with concurrent single-pair contractions guarded by
/// the rep/pending protocol.
class Coarsener {
 public:
  enum class Outcome { Applied, Transferred, Discarded, WeightRejected };

  Coarsener(DynamicHypergraph& hypergraph, CoarseningConfig config);

  /// Heavy-edge rating; kInvalidVertex if no feasible neighbor.
  VertexId rate(VertexId u, Rng& rng, RatingMap& map) const;

  /// Registers v below u (or below u's lowest ancestor whose contraction
  /// has not started) and performs every contraction this thread becomes
  /// responsible for. Transferred: registered, but a pending contraction
  /// onto v will trigger it. WeightRejected refers to the first contraction
  /// attempted by this call.
  Outcome register_and_contract(VertexId u, VertexId v, ContractionScratch& scratch);

  /// One parallel pass over the active vertices; returns applied contractions.
  std::size_t coarsening_pass();
  /// Passes with net removal in between until the limit is reached or a
  /// pass contracts nothing.
  CoarseningResult coarsen();

  const ContractionForest& forest() const { return forest_; }
  ContractionForest& forest() { return forest_; }
  VertexId num_active_vertices() const { return num_active_.load(std::memory_order_relaxed); }
  std::uint32_t current_pass() const { return pass_; }

  /// Test hook called right before each contraction operation (u, v).
  std::function<void(VertexId, VertexId)> before_contraction;

 private:
  bool try_start(VertexId v);
  void run_contractions(VertexId u, VertexId v, ContractionScratch& scratch, Outcome& first);

  DynamicHypergraph& hypergraph_;
  CoarseningConfig config_;
  ContractionForest forest_;
  SpinLockArray locks_;
  std::vector<std::uint8_t> started_;
  std::atomic<Timestamp> clock_{0};
  std::atomic<VertexId> num_active_;
  std::atomic<std::size_t> applied_{0};
  std::atomic<std::size_t> discarded_{0};
  std::atomic<std::size_t> weight_rejected_{0};
  std::uint32_t pass_ = 0;
};

}  // namespace nlevel
