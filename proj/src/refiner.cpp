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

#include "nlevel/refiner.h"

#include <algorithm>
#include <atomic>
#include <chrono>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "nlevel/random.h"

namespace nlevel {

void AdaptiveStoppingRule::update(Gain gain) {
  const double g = static_cast<double>(gain);
  ++steps_;
  if (steps_ == 1) {
    mean_ = g;
    sum_sq_ = 0.0;
    variance_ = 0.0;
    return;
  }
  const double previous = mean_;
  mean_ = previous + (g - previous) / static_cast<double>(steps_);
  sum_sq_ += (g - previous) * (g - mean_);
  variance_ = sum_sq_ / static_cast<double>(steps_ - 1);
}

bool AdaptiveStoppingRule::should_stop(double beta) const {
  if (static_cast<double>(steps_) <= beta) return false;
  return mean_ == 0.0 || static_cast<double>(steps_) >= stop_factor_ * variance_ / (mean_ * mean_);
}

namespace {

struct Target {
  BlockId block = kInvalidBlock;
  Gain gain = 0;
};

// Best block other than the current one that can take u without overload.
// Ties go to the lighter block.
Target best_target(const PartitionedHypergraph& phg, VertexId u, BlockId from) {
  Target best;
  const Weight c = phg.hypergraph().vertex_weight(u);
  const Gain base = phg.benefit(u) - phg.incident_weight(u);
  for (BlockId i = 0; i < phg.k(); ++i) {
    if (i == from) continue;
    const Weight w = phg.block_weight(i);
    if (w + c > phg.max_block_weight(i)) continue;
    const Gain g = base + phg.penalty_term(u, i);
    if (best.block == kInvalidBlock || g > best.gain || (g == best.gain && w < phg.block_weight(best.block))) {
      best = {i, g};
    }
  }
  return best;
}

// Binary max-heap over vertices with a dense position index.
class IndexedHeap {
 public:
  void resize(VertexId n) { position_.assign(n, kAbsent); }
  bool empty() const { return heap_.empty(); }
  bool contains(VertexId v) const { return position_[v] != kAbsent; }
  VertexId top() const { return heap_.front().vertex; }
  Gain top_key() const { return heap_.front().key; }

  void insert(VertexId v, Gain key) {
    position_[v] = heap_.size();
    heap_.push_back({v, key});
    sift_up(heap_.size() - 1);
  }
  void update(VertexId v, Gain key) {
    const std::size_t pos = position_[v];
    const Gain old = heap_[pos].key;
    heap_[pos].key = key;
    if (key > old) {
      sift_up(pos);
    } else {
      sift_down(pos);
    }
  }
  void remove(VertexId v) {
    const std::size_t pos = position_[v];
    position_[v] = kAbsent;
    const Entry last = heap_.back();
    heap_.pop_back();
    if (pos == heap_.size()) return;
    heap_[pos] = last;
    position_[last.vertex] = pos;
    sift_up(pos);
    sift_down(position_[last.vertex]);
  }
  void clear() {
    for (const auto& entry : heap_) position_[entry.vertex] = kAbsent;
    heap_.clear();
  }

 private:
  static constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
  struct Entry {
    VertexId vertex;
    Gain key;
  };

  void place(std::size_t pos, Entry entry) {
    heap_[pos] = entry;
    position_[entry.vertex] = pos;
  }
  void sift_up(std::size_t pos) {
    const Entry entry = heap_[pos];
    while (pos > 0) {
      const std::size_t parent = (pos - 1) / 2;
      if (heap_[parent].key >= entry.key) break;
      place(pos, heap_[parent]);
      pos = parent;
    }
    place(pos, entry);
  }
  void sift_down(std::size_t pos) {
    const Entry entry = heap_[pos];
    const std::size_t n = heap_.size();
    while (true) {
      std::size_t child = 2 * pos + 1;
      if (child >= n) break;
      if (child + 1 < n && heap_[child + 1].key > heap_[child].key) ++child;
      if (heap_[child].key <= entry.key) break;
      place(pos, heap_[child]);
      pos = child;
    }
    place(pos, entry);
  }

  std::vector<Entry> heap_;
  std::vector<std::size_t> position_;
};

}  // namespace

RefinementStats LabelPropagationRefiner::refine(std::span<const VertexId> seeds, std::uint64_t seed) {
  RefinementStats stats;
  std::vector<VertexId> order(seeds.begin(), seeds.end());
  for (std::size_t round = 0; round < config_.max_rounds; ++round) {
    Rng rng(derive_seed(seed, round));
    shuffle(std::span<VertexId>(order), rng);
    std::atomic<std::size_t> moved{0};
    std::atomic<Gain> gained{0};
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, order.size(), 64), [&](const auto& range) {
      for (std::size_t i = range.begin(); i != range.end(); ++i) {
        const VertexId u = order[i];
        if (!phg_.hypergraph().is_active(u) || !phg_.is_boundary(u)) continue;
        const BlockId from = phg_.part(u);
        const Target target = best_target(phg_, u, from);
        if (target.block == kInvalidBlock || target.gain <= 0) continue;
        const auto result = phg_.change_part(u, from, target.block, true, 1);
        if (result.applied) {
          moved.fetch_add(1, std::memory_order_relaxed);
          gained.fetch_add(result.gain, std::memory_order_relaxed);
        }
      }
    });
    stats.moves += moved.load();
    stats.improvement += gained.load();
    if (moved.load() == 0) break;
  }
  return stats;
}

struct FmRefiner::Workspace {
  IndexedHeap heap;
  std::vector<std::uint8_t> committed;
  std::vector<VertexId> claimed;
  std::vector<Move> moves;
  std::vector<VertexId> round_claims;
};

FmRefiner::FmRefiner(PartitionedHypergraph& phg, FmConfig config)
    : phg_(phg),
      config_(config),
      claim_(std::make_unique<std::atomic<std::uint32_t>[]>(phg.hypergraph().initial_num_vertices())),
      workspaces_(std::make_unique<tbb::enumerable_thread_specific<Workspace>>()) {
  set_num_vertices(phg.hypergraph().initial_num_vertices());
  for (VertexId v = 0; v < phg.hypergraph().initial_num_vertices(); ++v) claim_[v].store(0, std::memory_order_relaxed);
}

FmRefiner::~FmRefiner() = default;

void FmRefiner::run_search(std::span<const VertexId> seeds, Workspace& ws) {
  const VertexId n = phg_.hypergraph().initial_num_vertices();
  if (ws.committed.size() != n) {
    ws.heap.resize(n);
    ws.committed.assign(n, 0);
  }
  const std::uint32_t id = next_search_id_.fetch_add(1, std::memory_order_relaxed);
  auto try_claim = [&](VertexId v) {
    std::uint32_t expected = 0;
    if (!claim_[v].compare_exchange_strong(expected, id, std::memory_order_acq_rel)) return false;
    ws.claimed.push_back(v);
    return true;
  };
  auto push = [&](VertexId v) {
    const Target t = best_target(phg_, v, phg_.part(v));
    if (t.block != kInvalidBlock) ws.heap.insert(v, t.gain);
  };

  ws.claimed.clear();
  ws.moves.clear();
  for (VertexId s : seeds) {
    if (phg_.hypergraph().is_active(s) && try_claim(s)) push(s);
  }

  AdaptiveStoppingRule rule(config_.alpha);
  Gain cumulative = 0;
  Gain best = 0;
  std::size_t best_length = 0;
  while (!ws.heap.empty() && ws.moves.size() < config_.max_moves_per_search) {
    const VertexId u = ws.heap.top();
    const BlockId from = phg_.part(u);
    const Target t = best_target(phg_, u, from);
    if (t.block == kInvalidBlock) {
      ws.heap.remove(u);
      continue;
    }
    if (t.gain < ws.heap.top_key()) {
      ws.heap.update(u, t.gain);
      continue;
    }
    ws.heap.remove(u);
    const auto result = phg_.change_part(u, from, t.block, true);
    if (!result.applied) continue;
    ws.moves.push_back({u, from, t.block, result.gain});
    cumulative += result.gain;
    rule.update(result.gain);
    if (cumulative > best) {
      best = cumulative;
      best_length = ws.moves.size();
      rule.reset();
    } else if (config_.adaptive_stop && rule.should_stop(stop_beta_)) {
      break;
    }

    phg_.hypergraph().for_each_incident_net(u, [&](NetId e) {
      if (phg_.hypergraph().net_size(e) > config_.max_expansion_net_size) return;
      for (VertexId x : phg_.hypergraph().pins(e)) {
        if (x == u) continue;
        if (ws.heap.contains(x)) {
          const Target tx = best_target(phg_, x, phg_.part(x));
          if (tx.block == kInvalidBlock) {
            ws.heap.remove(x);
          } else {
            ws.heap.update(x, tx.gain);
          }
        } else if (claim_[x].load(std::memory_order_relaxed) == 0 && try_claim(x)) {
          push(x);
        }
      }
    });
  }
  ws.heap.clear();

  for (std::size_t i = ws.moves.size(); i > best_length; --i) {
    const Move& m = ws.moves[i - 1];
    phg_.change_part(m.vertex, m.to, m.from, false);
  }
  if (best_length > 0) {
    std::lock_guard guard(log_mutex_);
    log_.insert(log_.end(), ws.moves.begin(), ws.moves.begin() + static_cast<std::ptrdiff_t>(best_length));
  }
  for (std::size_t i = 0; i < best_length; ++i) ws.committed[ws.moves[i].vertex] = 1;
  for (VertexId v : ws.claimed) {
    if (ws.committed[v]) {
      ws.round_claims.push_back(v);
    } else {
      claim_[v].store(0, std::memory_order_relaxed);
    }
  }
  for (std::size_t i = 0; i < best_length; ++i) ws.committed[ws.moves[i].vertex] = 0;
}

Gain FmRefiner::apply_best_global_prefix(const std::vector<Weight>& weights_before) {
  for (auto it = log_.rbegin(); it != log_.rend(); ++it) phg_.change_part(it->vertex, it->to, it->from, false);
  auto acceptable = [&] {
    for (BlockId i = 0; i < phg_.k(); ++i) {
      const Weight w = phg_.block_weight(i);
      if (w > phg_.max_block_weight(i) && w > weights_before[i]) return false;
    }
    return true;
  };
  Gain cumulative = 0;
  Gain best = 0;
  std::size_t best_length = 0;
  for (std::size_t i = 0; i < log_.size(); ++i) {
    const Move& m = log_[i];
    cumulative += phg_.change_part(m.vertex, m.from, m.to, false).gain;
    if (cumulative > best && acceptable()) {
      best = cumulative;
      best_length = i + 1;
    }
  }
  for (std::size_t i = log_.size(); i > best_length; --i) {
    const Move& m = log_[i - 1];
    phg_.change_part(m.vertex, m.to, m.from, false);
  }
  return best;
}

RefinementStats FmRefiner::refine(std::span<const VertexId> seeds, std::uint64_t seed) {
  RefinementStats stats;
  for (std::size_t round = 0; round < config_.max_rounds; ++round) {
    std::vector<VertexId> pool;
    for (VertexId v : seeds) {
      if (phg_.hypergraph().is_active(v) && phg_.is_boundary(v)) pool.push_back(v);
    }
    if (pool.empty()) break;
    Rng rng(derive_seed(seed, round, 0xf3));
    shuffle(std::span<VertexId>(pool), rng);

    std::vector<Weight> weights_before(phg_.k());
    for (BlockId i = 0; i < phg_.k(); ++i) weights_before[i] = phg_.block_weight(i);
    log_.clear();
    next_search_id_.store(1, std::memory_order_relaxed);

    std::atomic<std::size_t> next{0};
    const std::size_t per_search = std::max<std::size_t>(1, config_.seeds_per_search);
    const int workers = tbb::this_task_arena::max_concurrency();
    tbb::parallel_for(0, workers, 1, [&](int) {
      Workspace& ws = workspaces_->local();
      while (true) {
        const std::size_t begin = next.fetch_add(per_search, std::memory_order_relaxed);
        if (begin >= pool.size()) break;
        const std::size_t end = std::min(pool.size(), begin + per_search);
        run_search(std::span<const VertexId>(pool).subspan(begin, end - begin), ws);
      }
    });
    for (auto& ws : *workspaces_) {
      for (VertexId v : ws.round_claims) claim_[v].store(0, std::memory_order_relaxed);
      ws.round_claims.clear();
    }

    const Gain improvement = apply_best_global_prefix(weights_before);
    stats.improvement += improvement;
    stats.moves += log_.size();
    if (improvement <= 0) break;
  }
  return stats;
}

Refiner::Refiner(PartitionedHypergraph& phg, RefinerConfig config)
    : phg_(phg),
      config_(config),
      lp_(phg, config.lp),
      fm_(phg, config.fm),
      is_pending_(phg.hypergraph().initial_num_vertices(), 0) {}

void Refiner::add_pending(VertexId v) {
  if (is_pending_[v] || !phg_.is_boundary(v)) return;
  is_pending_[v] = 1;
  pending_.push_back(v);
}

void Refiner::after_batch(std::span<const VertexId> batch, const ContractionForest& forest) {
  for (VertexId v : batch) {
    add_pending(v);
    add_pending(forest.rep(v));
  }
  if (pending_.size() > config_.beta) {
    refine(pending_);
    ++stats_.localized_calls;
    for (VertexId v : pending_) is_pending_[v] = 0;
    pending_.clear();
  }
}

void Refiner::after_pass() {
  if (!pending_.empty()) {
    refine(pending_);
    ++stats_.localized_calls;
    for (VertexId v : pending_) is_pending_[v] = 0;
    pending_.clear();
  }
  std::vector<VertexId> boundary;
  for (VertexId v = 0; v < phg_.hypergraph().initial_num_vertices(); ++v) {
    if (phg_.hypergraph().is_active(v) && phg_.is_boundary(v)) boundary.push_back(v);
  }
  refine(boundary);
  ++stats_.global_calls;
}

void Refiner::refine(std::span<const VertexId> seeds) {
  const std::uint64_t call = calls_++;
  using Clock = std::chrono::steady_clock;
  if (config_.use_lp) {
    const auto start = Clock::now();
    const auto lp = lp_.refine(seeds, derive_seed(config_.seed, call, 1));
    stats_.lp_seconds += std::chrono::duration<double>(Clock::now() - start).count();
    stats_.lp_moves += lp.moves;
    stats_.improvement += lp.improvement;
  }
  if (config_.use_fm) {
    const auto start = Clock::now();
    const auto fm = fm_.refine(seeds, derive_seed(config_.seed, call, 2));
    stats_.fm_seconds += std::chrono::duration<double>(Clock::now() - start).count();
    stats_.fm_moves += fm.moves;
    stats_.improvement += fm.improvement;
  }
}

}  // namespace nlevel
