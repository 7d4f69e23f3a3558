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

#include "nlevel/coarsener.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>

#include <tbb/blocked_range.h>
#include <tbb/enumerable_thread_specific.h>
#include <tbb/parallel_for.h>

namespace nlevel {

ContractionForest::ContractionForest(VertexId n)
    : rep_(n), pending_(n, 0), start_(n, 0), end_(n, 0), pass_(n, kNoPass), child_begin_(n + 1, 0) {
  std::iota(rep_.begin(), rep_.end(), VertexId{0});
}

void ContractionForest::build_children() {
  const VertexId n = size();
  std::ranges::fill(child_begin_, 0);
  for (VertexId v = 0; v < n; ++v) {
    if (rep_[v] != v) ++child_begin_[rep_[v] + 1];
  }
  for (VertexId v = 0; v < n; ++v) child_begin_[v + 1] += child_begin_[v];
  children_.assign(child_begin_[n], kInvalidVertex);
  std::vector<std::size_t> fill(child_begin_.begin(), child_begin_.end() - 1);
  for (VertexId v = 0; v < n; ++v) {
    if (rep_[v] != v) children_[fill[rep_[v]]++] = v;
  }
  for (VertexId u = 0; u < n; ++u) {
    std::sort(children_.begin() + static_cast<std::ptrdiff_t>(child_begin_[u]),
              children_.begin() + static_cast<std::ptrdiff_t>(child_begin_[u + 1]),
              [&](VertexId a, VertexId b) { return end_[a] > end_[b]; });
  }
}

std::string ContractionForest::check_invariants() const {
  const VertexId n = size();
  std::ostringstream problem;
  // 0 = unvisited, 1 = on current path, 2 = reaches a root
  std::vector<std::uint8_t> state(n, 0);
  std::vector<VertexId> path;
  for (VertexId s = 0; s < n; ++s) {
    VertexId x = s;
    path.clear();
    while (state[x] == 0) {
      state[x] = 1;
      path.push_back(x);
      if (rep_[x] == x) break;
      x = rep_[x];
    }
    if (state[x] == 1 && rep_[x] != x) {
      problem << "cycle through vertex " << x;
      return problem.str();
    }
    for (VertexId y : path) state[y] = 2;
  }
  std::vector<Timestamp> stamps;
  for (VertexId v = 0; v < n; ++v) {
    if (pending_[v] != 0) {
      problem << "pending[" << v << "] = " << pending_[v];
      return problem.str();
    }
    if (rep_[v] == v) continue;
    if (start_[v] >= end_[v]) {
      problem << "interval of " << v << " is empty";
      return problem.str();
    }
    stamps.push_back(start_[v]);
    stamps.push_back(end_[v]);
  }
  std::ranges::sort(stamps);
  if (std::ranges::adjacent_find(stamps) != stamps.end()) return "timestamps are not unique";
  return {};
}

void ContractionForest::dump(std::ostream& out) const {
  for (VertexId v = 0; v < size(); ++v) {
    if (rep_[v] != v) out << v << ' ' << rep_[v] << ' ' << start_[v] << ' ' << end_[v] << '\n';
  }
}

CoarseningConfig CoarseningConfig::for_blocks(Weight total_weight, BlockId k, std::uint64_t seed, VertexId factor) {
  CoarseningConfig config;
  config.contraction_limit = factor * static_cast<VertexId>(std::max<BlockId>(k, 1));
  config.max_vertex_weight = std::max<Weight>(1, (total_weight + config.contraction_limit - 1) / config.contraction_limit);
  config.seed = seed;
  return config;
}

Coarsener::Coarsener(DynamicHypergraph& hypergraph, CoarseningConfig config)
    : hypergraph_(hypergraph),
      config_(config),
      forest_(hypergraph.initial_num_vertices()),
      locks_(hypergraph.initial_num_vertices()),
      started_(hypergraph.initial_num_vertices(), 0),
      num_active_(hypergraph.num_active_vertices()) {}

VertexId Coarsener::rate(VertexId u, Rng& rng, RatingMap& map) const {
  map.clear();
  hypergraph_.for_each_incident_net(u, [&](NetId e) {
    const std::size_t size = std::min(hypergraph_.net_size(e), hypergraph_.net_capacity(e));
    if (size < 2 || size > config_.max_rated_net_size) return;
    const double score = static_cast<double>(hypergraph_.net_weight(e)) / static_cast<double>(size - 1);
    for (std::size_t i = 0; i < size; ++i) {
      const VertexId v = hypergraph_.pin_racy(e, i);
      if (v != u) map.add(v, score);
    }
  });

  const Weight weight_u = hypergraph_.vertex_weight(u);
  VertexId best = kInvalidVertex;
  double best_score = 0.0;
  std::uint64_t ties = 0;
  for (VertexId v : map.keys()) {
    if (!hypergraph_.is_active(v) || !forest_.is_root(v)) continue;
    if (weight_u + hypergraph_.vertex_weight(v) > config_.max_vertex_weight) continue;
    const double score = map.score(v);
    if (best == kInvalidVertex || score > best_score) {
      best = v;
      best_score = score;
      ties = 1;
    } else if (score == best_score && rng() % ++ties == 0) {
      best = v;
    }
  }
  return best;
}

bool Coarsener::try_start(VertexId v) {
  std::lock_guard guard(locks_[v]);
  if (forest_.pending_array()[v] > 0 || started_[v]) return false;
  started_[v] = 1;
  return true;
}

void Coarsener::run_contractions(VertexId u, VertexId v, ContractionScratch& scratch, Outcome& first) {
  auto& rep = forest_.rep_array();
  auto& pending = forest_.pending_array();
  bool is_first = true;
  while (true) {
    if (!try_start(v)) {
      if (is_first) first = Outcome::Transferred;
      return;
    }
    if (before_contraction) before_contraction(u, v);
    const Timestamp s = clock_.fetch_add(1, std::memory_order_acq_rel);
    const auto result = hypergraph_.contract(u, v, config_.max_vertex_weight, scratch);
    const Timestamp e = clock_.fetch_add(1, std::memory_order_acq_rel);
    if (result == DynamicHypergraph::ContractionResult::Contracted) {
      forest_.set_interval(v, s, e);
      forest_.set_pass(v, pass_);
      applied_.fetch_add(1, std::memory_order_relaxed);
      num_active_.fetch_sub(1, std::memory_order_relaxed);
      if (is_first) first = Outcome::Applied;
    } else {
      std::lock_guard guard(locks_[v]);
      store_relaxed(rep[v], v);
      started_[v] = 0;
      weight_rejected_.fetch_add(1, std::memory_order_relaxed);
      if (is_first) first = Outcome::WeightRejected;
    }
    is_first = false;

    std::uint32_t remaining;
    VertexId parent;
    {
      std::lock_guard guard(locks_[u]);
      remaining = pending[u] - 1;
      store_relaxed(pending[u], remaining);
      parent = rep[u];
    }
    if (remaining > 0 || parent == u) return;
    v = u;
    u = parent;
  }
}

Coarsener::Outcome Coarsener::register_and_contract(VertexId u, VertexId v, ContractionScratch& scratch) {
  auto& rep = forest_.rep_array();
  auto& pending = forest_.pending_array();
  const auto discard = [&] {
    discarded_.fetch_add(1, std::memory_order_relaxed);
    return Outcome::Discarded;
  };
  if (u == v) return discard();

  locks_[v].lock();
  if (rep[v] != v) {
    locks_[v].unlock();
    return discard();
  }
  while (true) {
    while (load_relaxed(rep[u]) != u && load_relaxed(pending[u]) == 0) {
      u = load_relaxed(rep[u]);
      if (u == v) {
        locks_[v].unlock();
        return discard();
      }
    }
    if (v < u) {
      locks_[u].lock();
    } else {
      locks_[v].unlock();
      locks_[u].lock();
      locks_[v].lock();
      if (rep[v] != v) {
        locks_[v].unlock();
        locks_[u].unlock();
        return discard();
      }
    }
    if (rep[u] == u || pending[u] > 0) break;
    locks_[u].unlock();
  }

  for (VertexId x = u; load_relaxed(rep[x]) != x;) {
    x = load_relaxed(rep[x]);
    if (x == v) {
      locks_[v].unlock();
      locks_[u].unlock();
      return discard();
    }
  }
  store_relaxed(rep[v], u);
  store_relaxed(pending[u], pending[u] + 1);
  locks_[u].unlock();
  locks_[v].unlock();

  Outcome outcome = Outcome::Transferred;
  run_contractions(u, v, scratch, outcome);
  return outcome;
}

std::size_t Coarsener::coarsening_pass() {
  const VertexId n = hypergraph_.initial_num_vertices();
  std::vector<VertexId> order;
  order.reserve(n);
  for (VertexId v = 0; v < n; ++v) {
    if (hypergraph_.is_active(v)) order.push_back(v);
  }
  Rng order_rng(derive_seed(config_.seed, pass_, ~std::uint64_t{0}));
  shuffle(std::span(order), order_rng);

  const std::size_t before = applied_.load();
  const std::size_t chunk = std::max<std::size_t>(1, config_.chunk_size);
  const std::size_t chunks = (order.size() + chunk - 1) / chunk;
  tbb::enumerable_thread_specific<RatingMap> maps([&] { return RatingMap(n); });
  tbb::enumerable_thread_specific<ContractionScratch> scratches(
      [&] { return ContractionScratch(hypergraph_.initial_num_nets()); });
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, chunks, 1), [&](const tbb::blocked_range<std::size_t>& range) {
    auto& map = maps.local();
    auto& scratch = scratches.local();
    for (std::size_t c = range.begin(); c != range.end(); ++c) {
      Rng rng(derive_seed(config_.seed, pass_, c));
      const std::size_t end = std::min(order.size(), (c + 1) * chunk);
      for (std::size_t i = c * chunk; i < end; ++i) {
        if (num_active_.load(std::memory_order_relaxed) <= config_.contraction_limit) return;
        const VertexId u = order[i];
        const VertexId v = rate(u, rng, map);
        if (v != kInvalidVertex) register_and_contract(u, v, scratch);
      }
    }
  });
  return applied_.load() - before;
}

CoarseningResult Coarsener::coarsen() {
  CoarseningResult result;
  while (num_active_.load() > config_.contraction_limit) {
    const std::size_t contracted = coarsening_pass();
    if (contracted == 0) break;
    result.contractions_per_pass.push_back(contracted);
    result.removal_records.push_back(hypergraph_.remove_identical_and_single_pin_nets());
    ++pass_;
  }
  result.discarded = discarded_.load();
  result.weight_rejected = weight_rejected_.load();
  return result;
}

}  // namespace nlevel
