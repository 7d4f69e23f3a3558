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

#include "nlevel/dynamic_hypergraph.h"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>
#include <sstream>

#include <tbb/parallel_for.h>

#include "nlevel/random.h"

namespace nlevel {

DynamicHypergraph::DynamicHypergraph(const StaticHypergraph& hypergraph)
    : num_vertices_(hypergraph.num_vertices()),
      num_nets_(hypergraph.num_nets()),
      total_weight_(hypergraph.total_weight()),
      weight_(hypergraph.vertex_weights()),
      contracted_(num_vertices_, 0),
      vertex_locks_(num_vertices_),
      inc_begin_(hypergraph.incidence_offsets()),
      inc_nets_(),
      markers_(hypergraph.num_pins(), 0),
      t_(num_vertices_, 0),
      active_count_(num_vertices_),
      removed_any_(num_vertices_, 0),
      member_next_(num_vertices_, kInvalidVertex),
      member_prev_(num_vertices_),
      saved_tail_(num_vertices_, kInvalidVertex),
      it_next_(num_vertices_, kInvalidVertex),
      it_prev_(num_vertices_),
      in_skip_list_(num_vertices_, 1),
      pin_begin_(hypergraph.pin_offsets()),
      pins_(),
      size_(num_nets_),
      net_weight_(hypergraph.net_weights()),
      enabled_(num_nets_, 1),
      net_locks_(num_nets_),
      restore_bit_(std::make_unique<std::atomic<bool>[]>(num_nets_)),
      restore_base_(num_nets_, 0),
      batch_of_(num_vertices_, 0) {
  inc_nets_.reserve(hypergraph.num_pins());
  for (VertexId v = 0; v < num_vertices_; ++v) {
    const auto nets = hypergraph.incident_nets(v);
    inc_nets_.insert(inc_nets_.end(), nets.begin(), nets.end());
    active_count_[v] = static_cast<std::uint32_t>(nets.size());
    member_prev_[v] = v;
    it_prev_[v] = v;
  }
  pins_.reserve(hypergraph.num_pins());
  for (NetId e = 0; e < num_nets_; ++e) {
    const auto pins = hypergraph.pins(e);
    pins_.insert(pins_.end(), pins.begin(), pins.end());
    size_[e] = static_cast<std::uint32_t>(pins.size());
    restore_bit_[e].store(false, std::memory_order_relaxed);
  }
}

VertexId DynamicHypergraph::num_active_vertices() const {
  return static_cast<VertexId>(std::ranges::count(contracted_, std::uint8_t{0}));
}

std::vector<NetId> DynamicHypergraph::incident_nets(VertexId u) const {
  std::vector<NetId> nets;
  for_each_incident_net(u, [&](NetId e) { nets.push_back(e); });
  return nets;
}

std::size_t DynamicHypergraph::current_degree(VertexId u) const {
  std::size_t degree = 0;
  for_each_incident_net(u, [&](NetId) { ++degree; });
  return degree;
}

std::vector<VertexId> DynamicHypergraph::members(VertexId u) const {
  std::vector<VertexId> result;
  for (VertexId w = u; w != kInvalidVertex; w = member_next_[w]) result.push_back(w);
  return result;
}

void DynamicHypergraph::remove_marked_entries(VertexId w, const ContractionScratch& scratch) {
  const std::uint32_t t = ++t_[w];
  const std::size_t begin = inc_begin_[w];
  std::size_t end = begin + active_count_[w];
  std::size_t i = begin;
  while (i < end) {
    if (scratch.contains(inc_nets_[i])) {
      --end;
      const NetId removed = inc_nets_[i];
      store_relaxed(inc_nets_[i], inc_nets_[end]);
      store_relaxed(inc_nets_[end], removed);
      markers_[i] = markers_[end];
      markers_[end] = t - 1;
    } else {
      markers_[i] = t;
      ++i;
    }
  }
  store_relaxed(active_count_[w], static_cast<std::uint32_t>(end - begin));
}

DynamicHypergraph::ContractionResult DynamicHypergraph::contract(VertexId u, VertexId v, Weight max_weight,
                                                                 ContractionScratch& scratch) {
  {
    std::lock_guard guard(vertex_locks_[u]);
    if (weight_[u] + weight_[v] > max_weight) return ContractionResult::WeightRejected;
    store_relaxed(weight_[u], weight_[u] + weight_[v]);
  }
  store_relaxed(contracted_[v], std::uint8_t{1});

  // Pin-list edits. L_v is owned by this thread: every contraction onto a
  // member of L_v has finished and nothing new can be registered onto v.
  scratch.reset();
  for (VertexId w = v; w != kInvalidVertex; w = member_next_[w]) {
    const std::size_t begin = inc_begin_[w];
    const std::size_t end = begin + active_count_[w];
    for (std::size_t i = begin; i < end; ++i) {
      const NetId e = inc_nets_[i];
      std::lock_guard guard(net_locks_[e]);
      VertexId* pins = pins_.data() + pin_begin_[e];
      const std::uint32_t size = size_[e];
      std::uint32_t pos_u = size;
      std::uint32_t pos_v = size;
      for (std::uint32_t j = 0; j < size; ++j) {
        if (pins[j] == u) pos_u = j;
        if (pins[j] == v) pos_v = j;
      }
      assert(pos_v < size);
      if (pos_u < size) {
        store_relaxed(pins[pos_v], pins[size - 1]);
        store_relaxed(pins[size - 1], v);
        store_relaxed(size_[e], size - 1);
        scratch.mark(e);
      } else {
        store_relaxed(pins[pos_v], u);
      }
    }
  }

  removed_any_[v] = scratch.empty() ? 0 : 1;
  if (!scratch.empty()) {
    for (VertexId w = v; w != kInvalidVertex; w = member_next_[w]) remove_marked_entries(w, scratch);
  }

  // Chain of members of L_v that still have active entries.
  VertexId chain_first = kInvalidVertex;
  VertexId chain_last = kInvalidVertex;
  for (VertexId w = v; w != kInvalidVertex; w = member_next_[w]) {
    if (active_count_[w] > 0) {
      if (chain_last == kInvalidVertex) {
        chain_first = w;
      } else {
        store_relaxed(it_next_[chain_last], w);
      }
      it_prev_[w] = chain_last;
      chain_last = w;
      in_skip_list_[w] = 1;
    } else {
      in_skip_list_[w] = 0;
    }
  }
  if (chain_last != kInvalidVertex) store_relaxed(it_next_[chain_last], kInvalidVertex);
  if (chain_first != v) store_relaxed(it_next_[v], chain_first);

  std::lock_guard guard(vertex_locks_[u]);
  const VertexId tail_u = member_prev_[u];
  const VertexId tail_v = member_prev_[v];
  saved_tail_[v] = tail_v;
  member_prev_[v] = tail_u;
  member_prev_[u] = tail_v;
  std::atomic_ref<VertexId>(member_next_[tail_u]).store(v, std::memory_order_release);

  if (chain_first != kInvalidVertex) {
    const VertexId skip_tail_u = it_prev_[u];
    it_prev_[chain_first] = skip_tail_u;
    it_prev_[u] = chain_last;
    std::atomic_ref<VertexId>(it_next_[skip_tail_u]).store(chain_first, std::memory_order_release);
  }
  return ContractionResult::Contracted;
}

void DynamicHypergraph::rebuild_skip_list(VertexId head) {
  VertexId last = head;
  in_skip_list_[head] = 1;
  for (VertexId w = member_next_[head]; w != kInvalidVertex; w = member_next_[w]) {
    if (active_count_[w] > 0) {
      store_relaxed(it_next_[last], w);
      it_prev_[w] = last;
      last = w;
      in_skip_list_[w] = 1;
    } else {
      in_skip_list_[w] = 0;
    }
  }
  store_relaxed(it_next_[last], kInvalidVertex);
  it_prev_[head] = last;
}

void DynamicHypergraph::uncontract(VertexId u, VertexId v, std::uint32_t batch, UncontractionObserver* observer,
                                   std::vector<NetId>& touched) {
  if (observer != nullptr) observer->on_begin(u, v);

  {
    std::lock_guard guard(vertex_locks_[u]);
    const VertexId tail = saved_tail_[v];
    const VertexId before = member_prev_[v];
    const VertexId after = member_next_[tail];
    member_next_[before] = after;
    if (after != kInvalidVertex) {
      member_prev_[after] = before;
    } else {
      member_prev_[u] = before;
    }
    member_next_[tail] = kInvalidVertex;
    member_prev_[v] = tail;

    for (VertexId w = v; w != kInvalidVertex; w = member_next_[w]) {
      if (!in_skip_list_[w]) continue;
      const VertexId p = it_prev_[w];
      const VertexId n = it_next_[w];
      store_relaxed(it_next_[p], n);
      if (n != kInvalidVertex) {
        it_prev_[n] = p;
      } else {
        it_prev_[u] = p;
      }
      in_skip_list_[w] = 0;
    }
  }

  const bool removed_any = removed_any_[v] != 0;
  if (removed_any) {
    for (VertexId w = v; w != kInvalidVertex; w = member_next_[w]) {
      const std::uint32_t t = --t_[w];
      const std::size_t begin = inc_begin_[w];
      std::size_t end = begin + active_count_[w];
      const std::size_t capacity_end = inc_begin_[w + 1];
      while (end < capacity_end && markers_[end] == t) ++end;
      active_count_[w] = static_cast<std::uint32_t>(end - begin);
    }
  }

  for (VertexId w = v; w != kInvalidVertex; w = member_next_[w]) {
    const std::uint32_t t = t_[w];
    const std::size_t begin = inc_begin_[w];
    const std::size_t end = begin + active_count_[w];
    for (std::size_t i = begin; i < end; ++i) {
      const NetId e = inc_nets_[i];
      std::lock_guard guard(net_locks_[e]);
      VertexId* pins = pins_.data() + pin_begin_[e];
      if (removed_any && markers_[i] == t) {
        if (!restore_bit_[e].exchange(true, std::memory_order_acq_rel)) {
          const std::uint32_t base = size_[e];
          const std::uint32_t capacity = static_cast<std::uint32_t>(net_capacity(e));
          std::uint32_t raised = base;
          while (raised < capacity && batch_of_[pins[raised]] == batch) ++raised;
          restore_base_[e] = base;
          size_[e] = raised;
          touched.push_back(e);
        }
        assert(std::find(pins, pins + size_[e], v) != pins + size_[e]);
        if (observer != nullptr) observer->on_restore(u, v, e, restore_base_[e]);
      } else {
        const std::uint32_t size = size_[e];
        std::uint32_t pos = 0;
        while (pos < size && pins[pos] != u) ++pos;
        if (pos == size) {
          throw InvariantViolation("uncontract(" + std::to_string(u) + "," + std::to_string(v) + "): net " +
                                   std::to_string(e) + " lost its representative pin");
        }
        pins[pos] = v;
        if (observer != nullptr) observer->on_replace(u, v, e);
      }
    }
  }

  rebuild_skip_list(v);
  contracted_[v] = 0;
  std::lock_guard guard(vertex_locks_[u]);
  weight_[u] -= weight_[v];
}

void DynamicHypergraph::reset_restore_bits(std::span<const NetId> nets) {
  for (NetId e : nets) restore_bit_[e].store(false, std::memory_order_relaxed);
}

RemovalRecord DynamicHypergraph::remove_identical_and_single_pin_nets() {
  RemovalRecord record;
  std::vector<std::pair<std::uint64_t, NetId>> fingerprints;
  std::vector<std::vector<VertexId>> sorted_pins(num_nets_);
  for (NetId e = 0; e < num_nets_; ++e) {
    if (!enabled_[e]) continue;
    if (size_[e] <= 1) {
      enabled_[e] = 0;
      record.removed.push_back(e);
      continue;
    }
    auto& sorted = sorted_pins[e];
    sorted.assign(pins(e).begin(), pins(e).end());
    std::ranges::sort(sorted);
    std::uint64_t hash = sorted.size();
    for (VertexId v : sorted) hash = mix_hash(hash, v);
    fingerprints.emplace_back(hash, e);
  }
  std::ranges::sort(fingerprints);
  for (std::size_t i = 0; i < fingerprints.size();) {
    std::size_t j = i;
    while (j < fingerprints.size() && fingerprints[j].first == fingerprints[i].first) ++j;
    // Within one hash bucket, greedily group exact matches; representative
    // is the lowest net id.
    for (std::size_t a = i; a < j; ++a) {
      const NetId rep = fingerprints[a].second;
      if (!enabled_[rep]) continue;
      Weight absorbed = 0;
      for (std::size_t b = a + 1; b < j; ++b) {
        const NetId other = fingerprints[b].second;
        if (enabled_[other] && sorted_pins[other] == sorted_pins[rep]) {
          enabled_[other] = 0;
          record.removed.push_back(other);
          absorbed += net_weight_[other];
        }
      }
      if (absorbed > 0) {
        record.weight_changes.emplace_back(rep, net_weight_[rep]);
        net_weight_[rep] += absorbed;
      }
    }
    i = j;
  }
  return record;
}

void DynamicHypergraph::restore(const RemovalRecord& record) {
  for (auto it = record.weight_changes.rbegin(); it != record.weight_changes.rend(); ++it) {
    net_weight_[it->first] = it->second;
  }
  for (NetId e : record.removed) enabled_[e] = 1;
}

void DynamicHypergraph::sort_inactive_pins_by_batch(std::vector<std::uint32_t> batch_of_vertex) {
  batch_of_ = std::move(batch_of_vertex);
  tbb::parallel_for(NetId{0}, num_nets_, [&](NetId e) {
    auto begin = pins_.begin() + static_cast<std::ptrdiff_t>(pin_begin_[e] + size_[e]);
    auto end = pins_.begin() + static_cast<std::ptrdiff_t>(pin_begin_[e + 1]);
    std::stable_sort(begin, end, [&](VertexId a, VertexId b) { return batch_of_[a] < batch_of_[b]; });
  });
}

StaticHypergraph DynamicHypergraph::contracted_hypergraph(std::vector<VertexId>& to_compact) const {
  to_compact.assign(num_vertices_, kInvalidVertex);
  std::vector<Weight> weights;
  for (VertexId v = 0; v < num_vertices_; ++v) {
    if (contracted_[v]) continue;
    to_compact[v] = static_cast<VertexId>(weights.size());
    weights.push_back(weight_[v]);
  }
  std::vector<std::vector<VertexId>> nets;
  std::vector<Weight> net_weights;
  for (NetId e = 0; e < num_nets_; ++e) {
    if (!enabled_[e]) continue;
    auto& net = nets.emplace_back();
    for (VertexId v : pins(e)) net.push_back(to_compact[v]);
    net_weights.push_back(net_weight_[e]);
  }
  const auto n = static_cast<VertexId>(weights.size());
  return StaticHypergraph(n, nets, std::move(net_weights), std::move(weights));
}

StaticHypergraph DynamicHypergraph::current_as_static() const {
  std::vector<std::vector<VertexId>> nets(num_nets_);
  for (NetId e = 0; e < num_nets_; ++e) nets[e].assign(pins(e).begin(), pins(e).end());
  return StaticHypergraph(num_vertices_, nets, net_weight_, weight_);
}

std::string DynamicHypergraph::check_internal_invariants() const {
  std::ostringstream problem;
  for (VertexId w = 0; w < num_vertices_; ++w) {
    const std::size_t begin = inc_begin_[w];
    const std::size_t end = inc_begin_[w + 1];
    std::size_t active = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (i > begin && markers_[i] > markers_[i - 1]) {
        problem << "markers of I_" << w << " not non-increasing";
        return problem.str();
      }
      active += markers_[i] >= t_[w];
    }
    if (active != active_count_[w]) {
      problem << "I_" << w << ": active count " << active_count_[w] << " but " << active << " markers >= t_w";
      return problem.str();
    }
  }
  std::vector<std::uint8_t> seen(num_vertices_, 0);
  for (VertexId u = 0; u < num_vertices_; ++u) {
    if (contracted_[u]) continue;
    std::vector<std::uint8_t> in_members(num_vertices_, 0);
    VertexId last = u;
    for (VertexId w = u; w != kInvalidVertex; w = member_next_[w]) {
      if (seen[w]) {
        problem << "vertex " << w << " appears in two member lists";
        return problem.str();
      }
      seen[w] = 1;
      in_members[w] = 1;
      last = w;
    }
    if (member_prev_[u] != last) {
      problem << "member list of " << u << " has stale tail pointer";
      return problem.str();
    }
    std::size_t skip_members = 0;
    for (VertexId w = u; w != kInvalidVertex; w = it_next_[w]) {
      if (!in_members[w]) {
        problem << "skip list of " << u << " contains non-member " << w;
        return problem.str();
      }
      ++skip_members;
    }
    std::size_t nonempty = 0;
    for (VertexId w = u; w != kInvalidVertex; w = member_next_[w]) nonempty += w == u || active_count_[w] > 0;
    if (nonempty != skip_members) {
      problem << "skip list of " << u << " has " << skip_members << " entries, expected " << nonempty;
      return problem.str();
    }
    std::vector<NetId> nets;
    for (VertexId w = u; w != kInvalidVertex; w = member_next_[w]) {
      for (std::size_t i = inc_begin_[w]; i < inc_begin_[w] + active_count_[w]; ++i) nets.push_back(inc_nets_[i]);
    }
    std::ranges::sort(nets);
    if (std::ranges::adjacent_find(nets) != nets.end()) {
      problem << "net appears twice in I(" << u << ")";
      return problem.str();
    }
  }
  if (std::ranges::count(seen, std::uint8_t{0}) != 0) return "member lists do not cover all vertices";
  for (NetId e = 0; e < num_nets_; ++e) {
    std::vector<VertexId> active(pins(e).begin(), pins(e).end());
    std::ranges::sort(active);
    if (std::ranges::adjacent_find(active) != active.end()) {
      problem << "net " << e << " has a duplicate active pin";
      return problem.str();
    }
    if (active.empty()) {
      problem << "net " << e << " has no active pin";
      return problem.str();
    }
  }
  return {};
}

std::string DynamicHypergraph::debug_dump() const {
  std::ostringstream out;
  for (NetId e = 0; e < num_nets_; ++e) {
    out << "net " << e << (enabled_[e] ? "" : " (disabled)") << " w=" << net_weight_[e] << " active:";
    for (VertexId v : pins(e)) out << ' ' << v;
    out << " | inactive:";
    for (std::size_t i = size_[e]; i < net_capacity(e); ++i) out << ' ' << pins_[pin_begin_[e] + i];
    out << '\n';
  }
  for (VertexId w = 0; w < num_vertices_; ++w) {
    out << "vertex " << w << " c=" << weight_[w] << " t=" << t_[w] << " I:";
    for (std::size_t i = inc_begin_[w]; i < inc_begin_[w + 1]; ++i) out << ' ' << inc_nets_[i] << '@' << markers_[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace nlevel
