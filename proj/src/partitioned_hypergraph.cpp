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

#include "nlevel/partitioned_hypergraph.h"

#include <algorithm>
#include <mutex>
#include <sstream>

#include <tbb/enumerable_thread_specific.h>
#include <tbb/parallel_for.h>

namespace nlevel {

PartitionedHypergraph::PartitionedHypergraph(DynamicHypergraph& hypergraph, BlockId k,
                                             std::vector<Weight> max_block_weights)
    : hypergraph_(hypergraph),
      k_(k),
      max_block_weight_(std::move(max_block_weights)),
      part_(hypergraph.initial_num_vertices(), kInvalidBlock),
      block_weight_(std::make_unique<std::atomic<Weight>[]>(static_cast<std::size_t>(k))),
      phi_(static_cast<std::size_t>(hypergraph.initial_num_nets()) * k, 0),
      lambda_(hypergraph.initial_num_nets(), 0),
      b_(hypergraph.initial_num_vertices(), 0),
      p_(static_cast<std::size_t>(hypergraph.initial_num_vertices()) * k, 0),
      incident_weight_(hypergraph.initial_num_vertices(), 0) {
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (max_block_weight_.size() != static_cast<std::size_t>(k)) {
    throw InvalidInput("expected one maximum block weight per block");
  }
  for (BlockId i = 0; i < k; ++i) block_weight_[i].store(0);
}

void PartitionedHypergraph::initialize(const std::vector<BlockId>& parts) {
  const VertexId n = hypergraph_.initial_num_vertices();
  const NetId m = hypergraph_.initial_num_nets();
  std::vector<Weight> weights(k_, 0);
  for (VertexId v = 0; v < n; ++v) {
    if (!hypergraph_.is_active(v)) {
      part_[v] = kInvalidBlock;
      continue;
    }
    if (parts[v] < 0 || parts[v] >= k_) {
      throw InvalidInput("vertex " + std::to_string(v) + " has no valid block");
    }
    part_[v] = parts[v];
    weights[parts[v]] += hypergraph_.vertex_weight(v);
  }
  for (BlockId i = 0; i < k_; ++i) block_weight_[i].store(weights[i]);

  tbb::parallel_for(NetId{0}, m, [&](NetId e) {
    std::fill_n(phi_.begin() + static_cast<std::ptrdiff_t>(index(e, 0)), k_, 0);
    lambda_[e] = 0;
    if (!hypergraph_.net_enabled(e)) return;
    for (VertexId v : hypergraph_.pins(e)) {
      if (phi_[index(e, part_[v])]++ == 0) ++lambda_[e];
    }
  });
  std::fill(b_.begin(), b_.end(), 0);
  std::fill(p_.begin(), p_.end(), 0);
  std::fill(incident_weight_.begin(), incident_weight_.end(), 0);
  tbb::parallel_for(VertexId{0}, n, [&](VertexId u) {
    if (!hypergraph_.is_active(u)) return;
    Weight* p = p_.data() + static_cast<std::size_t>(u) * k_;
    hypergraph_.for_each_incident_net(u, [&](NetId e) {
      const Weight w = hypergraph_.net_weight(e);
      incident_weight_[u] += w;
      for (BlockId i = 0; i < k_; ++i) {
        if (phi_[index(e, i)] > 0) p[i] += w;
      }
      if (phi_[index(e, part_[u])] == 1) b_[u] += w;
    });
  });
}

bool PartitionedHypergraph::is_balanced() const {
  for (BlockId i = 0; i < k_; ++i) {
    if (block_weight(i) > max_block_weight_[i]) return false;
  }
  return true;
}

bool PartitionedHypergraph::is_boundary(VertexId u) const {
  const BlockId own = part(u);
  for (BlockId i = 0; i < k_; ++i) {
    if (i != own && penalty_term(u, i) > 0) return true;
  }
  return false;
}

PartitionedHypergraph::MoveResult PartitionedHypergraph::change_part(VertexId u, BlockId from, BlockId to,
                                                                     bool enforce_balance, Gain min_gain) {
  MoveResult result;
  if (from == to) return result;
  const Weight c = hypergraph_.vertex_weight(u);
  const Weight reserved = block_weight_[to].fetch_add(c, std::memory_order_relaxed) + c;
  if (enforce_balance && reserved > max_block_weight_[to]) {
    block_weight_[to].fetch_sub(c, std::memory_order_relaxed);
    return result;
  }

  static thread_local std::vector<NetId> nets;
  nets.clear();
  hypergraph_.for_each_incident_net(u, [&](NetId e) { nets.push_back(e); });
  std::sort(nets.begin(), nets.end());
  for (NetId e : nets) hypergraph_.net_lock(e).lock();

  bool rejected = part(u) != from;
  if (!rejected && min_gain != kAnyGain) {
    Gain exact = 0;
    for (NetId e : nets) {
      if (phi_[index(e, from)] == 1) exact += hypergraph_.net_weight(e);
      if (phi_[index(e, to)] == 0) exact -= hypergraph_.net_weight(e);
    }
    rejected = exact < min_gain;
  }
  if (rejected) {
    for (NetId e : nets) hypergraph_.net_lock(e).unlock();
    block_weight_[to].fetch_sub(c, std::memory_order_relaxed);
    return result;
  }
  store_relaxed(part_[u], to);
  block_weight_[from].fetch_sub(c, std::memory_order_relaxed);

  Gain delta = 0;
  for (NetId e : nets) {
    const Weight w = hypergraph_.net_weight(e);
    const int phi_from = load_relaxed(phi_[index(e, from)]) - 1;
    const int phi_to = load_relaxed(phi_[index(e, to)]) + 1;
    store_relaxed(phi_[index(e, from)], phi_from);
    store_relaxed(phi_[index(e, to)], phi_to);
    const auto pins = hypergraph_.pins(e);

    if (phi_from == 0) {
      store_relaxed(lambda_[e], load_relaxed(lambda_[e]) - 1);
      delta -= w;
      add_b(u, -w);
      for (VertexId x : pins) add_p(x, from, -w);
    } else if (phi_from == 1) {
      for (VertexId x : pins) {
        if (x != u && part(x) == from) {
          add_b(x, w);
          break;
        }
      }
    }
    if (phi_to == 1) {
      store_relaxed(lambda_[e], load_relaxed(lambda_[e]) + 1);
      delta += w;
      add_b(u, w);
      for (VertexId x : pins) add_p(x, to, w);
    } else if (phi_to == 2) {
      for (VertexId x : pins) {
        if (x != u && part(x) == to) {
          add_b(x, -w);
          break;
        }
      }
    }
  }
  for (NetId e : nets) hypergraph_.net_lock(e).unlock();

  result.applied = true;
  result.gain = -delta;
  return result;
}

Weight PartitionedHypergraph::objective() const {
  Weight total = 0;
  for (NetId e = 0; e < hypergraph_.initial_num_nets(); ++e) {
    if (hypergraph_.net_enabled(e) && lambda_[e] > 1) total += static_cast<Weight>(lambda_[e] - 1) * hypergraph_.net_weight(e);
  }
  return total;
}

void PartitionedHypergraph::add_net_contribution(NetId e, Weight weight) {
  for (VertexId x : hypergraph_.pins(e)) {
    incident_weight_[x] += weight;
    for (BlockId i = 0; i < k_; ++i) {
      if (phi_[index(e, i)] > 0) p_[static_cast<std::size_t>(x) * k_ + i] += weight;
    }
    if (phi_[index(e, part_[x])] == 1) b_[x] += weight;
  }
}

void PartitionedHypergraph::restore_removal(const RemovalRecord& record) {
  for (auto it = record.weight_changes.rbegin(); it != record.weight_changes.rend(); ++it) {
    const NetId e = it->first;
    add_net_contribution(e, it->second - hypergraph_.net_weight(e));
  }
  hypergraph_.restore(record);
  for (NetId e : record.removed) {
    std::fill_n(phi_.begin() + static_cast<std::ptrdiff_t>(index(e, 0)), k_, 0);
    lambda_[e] = 0;
    for (VertexId v : hypergraph_.pins(e)) {
      if (phi_[index(e, part_[v])]++ == 0) ++lambda_[e];
    }
    add_net_contribution(e, hypergraph_.net_weight(e));
  }
}

void PartitionedHypergraph::on_begin(VertexId u, VertexId v) {
  store_relaxed(part_[v], part(u));
  store_relaxed(b_[v], Weight{0});
  store_relaxed(incident_weight_[v], Weight{0});
  for (BlockId i = 0; i < k_; ++i) store_relaxed(p_[static_cast<std::size_t>(v) * k_ + i], Weight{0});
}

void PartitionedHypergraph::on_replace(VertexId u, VertexId v, NetId e) {
  if (!hypergraph_.net_enabled(e)) return;
  const Weight w = hypergraph_.net_weight(e);
  for (BlockId i = 0; i < k_; ++i) {
    if (phi_[index(e, i)] > 0) {
      add_p(u, i, -w);
      add_p(v, i, w);
    }
  }
  if (phi_[index(e, part(u))] == 1) {
    add_b(u, -w);
    add_b(v, w);
  }
  fetch_add_relaxed(incident_weight_[u], -w);
  fetch_add_relaxed(incident_weight_[v], w);
}

void PartitionedHypergraph::on_restore(VertexId u, VertexId v, NetId e, std::size_t base_size) {
  if (!hypergraph_.net_enabled(e)) return;
  const Weight w = hypergraph_.net_weight(e);
  const BlockId block = part(u);
  if (++phi_[index(e, block)] == 2) {
    // The single earlier pin of this block loses its credit. It sits before
    // base_size: every pin restored in this batch joins an existing block.
    const auto slots = hypergraph_.all_pin_slots(e);
    for (std::size_t i = 0; i < base_size; ++i) {
      const VertexId x = slots[i];
      if (x != v && part(x) == block) {
        add_b(x, -w);
        break;
      }
    }
  }
  for (BlockId i = 0; i < k_; ++i) {
    if (phi_[index(e, i)] > 0) add_p(v, i, w);
  }
  fetch_add_relaxed(incident_weight_[v], w);
}

std::string PartitionedHypergraph::check_consistency() const {
  std::ostringstream out;
  const VertexId n = hypergraph_.initial_num_vertices();
  const NetId m = hypergraph_.initial_num_nets();
  std::vector<Weight> weights(k_, 0);
  for (VertexId v = 0; v < n; ++v) {
    if (!hypergraph_.is_active(v)) continue;
    if (part_[v] < 0 || part_[v] >= k_) {
      out << "vertex " << v << " has no block";
      return out.str();
    }
    weights[part_[v]] += hypergraph_.vertex_weight(v);
  }
  for (BlockId i = 0; i < k_; ++i) {
    if (weights[i] != block_weight(i)) {
      out << "block " << i << " weight " << block_weight(i) << " expected " << weights[i];
      return out.str();
    }
  }
  std::vector<int> phi(k_);
  for (NetId e = 0; e < m; ++e) {
    if (!hypergraph_.net_enabled(e)) continue;
    std::fill(phi.begin(), phi.end(), 0);
    int lambda = 0;
    for (VertexId v : hypergraph_.pins(e)) {
      if (phi[part_[v]]++ == 0) ++lambda;
    }
    for (BlockId i = 0; i < k_; ++i) {
      if (phi[i] != phi_[index(e, i)]) {
        out << "pin count of net " << e << " in block " << i << " is " << phi_[index(e, i)] << " expected " << phi[i];
        return out.str();
      }
    }
    if (lambda != lambda_[e]) {
      out << "connectivity of net " << e << " is " << lambda_[e] << " expected " << lambda;
      return out.str();
    }
  }
  std::vector<Weight> p(k_);
  for (VertexId u = 0; u < n; ++u) {
    if (!hypergraph_.is_active(u)) continue;
    Weight b = 0;
    Weight incident = 0;
    std::fill(p.begin(), p.end(), 0);
    hypergraph_.for_each_incident_net(u, [&](NetId e) {
      const Weight w = hypergraph_.net_weight(e);
      incident += w;
      for (BlockId i = 0; i < k_; ++i) {
        if (phi_[index(e, i)] > 0) p[i] += w;
      }
      if (phi_[index(e, part_[u])] == 1) b += w;
    });
    if (b != b_[u]) {
      out << "b(" << u << ") is " << b_[u] << " expected " << b;
      return out.str();
    }
    if (incident != incident_weight_[u]) {
      out << "incident weight of " << u << " is " << incident_weight_[u] << " expected " << incident;
      return out.str();
    }
    for (BlockId i = 0; i < k_; ++i) {
      if (p[i] != p_[static_cast<std::size_t>(u) * k_ + i]) {
        out << "p(" << u << "," << i << ") is " << p_[static_cast<std::size_t>(u) * k_ + i] << " expected " << p[i];
        return out.str();
      }
    }
  }
  return {};
}

}  // namespace nlevel
