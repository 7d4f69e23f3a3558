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

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include <tbb/global_control.h>

#include "nlevel/random.h"
#include "nlevel/static_hypergraph.h"

namespace nlevel::testing {

// Lets task arenas run as many workers as they ask for, even on machines
// with fewer cores, so concurrency tests really interleave.
inline const tbb::global_control kParallelism(tbb::global_control::max_allowed_parallelism, 16);

// e0={v0,v1}, e1={v0,v1,v2}, e2={v2,v3}, unit weights.
inline StaticHypergraph h0() { return StaticHypergraph(4, {{0, 1}, {0, 1, 2}, {2, 3}}); }

struct RandomHypergraphSpec {
  VertexId max_vertices = 200;
  NetId max_nets = 400;
  std::size_t max_net_size = 8;
  bool weighted = true;
};

// Random hypergraph with locality so that contractions create shared nets.
inline StaticHypergraph random_hypergraph(Rng& rng, const RandomHypergraphSpec& spec = {}) {
  const VertexId n = 2 + static_cast<VertexId>(rng() % (spec.max_vertices - 1));
  const NetId m = 1 + static_cast<NetId>(rng() % spec.max_nets);
  std::vector<std::vector<VertexId>> nets(m);
  std::vector<Weight> net_weights(m, 1);
  for (NetId e = 0; e < m; ++e) {
    const std::size_t size = 1 + rng() % std::min<std::size_t>(spec.max_net_size, n);
    const VertexId center = static_cast<VertexId>(rng() % n);
    const VertexId window = std::min<VertexId>(n, static_cast<VertexId>(4 * size + 2));
    std::set<VertexId> pins;
    while (pins.size() < size) {
      const VertexId offset = static_cast<VertexId>(rng() % window);
      pins.insert((center + offset) % n);
    }
    nets[e].assign(pins.begin(), pins.end());
    if (spec.weighted) net_weights[e] = 1 + static_cast<Weight>(rng() % 3);
  }
  std::vector<Weight> vertex_weights(n, 1);
  if (spec.weighted) {
    for (auto& w : vertex_weights) w = 1 + static_cast<Weight>(rng() % 3);
  }
  return StaticHypergraph(n, nets, std::move(net_weights), std::move(vertex_weights));
}

// Naive set-based model of contractions and net removal.
class ReferenceHypergraph {
 public:
  explicit ReferenceHypergraph(const StaticHypergraph& h)
      : weights_(h.vertex_weights()), net_weights_(h.net_weights()), enabled_(h.num_nets(), true), active_(h.num_vertices(), true) {
    for (NetId e = 0; e < h.num_nets(); ++e) nets_.emplace_back(h.pins(e).begin(), h.pins(e).end());
  }

  void contract(VertexId u, VertexId v) {
    weights_[u] += weights_[v];
    active_[v] = false;
    for (auto& net : nets_) {
      if (net.erase(v) > 0) net.insert(u);
    }
  }

  void remove_identical_and_single_pin_nets() {
    std::map<std::set<VertexId>, NetId> representative;
    for (NetId e = 0; e < nets_.size(); ++e) {
      if (!enabled_[e]) continue;
      if (nets_[e].size() <= 1) {
        enabled_[e] = false;
        continue;
      }
      auto [it, inserted] = representative.emplace(nets_[e], e);
      if (!inserted) {
        enabled_[e] = false;
        net_weights_[it->second] += net_weights_[e];
      }
    }
  }

  const std::set<VertexId>& pins(NetId e) const { return nets_[e]; }
  bool enabled(NetId e) const { return enabled_[e]; }
  Weight net_weight(NetId e) const { return net_weights_[e]; }
  Weight vertex_weight(VertexId v) const { return weights_[v]; }
  bool active(VertexId v) const { return active_[v]; }
  NetId num_nets() const { return static_cast<NetId>(nets_.size()); }

 private:
  std::vector<Weight> weights_;
  std::vector<Weight> net_weights_;
  std::vector<bool> enabled_;
  std::vector<bool> active_;
  std::vector<std::set<VertexId>> nets_;
};

}  // namespace nlevel::testing
