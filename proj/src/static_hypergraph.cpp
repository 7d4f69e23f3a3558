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

#include "nlevel/static_hypergraph.h"

#include <algorithm>
#include <string>

namespace nlevel {

StaticHypergraph::StaticHypergraph(VertexId num_vertices, const std::vector<std::vector<VertexId>>& nets,
                                   std::vector<Weight> net_weights, std::vector<Weight> vertex_weights)
    : num_vertices_(num_vertices), net_weights_(std::move(net_weights)), vertex_weights_(std::move(vertex_weights)) {
  const auto num_nets = nets.size();
  if (net_weights_.empty()) net_weights_.assign(num_nets, 1);
  if (vertex_weights_.empty()) vertex_weights_.assign(num_vertices, 1);
  if (net_weights_.size() != num_nets) throw InvalidInput("net weight count does not match net count");
  if (vertex_weights_.size() != num_vertices) throw InvalidInput("vertex weight count does not match vertex count");

  for (NetId e = 0; e < num_nets; ++e) {
    if (net_weights_[e] <= 0) throw InvalidInput("net " + std::to_string(e) + " has non-positive weight");
  }
  for (VertexId v = 0; v < num_vertices; ++v) {
    if (vertex_weights_[v] <= 0) throw InvalidInput("vertex " + std::to_string(v) + " has non-positive weight");
    total_weight_ += vertex_weights_[v];
  }

  std::vector<std::size_t> degree(num_vertices, 0);
  std::vector<NetId> last_seen(num_vertices, kInvalidNet);
  pin_offsets_.assign(num_nets + 1, 0);
  for (NetId e = 0; e < num_nets; ++e) {
    if (nets[e].empty()) throw InvalidInput("net " + std::to_string(e) + " has no pins");
    for (VertexId v : nets[e]) {
      if (v >= num_vertices) throw InvalidInput("pin " + std::to_string(v) + " of net " + std::to_string(e) + " out of range");
      if (last_seen[v] == e) throw InvalidInput("duplicate pin " + std::to_string(v) + " in net " + std::to_string(e));
      last_seen[v] = e;
      ++degree[v];
    }
    pin_offsets_[e + 1] = pin_offsets_[e] + nets[e].size();
  }

  pins_.reserve(pin_offsets_.back());
  for (const auto& net : nets) pins_.insert(pins_.end(), net.begin(), net.end());

  incidence_offsets_.assign(num_vertices + 1, 0);
  for (VertexId v = 0; v < num_vertices; ++v) incidence_offsets_[v + 1] = incidence_offsets_[v] + degree[v];
  incident_nets_.resize(pins_.size());
  std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
  for (NetId e = 0; e < num_nets; ++e) {
    for (VertexId v : pins(e)) incident_nets_[fill[v]++] = e;
  }
}

bool StaticHypergraph::structurally_equal(const StaticHypergraph& other) const {
  if (num_vertices_ != other.num_vertices_ || num_nets() != other.num_nets() ||
      net_weights_ != other.net_weights_ || vertex_weights_ != other.vertex_weights_) {
    return false;
  }
  for (NetId e = 0; e < num_nets(); ++e) {
    std::vector<VertexId> a(pins(e).begin(), pins(e).end());
    std::vector<VertexId> b(other.pins(e).begin(), other.pins(e).end());
    std::ranges::sort(a);
    std::ranges::sort(b);
    if (a != b) return false;
  }
  return true;
}

}  // namespace nlevel
