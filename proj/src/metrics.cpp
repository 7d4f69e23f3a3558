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

#include "nlevel/metrics.h"

#include <algorithm>
#include <cmath>

namespace nlevel {

namespace {

void require_assigned(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts) {
  if (parts.size() != hypergraph.num_vertices()) throw InvalidInput("partition size does not match vertex count");
  for (VertexId v = 0; v < parts.size(); ++v) {
    if (parts[v] < 0) throw InvalidInput("vertex " + std::to_string(v) + " is unassigned");
  }
}

}  // namespace

Weight max_block_weight(Weight total_weight, BlockId k, double epsilon) {
  const long double bound = (1.0L + epsilon) * static_cast<long double>(total_weight) / k;
  return static_cast<Weight>(std::floor(bound + 1e-9L));
}

PartitionState::PartitionState(const StaticHypergraph& hypergraph, BlockId k, double epsilon, std::vector<BlockId> parts)
    : k_(k),
      epsilon_(epsilon),
      max_block_weight_(nlevel::max_block_weight(hypergraph.total_weight(), k, epsilon)),
      parts_(std::move(parts)),
      pin_counts_(static_cast<std::size_t>(hypergraph.num_nets()) * k, 0),
      block_weights_(k, 0) {
  require_assigned(hypergraph, parts_);
  for (VertexId v = 0; v < hypergraph.num_vertices(); ++v) {
    if (parts_[v] >= k) throw InvalidInput("vertex " + std::to_string(v) + " assigned to block >= k");
    block_weights_[parts_[v]] += hypergraph.vertex_weight(v);
  }
  for (NetId e = 0; e < hypergraph.num_nets(); ++e) {
    for (VertexId v : hypergraph.pins(e)) ++pin_count_mutable(e, parts_[v]);
  }
}

std::vector<BlockId> PartitionState::connectivity_set(NetId e) const {
  std::vector<BlockId> blocks;
  for (BlockId i = 0; i < k_; ++i) {
    if (pin_count(e, i) > 0) blocks.push_back(i);
  }
  return blocks;
}

int PartitionState::connectivity(NetId e) const {
  int lambda = 0;
  for (BlockId i = 0; i < k_; ++i) lambda += pin_count(e, i) > 0;
  return lambda;
}

void PartitionState::move(const StaticHypergraph& hypergraph, VertexId v, BlockId to) {
  const BlockId from = parts_[v];
  if (from == to) return;
  for (NetId e : hypergraph.incident_nets(v)) {
    --pin_count_mutable(e, from);
    ++pin_count_mutable(e, to);
  }
  block_weights_[from] -= hypergraph.vertex_weight(v);
  block_weights_[to] += hypergraph.vertex_weight(v);
  parts_[v] = to;
}

Weight connectivity_objective(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts) {
  require_assigned(hypergraph, parts);
  Weight objective = 0;
  std::vector<BlockId> seen;
  for (NetId e = 0; e < hypergraph.num_nets(); ++e) {
    seen.clear();
    for (VertexId v : hypergraph.pins(e)) {
      if (std::ranges::find(seen, parts[v]) == seen.end()) seen.push_back(parts[v]);
    }
    objective += static_cast<Weight>(seen.size() - 1) * hypergraph.net_weight(e);
  }
  return objective;
}

Weight cut_objective(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts) {
  require_assigned(hypergraph, parts);
  Weight objective = 0;
  for (NetId e = 0; e < hypergraph.num_nets(); ++e) {
    const auto pins = hypergraph.pins(e);
    const BlockId first = parts[pins.front()];
    if (std::ranges::any_of(pins, [&](VertexId v) { return parts[v] != first; })) objective += hypergraph.net_weight(e);
  }
  return objective;
}

double imbalance(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts, BlockId k) {
  require_assigned(hypergraph, parts);
  std::vector<Weight> weights(k, 0);
  for (VertexId v = 0; v < hypergraph.num_vertices(); ++v) weights[parts[v]] += hypergraph.vertex_weight(v);
  const Weight heaviest = *std::ranges::max_element(weights);
  return static_cast<double>(heaviest) * k / static_cast<double>(hypergraph.total_weight()) - 1.0;
}

Gain gain(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts, VertexId u, BlockId i) {
  const BlockId from = parts[u];
  if (from == i) throw InvalidInput("gain is undefined for a move into the current block");
  Gain result = 0;
  for (NetId e : hypergraph.incident_nets(u)) {
    int in_from = 0;
    int in_target = 0;
    for (VertexId v : hypergraph.pins(e)) {
      in_from += parts[v] == from;
      in_target += parts[v] == i;
    }
    if (in_from == 1) result += hypergraph.net_weight(e);
    if (in_target == 0) result -= hypergraph.net_weight(e);
  }
  return result;
}

std::vector<Violation> validate_partition(const StaticHypergraph& hypergraph, const PartitionState& state) {
  std::vector<Violation> violations;
  const BlockId k = state.k();
  std::vector<Weight> weights(k, 0);
  bool all_assigned = true;
  for (VertexId v = 0; v < hypergraph.num_vertices(); ++v) {
    const BlockId b = state.part(v);
    if (b < 0 || b >= k) {
      violations.push_back({Violation::Kind::Unassigned, "vertex " + std::to_string(v) + " has invalid block " + std::to_string(b)});
      all_assigned = false;
      continue;
    }
    weights[b] += hypergraph.vertex_weight(v);
  }
  if (!all_assigned) return violations;

  std::vector<int> counts(k);
  for (NetId e = 0; e < hypergraph.num_nets(); ++e) {
    std::ranges::fill(counts, 0);
    for (VertexId v : hypergraph.pins(e)) ++counts[state.part(v)];
    for (BlockId i = 0; i < k; ++i) {
      if (counts[i] != state.pin_count(e, i)) {
        violations.push_back({Violation::Kind::PinCount, "net " + std::to_string(e) + " block " + std::to_string(i) +
                                                              ": stored " + std::to_string(state.pin_count(e, i)) +
                                                              ", actual " + std::to_string(counts[i])});
      }
    }
  }
  for (BlockId i = 0; i < k; ++i) {
    if (weights[i] != state.block_weight(i)) {
      violations.push_back({Violation::Kind::BlockWeight, "block " + std::to_string(i) + ": stored weight " +
                                                              std::to_string(state.block_weight(i)) + ", actual " +
                                                              std::to_string(weights[i])});
    }
    if (weights[i] > state.max_block_weight()) {
      violations.push_back({Violation::Kind::Balance, "block " + std::to_string(i) + " exceeds L_max=" +
                                                          std::to_string(state.max_block_weight()) + " by " +
                                                          std::to_string(weights[i] - state.max_block_weight())});
    }
  }
  return violations;
}

}  // namespace nlevel
