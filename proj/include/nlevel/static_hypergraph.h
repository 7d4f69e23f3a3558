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

#include <span>
#include <vector>

#include "nlevel/types.h"

namespace nlevel {

/// Immutable weighted hypergraph in compressed adjacency-array form.
///
/// Pins of net e live in pins()[pin_offsets[e], pin_offsets[e+1]) and the
/// incident nets of v in incident_nets()[incidence_offsets[v], ...). Both
/// directions are built from the same net list, so they are cross-consistent
/// by construction; the constructor rejects empty nets, duplicate pins and
/// non-positive weights.
class StaticHypergraph {
 public:
  StaticHypergraph() = default;

  /// Builds from an explicit net list. Empty weight vectors mean unit weights.
  StaticHypergraph(VertexId num_vertices, const std::vector<std::vector<VertexId>>& nets,
                   std::vector<Weight> net_weights = {}, std::vector<Weight> vertex_weights = {});

  VertexId num_vertices() const { return num_vertices_; }
  NetId num_nets() const { return static_cast<NetId>(net_weights_.size()); }
  std::size_t num_pins() const { return pins_.size(); }

  std::span<const VertexId> pins(NetId e) const {
    return {pins_.data() + pin_offsets_[e], pins_.data() + pin_offsets_[e + 1]};
  }
  std::span<const NetId> incident_nets(VertexId v) const {
    return {incident_nets_.data() + incidence_offsets_[v], incident_nets_.data() + incidence_offsets_[v + 1]};
  }
  std::size_t net_size(NetId e) const { return pin_offsets_[e + 1] - pin_offsets_[e]; }
  std::size_t degree(VertexId v) const { return incidence_offsets_[v + 1] - incidence_offsets_[v]; }

  Weight net_weight(NetId e) const { return net_weights_[e]; }
  Weight vertex_weight(VertexId v) const { return vertex_weights_[v]; }
  Weight total_weight() const { return total_weight_; }

  const std::vector<std::size_t>& pin_offsets() const { return pin_offsets_; }
  const std::vector<std::size_t>& incidence_offsets() const { return incidence_offsets_; }
  const std::vector<Weight>& net_weights() const { return net_weights_; }
  const std::vector<Weight>& vertex_weights() const { return vertex_weights_; }

  /// Structural equality: same vertex count, same nets with the same pin
  /// sets (order-insensitive) and identical weights.
  bool structurally_equal(const StaticHypergraph& other) const;

 private:
  VertexId num_vertices_ = 0;
  std::vector<std::size_t> pin_offsets_{0};
  std::vector<VertexId> pins_;
  std::vector<std::size_t> incidence_offsets_{0};
  std::vector<NetId> incident_nets_;
  std::vector<Weight> net_weights_;
  std::vector<Weight> vertex_weights_;
  Weight total_weight_ = 0;
};

}  // namespace nlevel
