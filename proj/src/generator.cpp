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

#include "nlevel/generator.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "nlevel/random.h"

namespace nlevel {

StaticHypergraph generate_netlist(const NetlistSpec& spec, std::uint64_t seed) {
  if (spec.cells < 2) throw InvalidInput("a netlist needs at least two cells");
  Rng rng(seed);
  const auto side = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(spec.cells))));
  const std::size_t max_size = std::clamp<std::size_t>(spec.max_net_size, 2, spec.cells);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<VertexId> any_cell(0, spec.cells - 1);

  const auto num_nets = static_cast<NetId>(std::llround(spec.nets_per_cell * spec.cells));
  std::vector<std::vector<VertexId>> nets;
  nets.reserve(num_nets);
  std::set<VertexId> pins;
  for (NetId e = 0; e < num_nets; ++e) {
    const double pareto = std::pow(1.0 - unit(rng), -1.0 / spec.size_shape) - 1.0;
    const std::size_t size = std::min(max_size, 2 + static_cast<std::size_t>(pareto));
    const VertexId center = any_cell(rng);
    const std::int64_t cx = center % side;
    const std::int64_t cy = center / side;
    const auto reach = std::max<std::int64_t>(1, std::llround(spec.radius * std::sqrt(static_cast<double>(size))));
    std::uniform_int_distribution<std::int64_t> offset(-reach, reach);
    pins.clear();
    pins.insert(center);
    while (pins.size() < size) {
      if (unit(rng) < spec.global_fraction) {
        pins.insert(any_cell(rng));
        continue;
      }
      const std::int64_t x = cx + offset(rng);
      const std::int64_t y = cy + offset(rng);
      if (x < 0 || y < 0 || x >= side || y >= side) continue;
      const std::int64_t cell = y * side + x;
      if (cell < spec.cells) pins.insert(static_cast<VertexId>(cell));
    }
    nets.emplace_back(pins.begin(), pins.end());
  }

  std::vector<Weight> weights(spec.cells, 1);
  std::uniform_int_distribution<Weight> macro(2, 8);
  for (auto& w : weights) {
    if (unit(rng) < spec.macro_fraction) w = macro(rng);
  }
  return StaticHypergraph(spec.cells, nets, std::vector<Weight>(nets.size(), 1), std::move(weights));
}

}  // namespace nlevel
