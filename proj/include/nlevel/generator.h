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

#include <cstdint>

#include "nlevel/static_hypergraph.h"

namespace nlevel {

/// Parameters of a synthetic netlist: cells on a square grid, nets drawn
/// around a random cell with a heavy-tailed size distribution.
struct NetlistSpec {
  VertexId cells = 10000;
  double nets_per_cell = 1.1;
  /// Nets have 2 + floor(Pareto) pins, capped at max_net_size.
  double size_shape = 1.6;
  std::size_t max_net_size = 60;
  /// Pins are drawn from a window of radius * sqrt(size) grid cells.
  double radius = 1.5;
  /// Fraction of pins placed anywhere on the grid.
  double global_fraction = 0.02;
  /// Cell weights are 1 with this fraction of cells weighing 2 to 8.
  double macro_fraction = 0.05;
};

StaticHypergraph generate_netlist(const NetlistSpec& spec, std::uint64_t seed);

}  // namespace nlevel
