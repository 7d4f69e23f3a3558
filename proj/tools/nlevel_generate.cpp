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

// Writes a synthetic netlist-like hypergraph in hMetis format.

#include <iostream>

#include "CLI11.hpp"
#include "nlevel/generator.h"
#include "nlevel/hmetis_io.h"

int main(int argc, char** argv) {
  nlevel::NetlistSpec spec;
  std::uint64_t seed = 1;
  std::string output;

  CLI::App app{"Synthetic netlist generator (hMetis output)"};
  app.option_defaults()->always_capture_default();
  app.add_option("--output", output, "output path")->required();
  app.add_option("--seed", seed, "random seed");
  app.add_option("--cells", spec.cells, "number of cells")->check(CLI::Range(2u, 100000000u));
  app.add_option("--nets-per-cell", spec.nets_per_cell, "nets per cell");
  app.add_option("--size-shape", spec.size_shape, "Pareto shape of the net size distribution");
  app.add_option("--max-net-size", spec.max_net_size, "net size cap");
  app.add_option("--radius", spec.radius, "locality radius");
  app.add_option("--global-fraction", spec.global_fraction, "fraction of non-local pins");
  app.add_option("--macro-fraction", spec.macro_fraction, "fraction of heavy cells");
  CLI11_PARSE(app, argc, argv);

  try {
    nlevel::io::save_hmetis(nlevel::generate_netlist(spec, seed), output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
