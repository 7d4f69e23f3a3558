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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nlevel/driver.h"
#include "nlevel/generator.h"
#include "nlevel/hmetis_io.h"
#include "nlevel/metrics.h"

namespace py = pybind11;
using namespace nlevel;

namespace {

py::dict stats_dict(const RunStats& s) {
  py::dict d;
  d["k"] = s.k;
  d["epsilon"] = s.epsilon;
  d["seed"] = s.seed;
  d["threads"] = s.threads;
  d["b_max"] = s.b_max;
  d["objective"] = s.objective;
  d["imbalance"] = s.imbalance;
  d["balanced"] = s.balanced;
  d["levels"] = s.levels;
  d["contractions"] = s.contractions;
  d["discarded"] = s.discarded;
  d["batches"] = s.batches;
  d["lp_moves"] = s.lp_moves;
  d["fm_moves"] = s.fm_moves;
  d["time_coarsening"] = s.times.coarsening;
  d["time_initial_partitioning"] = s.times.initial_partitioning;
  d["time_uncontraction"] = s.times.uncontraction;
  d["time_lp"] = s.times.lp;
  d["time_fm"] = s.times.fm;
  d["time_total"] = s.times.total;
  d["status"] = s.status;
  return d;
}

std::vector<std::vector<VertexId>> nets_of(const StaticHypergraph& h) {
  std::vector<std::vector<VertexId>> nets(h.num_nets());
  for (NetId e = 0; e < h.num_nets(); ++e) nets[e].assign(h.pins(e).begin(), h.pins(e).end());
  return nets;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parallel n-level hypergraph partitioning";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  py::class_<StaticHypergraph>(m, "Hypergraph")
      .def(py::init<VertexId, const std::vector<std::vector<VertexId>>&, std::vector<Weight>, std::vector<Weight>>(),
           py::arg("num_vertices"), py::arg("nets"), py::arg("net_weights") = std::vector<Weight>{},
           py::arg("vertex_weights") = std::vector<Weight>{})
      .def_property_readonly("num_vertices", &StaticHypergraph::num_vertices)
      .def_property_readonly("num_nets", &StaticHypergraph::num_nets)
      .def_property_readonly("num_pins", &StaticHypergraph::num_pins)
      .def_property_readonly("total_weight", &StaticHypergraph::total_weight)
      .def_property_readonly("nets", &nets_of)
      .def_property_readonly("net_weights", [](const StaticHypergraph& h) { return h.net_weights(); })
      .def_property_readonly("vertex_weights", [](const StaticHypergraph& h) { return h.vertex_weights(); })
      .def("__repr__", [](const StaticHypergraph& h) {
        return "Hypergraph(num_vertices=" + std::to_string(h.num_vertices()) + ", num_nets=" + std::to_string(h.num_nets()) + ")";
      });

  m.def("load_hmetis", [](const std::filesystem::path& path) { return io::load_hmetis(path); }, py::arg("path"));
  m.def("save_hmetis", &io::save_hmetis, py::arg("hypergraph"), py::arg("path"));

  m.def("connectivity", &connectivity_objective, py::arg("hypergraph"), py::arg("parts"),
        "Sum of (lambda(e) - 1) * w(e) over all nets.");
  m.def("imbalance", &imbalance, py::arg("hypergraph"), py::arg("parts"), py::arg("k"));

  m.def(
      "partition",
      [](const StaticHypergraph& h, BlockId k, double epsilon, std::uint64_t seed, std::size_t threads, std::size_t b_max,
         bool use_lp, bool use_fm, bool audit) {
        RunConfig config;
        config.k = k;
        config.epsilon = epsilon;
        config.seed = seed;
        config.threads = threads;
        config.b_max = b_max;
        config.use_lp = use_lp;
        config.use_fm = use_fm;
        config.audit = audit;
        PartitionResult result;
        {
          py::gil_scoped_release release;
          result = partition(h, config);
        }
        return py::make_tuple(result.parts, stats_dict(result.stats));
      },
      py::arg("hypergraph"), py::arg("k"), py::arg("epsilon") = 0.03, py::arg("seed") = 0, py::arg("threads") = 1,
      py::arg("b_max") = 1000, py::arg("use_lp") = true, py::arg("use_fm") = true, py::arg("audit") = false,
      "Returns (parts, stats). stats['balanced'] is False if no partition met the bound.");

  m.def(
      "generate_netlist",
      [](VertexId cells, std::uint64_t seed, double nets_per_cell, std::size_t max_net_size) {
        NetlistSpec spec;
        spec.cells = cells;
        spec.nets_per_cell = nets_per_cell;
        spec.max_net_size = max_net_size;
        return generate_netlist(spec, seed);
      },
      py::arg("cells"), py::arg("seed") = 1, py::arg("nets_per_cell") = 1.1, py::arg("max_net_size") = 60);
}
