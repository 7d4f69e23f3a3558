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

#include "nlevel/multilevel.h"

#include <chrono>

#include <tbb/enumerable_thread_specific.h>
#include <tbb/parallel_for.h>

#include "nlevel/batch_builder.h"
#include "nlevel/coarsener.h"
#include "nlevel/random.h"

namespace nlevel {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

}  // namespace

MultilevelResult multilevel_partition(const StaticHypergraph& hypergraph, const MultilevelConfig& config,
                                      const CoarsePartitioner& initial) {
  const auto run_start = Clock::now();
  MultilevelResult result;
  const VertexId n = hypergraph.num_vertices();
  if (config.max_block_weights.size() != static_cast<std::size_t>(config.k)) {
    throw InvalidInput("expected one maximum block weight per block");
  }

  DynamicHypergraph dh(hypergraph);
  auto coarsening = CoarseningConfig::for_blocks(hypergraph.total_weight(), config.k, derive_seed(config.seed, 1),
                                                 config.contraction_factor);
  coarsening.max_rated_net_size = config.max_rated_net_size;
  Coarsener coarsener(dh, coarsening);

  auto start = Clock::now();
  const CoarseningResult coarse_result = coarsener.coarsen();
  auto& forest = coarsener.forest();
  forest.build_children();
  result.times.coarsening = seconds_since(start);
  result.levels = coarse_result.passes();
  for (std::size_t c : coarse_result.contractions_per_pass) result.contractions += c;
  result.discarded = coarse_result.discarded;

  start = Clock::now();
  std::vector<VertexId> to_compact;
  const StaticHypergraph coarse = dh.contracted_hypergraph(to_compact);
  result.coarse_vertices = coarse.num_vertices();
  const std::vector<BlockId> coarse_parts = initial(coarse, derive_seed(config.seed, 2));
  if (coarse_parts.size() != coarse.num_vertices()) {
    throw InvariantViolation("initial partition does not cover the coarsest hypergraph");
  }
  std::vector<BlockId> parts(n, kInvalidBlock);
  for (VertexId v = 0; v < n; ++v) {
    if (dh.is_active(v)) parts[v] = coarse_parts[to_compact[v]];
  }
  result.times.initial_partitioning = seconds_since(start);

  start = Clock::now();
  const BatchSchedule schedule = construct_batches(forest, config.b_max, std::max<std::size_t>(1, config.threads));
  dh.sort_inactive_pins_by_batch(schedule.batch_index);
  result.batches = schedule.num_batches();
  double uncontraction = seconds_since(start);

  PartitionedHypergraph phg(dh, config.k, config.max_block_weights);
  phg.initialize(parts);
  RefinerConfig refiner_config{.lp = config.lp,
                               .fm = config.fm,
                               .use_lp = config.use_lp,
                               .use_fm = config.use_fm,
                               .beta = config.initial_partitioning_mode
                                           ? 0
                                           : RefinerConfig::beta_for(config.b_max, std::max<std::size_t>(1, config.threads)),
                               .seed = derive_seed(config.seed, 3)};
  Refiner refiner(phg, refiner_config);
  std::size_t active = coarse.num_vertices();
  refiner.set_num_vertices(active);

  auto audit = [&](const char* where) {
    if (!config.audit) return;
    const std::string problem = phg.check_consistency();
    if (!problem.empty()) throw InvariantViolation(std::string(where) + ": " + problem);
  };
  audit("initial partition");

  tbb::enumerable_thread_specific<std::vector<NetId>> touched;
  std::uint32_t next_batch = 1;
  for (std::uint32_t pass = coarse_result.passes(); pass-- > 0;) {
    start = Clock::now();
    phg.restore_removal(coarse_result.removal_records[pass]);
    uncontraction += seconds_since(start);
    bool any_batch = false;
    while (next_batch <= schedule.num_batches() && schedule.batch_pass[next_batch - 1] == pass) {
      const std::uint32_t b = next_batch++;
      const auto& batch = schedule.batch(b);
      start = Clock::now();
      tbb::parallel_for(std::size_t{0}, batch.size(), [&](std::size_t i) {
        const VertexId v = batch[i];
        dh.uncontract(forest.rep(v), v, b, &phg, touched.local());
      });
      for (auto& nets : touched) {
        dh.reset_restore_bits(nets);
        nets.clear();
      }
      uncontraction += seconds_since(start);
      active += batch.size();
      refiner.set_num_vertices(active);
      audit("batch uncontraction");
      refiner.after_batch(batch, forest);
      any_batch = true;
    }
    if (any_batch) {
      refiner.after_pass();
      audit("pass refinement");
    }
  }
  if (next_batch <= schedule.num_batches()) throw InvariantViolation("batches left after the last pass");

  result.parts = phg.parts();
  result.objective = phg.objective();
  result.balanced = phg.is_balanced();
  result.refinement = refiner.stats();
  result.times.uncontraction = uncontraction;
  result.times.lp = result.refinement.lp_seconds;
  result.times.fm = result.refinement.fm_seconds;
  result.times.total = seconds_since(run_start);
  return result;
}

}  // namespace nlevel
