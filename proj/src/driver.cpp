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

#include "nlevel/driver.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include <tbb/global_control.h>
#include <tbb/task_arena.h>

#include "nlevel/hmetis_io.h"
#include "nlevel/metrics.h"

namespace nlevel {

StatsFormat parse_stats_format(const std::string& name) {
  if (name == "csv") return StatsFormat::Csv;
  if (name == "json") return StatsFormat::Json;
  throw InvalidInput("unknown stats format '" + name + "' (expected csv or json)");
}

void RunConfig::validate() const {
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
  if (b_max < 1) throw InvalidInput("b_max must be at least 1");
  if (threads < 1) throw InvalidInput("threads must be at least 1");
  if (contraction_factor < 1) throw InvalidInput("the contraction limit factor must be at least 1");
  if (pool.algorithms.empty()) throw InvalidInput("the flat pool needs at least one algorithm");
}

PartitionResult partition(const StaticHypergraph& hypergraph, const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  PartitionResult result;
  RunStats& stats = result.stats;
  stats.instance = config.hypergraph_path;
  stats.k = config.k;
  stats.epsilon = config.epsilon;
  stats.seed = config.seed;
  stats.threads = config.threads;
  stats.b_max = config.b_max;
  stats.vertices = hypergraph.num_vertices();
  stats.nets = hypergraph.num_nets();
  stats.pins = hypergraph.num_pins();

  const Weight bound = max_block_weight(hypergraph.total_weight(), config.k, config.epsilon);
  if (config.k == 1) {
    result.parts.assign(hypergraph.num_vertices(), 0);
  } else {
    MultilevelConfig ml;
    ml.k = config.k;
    ml.max_block_weights.assign(config.k, bound);
    ml.seed = config.seed;
    ml.b_max = config.b_max;
    ml.threads = config.threads;
    ml.contraction_factor = config.contraction_factor;
    ml.max_rated_net_size = config.max_rated_net_size;
    ml.lp = config.lp;
    ml.fm = config.fm;
    ml.use_lp = config.use_lp;
    ml.use_fm = config.use_fm;
    ml.audit = config.audit;

    InitialPartitionConfig ip;
    ip.pool = config.pool;
    ip.bipartitioning = ml;

    // Extra parallelism is allowed even on machines with fewer cores so that
    // the requested thread count is honored.
    tbb::global_control parallelism(tbb::global_control::max_allowed_parallelism, config.threads);
    tbb::task_arena arena(static_cast<int>(config.threads));
    const MultilevelResult ml_result = arena.execute([&] {
      return multilevel_partition(hypergraph, ml, [&](const StaticHypergraph& coarse, std::uint64_t seed) {
        return recursive_initial_partition(coarse, config.k, bound, ip, seed);
      });
    });
    result.parts = ml_result.parts;
    stats.times = ml_result.times;
    stats.levels = ml_result.levels;
    stats.contractions = ml_result.contractions;
    stats.discarded = ml_result.discarded;
    stats.batches = ml_result.batches;
    stats.lp_moves = ml_result.refinement.lp_moves;
    stats.fm_moves = ml_result.refinement.fm_moves;
    stats.localized_refinements = ml_result.refinement.localized_calls;
    stats.global_refinements = ml_result.refinement.global_calls;
    stats.objective = ml_result.objective;
  }

  const PartitionState state(hypergraph, config.k, config.epsilon, result.parts);
  const Weight recomputed = connectivity_objective(hypergraph, result.parts);
  if (config.k > 1 && recomputed != stats.objective) {
    throw InvariantViolation("reported objective " + std::to_string(stats.objective) + " differs from recomputed " +
                             std::to_string(recomputed));
  }
  stats.objective = recomputed;
  stats.balanced = true;
  for (const auto& violation : validate_partition(hypergraph, state)) {
    if (violation.kind != Violation::Kind::Balance) throw InvariantViolation(violation.message);
    stats.balanced = false;
  }
  stats.imbalance = imbalance(hypergraph, result.parts, config.k);
  stats.status = stats.balanced ? "ok" : "infeasible";
  stats.times.total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

nlohmann::ordered_json to_json(const RunStats& s) {
  return {{"schema_version", RunStats::kSchemaVersion},
          {"instance", s.instance},
          {"k", s.k},
          {"epsilon", s.epsilon},
          {"seed", s.seed},
          {"threads", s.threads},
          {"b_max", s.b_max},
          {"vertices", s.vertices},
          {"nets", s.nets},
          {"pins", s.pins},
          {"time_coarsening", s.times.coarsening},
          {"time_initial_partitioning", s.times.initial_partitioning},
          {"time_uncontraction", s.times.uncontraction},
          {"time_lp", s.times.lp},
          {"time_fm", s.times.fm},
          {"time_total", s.times.total},
          {"objective", s.objective},
          {"imbalance", s.imbalance},
          {"balanced", s.balanced},
          {"levels", s.levels},
          {"contractions", s.contractions},
          {"discarded", s.discarded},
          {"batches", s.batches},
          {"lp_moves", s.lp_moves},
          {"fm_moves", s.fm_moves},
          {"localized_refinements", s.localized_refinements},
          {"global_refinements", s.global_refinements},
          {"status", s.status},
          {"failure", s.failure}};
}

std::string csv_field(const nlohmann::ordered_json& value) {
  if (value.is_string()) {
    std::string text = value.get<std::string>();
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  if (value.is_boolean()) return value.get<bool>() ? "1" : "0";
  return value.dump();
}

}  // namespace

void emit_stats(const RunStats& stats, StatsFormat format, std::ostream& out, bool header) {
  const auto record = to_json(stats);
  if (format == StatsFormat::Json) {
    out << record.dump() << '\n';
    return;
  }
  if (header) {
    bool first = true;
    for (const auto& [key, value] : record.items()) {
      out << (first ? "" : ",") << key;
      first = false;
    }
    out << '\n';
  }
  bool first = true;
  for (const auto& [key, value] : record.items()) {
    out << (first ? "" : ",") << csv_field(value);
    first = false;
  }
  out << '\n';
}

void append_stats(const RunStats& stats, StatsFormat format, const std::string& path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::ios_base::failure("cannot open stats file '" + path + "'");
  emit_stats(stats, format, out, fresh);
}

int run(const RunConfig& config, std::ostream& log) {
  RunStats failed;
  failed.instance = config.hypergraph_path;
  failed.k = config.k;
  failed.epsilon = config.epsilon;
  failed.seed = config.seed;
  failed.threads = config.threads;
  failed.b_max = config.b_max;

  auto fail = [&](const char* status, const std::string& message, int code) {
    log << "error: " << message << '\n';
    failed.status = status;
    failed.failure = message;
    if (!config.stats_path.empty()) {
      try {
        append_stats(failed, config.stats_format, config.stats_path);
      } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
      }
    }
    return code;
  };

  try {
    config.validate();
  } catch (const InvalidInput& e) {
    return fail("usage", e.what(), kExitUsage);
  }
  StaticHypergraph hypergraph;
  try {
    hypergraph = io::load_hmetis(config.hypergraph_path);
  } catch (const std::exception& e) {
    return fail("io", e.what(), kExitUsage);
  }

  PartitionResult result;
  try {
    result = partition(hypergraph, config);
  } catch (const InvalidInput& e) {
    return fail("usage", e.what(), kExitUsage);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitInternal);
  }

  try {
    if (!config.output_path.empty()) io::write_partition(result.parts, config.output_path);
    if (!config.stats_path.empty()) append_stats(result.stats, config.stats_format, config.stats_path);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  log << "objective=" << result.stats.objective << " imbalance=" << result.stats.imbalance
      << " time=" << result.stats.times.total << "s\n";
  if (!result.stats.balanced) {
    log << "error: no partition within the balance bound was found\n";
    return kExitInfeasible;
  }
  return kExitSuccess;
}

}  // namespace nlevel
