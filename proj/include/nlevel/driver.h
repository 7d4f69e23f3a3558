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

#include <iosfwd>
#include <string>
#include <vector>

#include "nlevel/initial_partitioner.h"
#include "nlevel/multilevel.h"

namespace nlevel {

enum class StatsFormat { Csv, Json };
StatsFormat parse_stats_format(const std::string& name);

enum ExitCode : int { kExitSuccess = 0, kExitUsage = 1, kExitInfeasible = 2, kExitInternal = 3 };

struct RunConfig {
  std::string hypergraph_path;
  BlockId k = 2;
  double epsilon = 0.03;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t b_max = 1000;
  std::string output_path;
  std::string stats_path;
  StatsFormat stats_format = StatsFormat::Csv;

  VertexId contraction_factor = kContractionLimitFactor;
  std::size_t max_rated_net_size = 1000;
  LpConfig lp;
  FmConfig fm;
  bool use_lp = true;
  bool use_fm = true;
  FlatPoolConfig pool;
  bool audit = false;

  /// Throws InvalidInput on k < 1, epsilon outside (0,1), b_max < 1 or
  /// threads < 1.
  void validate() const;
};

struct RunStats {
  static constexpr int kSchemaVersion = 1;

  std::string instance;
  BlockId k = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::size_t b_max = 0;
  std::size_t vertices = 0;
  std::size_t nets = 0;
  std::size_t pins = 0;

  PhaseTimes times;
  Weight objective = 0;
  double imbalance = 0.0;
  bool balanced = false;
  std::size_t levels = 0;
  std::size_t contractions = 0;
  std::size_t discarded = 0;
  std::size_t batches = 0;
  std::size_t lp_moves = 0;
  std::size_t fm_moves = 0;
  std::size_t localized_refinements = 0;
  std::size_t global_refinements = 0;

  /// "ok", "infeasible", "usage", "io" or "internal".
  std::string status = "ok";
  std::string failure;
};

struct PartitionResult {
  std::vector<BlockId> parts;
  RunStats stats;
};

/// Partitions an in-memory hypergraph with config.threads workers. The
/// result is audited: the objective is recomputed from the assignment and
/// pin counts are validated; an audit failure throws InvariantViolation.
/// An unbalanced result is returned with status "infeasible".
PartitionResult partition(const StaticHypergraph& hypergraph, const RunConfig& config);

/// One CSV row (with a header line if `header`) or one JSON object per line.
void emit_stats(const RunStats& stats, StatsFormat format, std::ostream& out, bool header);
/// Appends to `path`; CSV files get a header when they are new or empty.
void append_stats(const RunStats& stats, StatsFormat format, const std::string& path);

/// Loads the input, partitions, writes the partition and stats files and
/// maps failures to an ExitCode. Failed runs still append a stats record.
int run(const RunConfig& config, std::ostream& log);

}  // namespace nlevel
