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

// Command line front end of the n-level partitioner. Every flag can also be
// set through an NLEVEL_* environment variable (flags take precedence).
// Values are validated after parsing so that bad environment values are
// reported instead of ignored.

#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nlevel/driver.h"

namespace {

std::string env_name(const std::string& flag) {
  std::string name = "NLEVEL_";
  for (char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

}  // namespace

int main(int argc, char** argv) {
  nlevel::RunConfig config;
  std::string stats_format = "csv";
  std::string algorithms;
  bool no_lp = false;
  bool no_fm = false;
  bool no_ip_refinement = false;

  CLI::App app{"Parallel n-level hypergraph partitioner (connectivity objective)"};
  app.option_defaults()->always_capture_default();
  auto add = [&](const std::string& flag, auto& target, const std::string& help) {
    return app.add_option("--" + flag, target, help)->envname(env_name(flag));
  };
  auto add_flag = [&](const std::string& flag, bool& target, const std::string& help) {
    return app.add_flag("--" + flag, target, help)->envname(env_name(flag));
  };

  add("hypergraph", config.hypergraph_path, "input hypergraph in hMetis format")->required();
  add("k", config.k, "number of blocks");
  add("epsilon", config.epsilon, "allowed imbalance");
  add("seed", config.seed, "random seed");
  add("threads", config.threads, "worker threads");
  add("b-max", config.b_max, "maximum uncontraction batch size");
  add("output", config.output_path, "partition file (one block id per line)");
  add("stats", config.stats_path, "run statistics file (appended)");
  add("stats-format", stats_format, "csv or json");

  add("contraction-factor", config.contraction_factor, "coarsening stops at factor * k vertices");
  add("max-rated-net-size", config.max_rated_net_size, "nets above this size are ignored by the rating");
  add_flag("no-lp", no_lp, "disable label propagation refinement");
  add_flag("no-fm", no_fm, "disable FM refinement");
  add("lp-rounds", config.lp.max_rounds, "label propagation rounds");
  add("fm-rounds", config.fm.max_rounds, "FM rounds per refinement call");
  add("fm-seeds", config.fm.seeds_per_search, "seed vertices per localized FM search");
  add("fm-max-moves", config.fm.max_moves_per_search, "move cap per localized FM search");
  add("fm-alpha", config.fm.alpha, "adaptive stopping rule alpha");
  add("ip-algorithms", algorithms, "comma separated flat initial partitioning algorithms");
  add("ip-min-runs", config.pool.min_runs, "minimum runs per flat algorithm");
  add("ip-max-runs", config.pool.max_runs, "maximum runs per flat algorithm");
  add_flag("no-ip-refinement", no_ip_refinement, "skip LP and FM on flat initial partitions");
  add_flag("audit", config.audit, "check all data structure invariants after every batch");

  try {
    app.parse(argc, argv);
    config.stats_format = nlevel::parse_stats_format(stats_format);
    config.use_lp = !no_lp;
    config.use_fm = !no_fm;
    config.pool.refine_runs = !no_ip_refinement;
    config.pool.lp = config.lp;
    config.pool.fm = config.fm;
    if (!algorithms.empty()) {
      config.pool.algorithms.clear();
      std::stringstream list(algorithms);
      for (std::string name; std::getline(list, name, ',');) {
        config.pool.algorithms.push_back(nlevel::parse_flat_algorithm(name));
      }
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? nlevel::kExitSuccess : nlevel::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nlevel::kExitUsage;
  }
  return nlevel::run(config, std::cerr);
}
