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

#include "nlevel/initial_partitioner.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <string>

#include <tbb/parallel_for.h>
#include <tbb/task_group.h>

#include "nlevel/partitioned_hypergraph.h"

namespace nlevel {

std::string_view to_string(FlatAlgorithm algorithm) {
  switch (algorithm) {
    case FlatAlgorithm::Random: return "random";
    case FlatAlgorithm::Bfs: return "bfs";
    case FlatAlgorithm::LabelPropagation: return "label_propagation";
    case FlatAlgorithm::NetGrowing: return "net_growing";
    case FlatAlgorithm::GreedyGrowing: return "greedy_growing";
  }
  return "unknown";
}

FlatAlgorithm parse_flat_algorithm(std::string_view name) {
  for (FlatAlgorithm a : kAllFlatAlgorithms) {
    if (to_string(a) == name) return a;
  }
  throw InvalidInput("unknown flat algorithm '" + std::string(name) + "'");
}

void FlatPoolStats::record(std::size_t algorithm, Weight objective, bool balanced) {
  objectives_[algorithm].push_back(objective);
  best_any_ = std::min(best_any_, objective);
  if (balanced) best_balanced_ = std::min(best_balanced_, objective);
}

double FlatPoolStats::mean(std::size_t algorithm) const {
  const auto& values = objectives_[algorithm];
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (Weight v : values) sum += static_cast<double>(v);
  return sum / static_cast<double>(values.size());
}

double FlatPoolStats::stddev(std::size_t algorithm) const {
  const auto& values = objectives_[algorithm];
  if (values.size() < 2) return std::numeric_limits<double>::infinity();
  const double mu = mean(algorithm);
  double sum = 0.0;
  for (Weight v : values) sum += (static_cast<double>(v) - mu) * (static_cast<double>(v) - mu);
  return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

namespace {

VertexId random_vertex(const StaticHypergraph& h, Rng& rng) {
  return static_cast<VertexId>(random_index(rng, h.num_vertices()));
}

// Last vertex reached by a BFS, repeated a few times from the previous end.
VertexId pseudo_peripheral_vertex(const StaticHypergraph& h, VertexId start) {
  std::vector<std::uint32_t> seen(h.num_vertices(), 0);
  std::vector<std::uint32_t> net_seen(h.num_nets(), 0);
  VertexId last = start;
  for (std::uint32_t round = 1; round <= 3; ++round) {
    std::deque<VertexId> queue{last};
    seen[last] = round;
    while (!queue.empty()) {
      const VertexId v = queue.front();
      queue.pop_front();
      last = v;
      for (NetId e : h.incident_nets(v)) {
        if (net_seen[e] == round) continue;
        net_seen[e] = round;
        for (VertexId x : h.pins(e)) {
          if (seen[x] != round) {
            seen[x] = round;
            queue.push_back(x);
          }
        }
      }
    }
  }
  return last;
}

Weight growth_target(const StaticHypergraph& h, const std::array<Weight, 2>& max_weights) {
  const double ratio = static_cast<double>(max_weights[1]) / static_cast<double>(max_weights[0] + max_weights[1]);
  return std::min(max_weights[1], static_cast<Weight>(static_cast<double>(h.total_weight()) * ratio));
}

std::vector<BlockId> random_assignment(const StaticHypergraph& h, const std::array<Weight, 2>& max_weights, Rng& rng) {
  std::vector<VertexId> order(h.num_vertices());
  for (VertexId v = 0; v < h.num_vertices(); ++v) order[v] = v;
  shuffle(std::span<VertexId>(order), rng);
  std::vector<BlockId> parts(h.num_vertices(), 0);
  std::array<Weight, 2> w{0, 0};
  for (VertexId v : order) {
    const Weight c = h.vertex_weight(v);
    BlockId b = static_cast<BlockId>(rng() % 2);
    if (w[b] + c > max_weights[b]) b = 1 - b;
    if (w[b] + c > max_weights[b]) {
      b = static_cast<double>(w[0]) / max_weights[0] <= static_cast<double>(w[1]) / max_weights[1] ? 0 : 1;
    }
    parts[v] = b;
    w[b] += c;
  }
  return parts;
}

std::vector<BlockId> bfs_growing(const StaticHypergraph& h, const std::array<Weight, 2>& max_weights, Rng& rng) {
  const Weight target = growth_target(h, max_weights);
  std::vector<BlockId> parts(h.num_vertices(), 0);
  std::vector<std::uint8_t> seen(h.num_vertices(), 0);
  std::vector<std::uint8_t> net_seen(h.num_nets(), 0);
  std::deque<VertexId> queue;
  Weight grown = 0;
  VertexId scan = random_vertex(h, rng);
  VertexId scanned = 0;
  while (grown < target) {
    if (queue.empty()) {
      while (scanned < h.num_vertices() && seen[scan]) {
        scan = (scan + 1) % h.num_vertices();
        ++scanned;
      }
      if (scanned == h.num_vertices()) break;
      seen[scan] = 1;
      queue.push_back(scan);
    }
    const VertexId v = queue.front();
    queue.pop_front();
    if (grown + h.vertex_weight(v) > target) continue;
    parts[v] = 1;
    grown += h.vertex_weight(v);
    for (NetId e : h.incident_nets(v)) {
      if (net_seen[e]) continue;
      net_seen[e] = 1;
      for (VertexId x : h.pins(e)) {
        if (!seen[x]) {
          seen[x] = 1;
          queue.push_back(x);
        }
      }
    }
  }
  return parts;
}

// Grows block 1 greedily by a priority over block-0 vertices. With
// `by_gain` the priority is the cut gain of the move, otherwise the
// connection to block 1 weighted by net size.
class GreedyGrower {
 public:
  GreedyGrower(const StaticHypergraph& h, bool by_gain)
      : h_(h),
        by_gain_(by_gain),
        parts_(h.num_vertices(), 0),
        skipped_(h.num_vertices(), 0),
        key_(h.num_vertices(), 0.0),
        in_block_(h.num_nets(), 0) {
    if (by_gain_) {
      for (VertexId v = 0; v < h.num_vertices(); ++v) {
        key_[v] = gain(v);
        heap_.push({key_[v], v});
      }
    }
  }

  std::vector<BlockId> grow(std::span<const VertexId> seeds, Weight target, Rng& rng) {
    for (VertexId s : seeds) {
      if (parts_[s] == 0 && grown_ + h_.vertex_weight(s) <= target) add(s);
    }
    VertexId scan = random_vertex(h_, rng);
    while (grown_ < target) {
      VertexId next = kInvalidVertex;
      while (!heap_.empty()) {
        const auto [key, v] = heap_.top();
        heap_.pop();
        if (parts_[v] != 0 || skipped_[v] || key != key_[v]) continue;
        next = v;
        break;
      }
      if (next == kInvalidVertex) {
        VertexId scanned = 0;
        while (scanned < h_.num_vertices() && (parts_[scan] != 0 || skipped_[scan])) {
          scan = (scan + 1) % h_.num_vertices();
          ++scanned;
        }
        if (scanned == h_.num_vertices()) break;
        next = scan;
      }
      if (grown_ + h_.vertex_weight(next) > target) {
        skipped_[next] = 1;
        continue;
      }
      add(next);
    }
    return parts_;
  }

 private:
  double gain(VertexId v) const {
    double g = 0.0;
    for (NetId e : h_.incident_nets(v)) {
      const auto size = static_cast<std::uint32_t>(h_.net_size(e));
      if (size - in_block_[e] == 1) g += static_cast<double>(h_.net_weight(e));
      if (in_block_[e] == 0) g -= static_cast<double>(h_.net_weight(e));
    }
    return g;
  }

  void add(VertexId v) {
    parts_[v] = 1;
    grown_ += h_.vertex_weight(v);
    for (NetId e : h_.incident_nets(v)) {
      ++in_block_[e];
      for (VertexId x : h_.pins(e)) {
        if (parts_[x] != 0 || skipped_[x]) continue;
        if (by_gain_) {
          key_[x] = gain(x);
        } else {
          key_[x] += static_cast<double>(h_.net_weight(e)) / static_cast<double>(h_.net_size(e));
        }
        heap_.push({key_[x], x});
      }
    }
  }

  const StaticHypergraph& h_;
  bool by_gain_;
  std::vector<BlockId> parts_;
  std::vector<std::uint8_t> skipped_;
  std::vector<double> key_;
  std::vector<std::uint32_t> in_block_;
  std::priority_queue<std::pair<double, VertexId>> heap_;
  Weight grown_ = 0;
};

std::vector<BlockId> net_growing(const StaticHypergraph& h, const std::array<Weight, 2>& max_weights, Rng& rng) {
  std::vector<VertexId> seeds;
  if (h.num_nets() > 0) {
    const NetId e = static_cast<NetId>(random_index(rng, h.num_nets()));
    seeds.assign(h.pins(e).begin(), h.pins(e).end());
  } else {
    seeds.push_back(random_vertex(h, rng));
  }
  return GreedyGrower(h, false).grow(seeds, growth_target(h, max_weights), rng);
}

std::vector<BlockId> greedy_growing(const StaticHypergraph& h, const std::array<Weight, 2>& max_weights, Rng& rng) {
  const VertexId start = pseudo_peripheral_vertex(h, random_vertex(h, rng));
  return GreedyGrower(h, true).grow(std::span<const VertexId>(&start, 1), growth_target(h, max_weights), rng);
}

// Size-constrained label propagation from two far-apart seeds.
std::vector<BlockId> label_propagation(const StaticHypergraph& h, const std::array<Weight, 2>& max_weights, Rng& rng) {
  const VertexId n = h.num_vertices();
  std::vector<BlockId> label(n, kInvalidBlock);
  std::array<Weight, 2> w{0, 0};
  const VertexId a = random_vertex(h, rng);
  const VertexId b = pseudo_peripheral_vertex(h, a);
  label[a] = 0;
  w[0] += h.vertex_weight(a);
  if (b != a) {
    label[b] = 1;
    w[1] += h.vertex_weight(b);
  }
  std::vector<VertexId> order(n);
  for (VertexId v = 0; v < n; ++v) order[v] = v;
  for (int round = 0; round < 20; ++round) {
    shuffle(std::span<VertexId>(order), rng);
    bool changed = false;
    for (VertexId v : order) {
      std::array<double, 2> score{0.0, 0.0};
      for (NetId e : h.incident_nets(v)) {
        if (h.net_size(e) < 2) continue;
        const double share = static_cast<double>(h.net_weight(e)) / static_cast<double>(h.net_size(e) - 1);
        for (VertexId x : h.pins(e)) {
          if (x != v && label[x] != kInvalidBlock) score[label[x]] += share;
        }
      }
      if (score[0] == 0.0 && score[1] == 0.0) continue;
      const BlockId current = label[v];
      const Weight c = h.vertex_weight(v);
      BlockId best = current;
      double best_score = current == kInvalidBlock ? -1.0 : score[current];
      for (BlockId i = 0; i < 2; ++i) {
        if (i == current || w[i] + c > max_weights[i]) continue;
        if (score[i] > best_score) {
          best = i;
          best_score = score[i];
        }
      }
      if (best == current) continue;
      if (current != kInvalidBlock) w[current] -= c;
      w[best] += c;
      label[v] = best;
      changed = true;
    }
    if (!changed) break;
  }
  for (VertexId v : order) {
    if (label[v] != kInvalidBlock) continue;
    const Weight c = h.vertex_weight(v);
    const BlockId i = static_cast<double>(w[0] + c) / max_weights[0] <= static_cast<double>(w[1] + c) / max_weights[1] ? 0 : 1;
    label[v] = i;
    w[i] += c;
  }
  return label;
}

double overload_ratio(const PartitionedHypergraph& phg) {
  double ratio = 0.0;
  for (BlockId i = 0; i < phg.k(); ++i) {
    ratio = std::max(ratio, static_cast<double>(phg.block_weight(i)) / static_cast<double>(phg.max_block_weight(i)));
  }
  return ratio;
}

// Moves vertices out of overloaded blocks, best gain first, while a move
// fits into another block.
void rebalance(PartitionedHypergraph& phg) {
  const auto& h = phg.hypergraph();
  for (BlockId from = 0; from < phg.k(); ++from) {
    while (phg.block_weight(from) > phg.max_block_weight(from)) {
      VertexId best_vertex = kInvalidVertex;
      BlockId best_block = kInvalidBlock;
      Gain best_gain = std::numeric_limits<Gain>::min();
      for (VertexId v = 0; v < h.initial_num_vertices(); ++v) {
        if (!h.is_active(v) || phg.part(v) != from) continue;
        for (BlockId to = 0; to < phg.k(); ++to) {
          if (to == from || phg.block_weight(to) + h.vertex_weight(v) > phg.max_block_weight(to)) continue;
          const Gain g = phg.gain(v, to);
          if (g > best_gain) {
            best_gain = g;
            best_vertex = v;
            best_block = to;
          }
        }
      }
      if (best_vertex == kInvalidVertex) break;
      phg.change_part(best_vertex, from, best_block);
    }
  }
}

struct Run {
  std::vector<BlockId> parts;
  Weight objective = 0;
  bool balanced = false;
  double overload = 0.0;
};

Run polish(const StaticHypergraph& h, std::vector<BlockId> parts, const std::array<Weight, 2>& max_weights,
           const FlatPoolConfig& config, std::uint64_t seed) {
  DynamicHypergraph dh(h);
  PartitionedHypergraph phg(dh, 2, {max_weights[0], max_weights[1]});
  phg.initialize(parts);
  rebalance(phg);
  if (config.refine_runs) {
    std::vector<VertexId> all(h.num_vertices());
    for (VertexId v = 0; v < h.num_vertices(); ++v) all[v] = v;
    LabelPropagationRefiner(phg, config.lp).refine(all, derive_seed(seed, 1));
    FmRefiner(phg, config.fm).refine(all, derive_seed(seed, 2));
  }
  return {phg.parts(), phg.objective(), phg.is_balanced(), overload_ratio(phg)};
}

bool better(const Run& a, const Run& b) {
  if (a.balanced != b.balanced) return a.balanced;
  if (a.balanced) return a.objective < b.objective || (a.objective == b.objective && a.overload < b.overload);
  return a.overload < b.overload || (a.overload == b.overload && a.objective < b.objective);
}

}  // namespace

std::vector<BlockId> run_flat_algorithm(FlatAlgorithm algorithm, const StaticHypergraph& hypergraph,
                                        const std::array<Weight, 2>& max_weights, Rng& rng) {
  if (hypergraph.num_vertices() == 0) return {};
  switch (algorithm) {
    case FlatAlgorithm::Random: return random_assignment(hypergraph, max_weights, rng);
    case FlatAlgorithm::Bfs: return bfs_growing(hypergraph, max_weights, rng);
    case FlatAlgorithm::LabelPropagation: return label_propagation(hypergraph, max_weights, rng);
    case FlatAlgorithm::NetGrowing: return net_growing(hypergraph, max_weights, rng);
    case FlatAlgorithm::GreedyGrowing: return greedy_growing(hypergraph, max_weights, rng);
  }
  throw InvalidInput("unknown flat algorithm");
}

Bipartition flat_bipartition_pool(const StaticHypergraph& hypergraph, const std::array<Weight, 2>& max_weights,
                                  const FlatPoolConfig& config, std::uint64_t seed) {
  const std::size_t algorithms = config.algorithms.size();
  if (algorithms == 0) throw InvalidInput("the flat pool needs at least one algorithm");
  Bipartition result;
  result.stats = FlatPoolStats(algorithms);
  if (hypergraph.num_vertices() == 0) {
    result.balanced = true;
    return result;
  }

  Run best;
  bool have_best = false;
  auto run_round = [&](const std::vector<std::pair<std::size_t, std::size_t>>& trials) {
    std::vector<Run> runs(trials.size());
    tbb::parallel_for(std::size_t{0}, trials.size(), [&](std::size_t i) {
      const auto [a, t] = trials[i];
      const std::uint64_t trial_seed = derive_seed(seed, a, t);
      Rng rng(trial_seed);
      auto parts = run_flat_algorithm(config.algorithms[a], hypergraph, max_weights, rng);
      runs[i] = polish(hypergraph, std::move(parts), max_weights, config, trial_seed);
    });
    for (std::size_t i = 0; i < trials.size(); ++i) {
      result.stats.record(trials[i].first, runs[i].objective, runs[i].balanced);
      if (!have_best || better(runs[i], best)) {
        best = std::move(runs[i]);
        have_best = true;
      }
    }
  };

  std::vector<std::pair<std::size_t, std::size_t>> trials;
  const std::size_t min_runs = std::max<std::size_t>(1, std::min(config.min_runs, config.max_runs));
  for (std::size_t a = 0; a < algorithms; ++a) {
    for (std::size_t t = 0; t < min_runs; ++t) trials.emplace_back(a, t);
  }
  run_round(trials);
  while (true) {
    trials.clear();
    for (std::size_t a = 0; a < algorithms; ++a) {
      const std::size_t runs = result.stats.runs(a);
      if (runs >= config.max_runs) continue;
      if (pool_should_run_again(result.stats.mean(a), result.stats.stddev(a), result.stats.best())) {
        trials.emplace_back(a, runs);
      }
    }
    if (trials.empty()) break;
    run_round(trials);
  }

  result.parts = std::move(best.parts);
  result.objective = best.objective;
  result.balanced = best.balanced;
  return result;
}

double adapted_epsilon(Weight max_block_weight, Weight sub_weight, BlockId k) {
  if (k <= 1 || sub_weight <= 0) return 0.0;
  const double base = static_cast<double>(max_block_weight) * k / static_cast<double>(sub_weight);
  if (base <= 1.0) return 0.0;
  const double levels = std::ceil(std::log2(static_cast<double>(k)));
  return std::pow(base, 1.0 / levels) - 1.0;
}

StaticHypergraph extract_block(const StaticHypergraph& hypergraph, const std::vector<BlockId>& parts, BlockId block,
                               std::vector<VertexId>& vertices) {
  std::vector<VertexId> to_sub(hypergraph.num_vertices(), kInvalidVertex);
  vertices.clear();
  std::vector<Weight> weights;
  for (VertexId v = 0; v < hypergraph.num_vertices(); ++v) {
    if (parts[v] != block) continue;
    to_sub[v] = static_cast<VertexId>(vertices.size());
    vertices.push_back(v);
    weights.push_back(hypergraph.vertex_weight(v));
  }
  std::vector<std::vector<VertexId>> nets;
  std::vector<Weight> net_weights;
  std::vector<VertexId> pins;
  for (NetId e = 0; e < hypergraph.num_nets(); ++e) {
    pins.clear();
    for (VertexId v : hypergraph.pins(e)) {
      if (to_sub[v] != kInvalidVertex) pins.push_back(to_sub[v]);
    }
    if (pins.size() < 2) continue;
    nets.push_back(pins);
    net_weights.push_back(hypergraph.net_weight(e));
  }
  return StaticHypergraph(static_cast<VertexId>(vertices.size()), nets, std::move(net_weights), std::move(weights));
}

std::vector<BlockId> recursive_initial_partition(const StaticHypergraph& hypergraph, BlockId k,
                                                 Weight max_block_weight, const InitialPartitionConfig& config,
                                                 std::uint64_t seed) {
  const VertexId n = hypergraph.num_vertices();
  if (k <= 1 || n == 0) return std::vector<BlockId>(n, 0);

  const BlockId k0 = (k + 1) / 2;
  const BlockId k1 = k / 2;
  const Weight total = hypergraph.total_weight();
  const double eps = adapted_epsilon(max_block_weight, total, k);
  auto bound = [&](BlockId share) {
    const auto w = static_cast<Weight>((1.0 + eps) * static_cast<double>(total) * share / k);
    return std::min(w, max_block_weight * share);
  };
  const std::array<Weight, 2> max_weights{bound(k0), bound(k1)};

  MultilevelConfig ml = config.bipartitioning;
  ml.k = 2;
  ml.max_block_weights = {max_weights[0], max_weights[1]};
  ml.initial_partitioning_mode = true;
  ml.seed = seed;
  const auto bisection = multilevel_partition(hypergraph, ml, [&](const StaticHypergraph& coarse, std::uint64_t s) {
    return flat_bipartition_pool(coarse, max_weights, config.pool, s).parts;
  });
  if (k == 2) return bisection.parts;

  std::vector<BlockId> parts(n);
  std::array<std::vector<VertexId>, 2> vertices;
  std::array<std::vector<BlockId>, 2> sub_parts;
  auto solve = [&](int side) {
    const StaticHypergraph sub = extract_block(hypergraph, bisection.parts, side, vertices[side]);
    sub_parts[side] = recursive_initial_partition(sub, side == 0 ? k0 : k1, max_block_weight, config,
                                                  derive_seed(seed, 10 + side));
  };
  tbb::task_group group;
  group.run([&] { solve(0); });
  solve(1);
  group.wait();
  for (int side = 0; side < 2; ++side) {
    const BlockId offset = side == 0 ? 0 : k0;
    for (std::size_t i = 0; i < vertices[side].size(); ++i) parts[vertices[side][i]] = offset + sub_parts[side][i];
  }
  return parts;
}

}  // namespace nlevel
