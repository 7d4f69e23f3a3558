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

#include "nlevel/batch_builder.h"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include <tbb/parallel_for.h>

namespace nlevel {

namespace {

// Group boundaries of intervals already sorted by decreasing end.
template <typename IntervalAt>
void sweep_sorted(std::size_t n, IntervalAt interval_at, std::vector<std::size_t>& bounds) {
  if (n == 0) return;
  Timestamp low = interval_at(0).start;
  for (std::size_t i = 1; i < n; ++i) {
    const Interval next = interval_at(i);
    if (next.end >= low) {
      low = std::min(low, next.start);
    } else {
      bounds.push_back(i);
      low = next.start;
    }
  }
  bounds.push_back(n);
}

// Closures of every vertex's children, as [begin, end) slices of
// forest.children(u). Closures of u are ranges[first[u] .. first[u + 1]).
struct ClosureTable {
  std::vector<std::size_t> first;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges;
  std::vector<std::uint32_t> pass;

  explicit ClosureTable(const ContractionForest& forest) : first(forest.size() + 1, 0) {
    std::vector<std::size_t> bounds;
    for (VertexId u = 0; u < forest.size(); ++u) {
      first[u] = ranges.size();
      const auto kids = forest.children(u);
      bounds.clear();
      sweep_sorted(
          kids.size(), [&](std::size_t i) { return Interval{forest.start(kids[i]), forest.end(kids[i])}; }, bounds);
      std::size_t begin = 0;
      for (std::size_t end : bounds) {
        ranges.emplace_back(static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(end));
        pass.push_back(forest.pass_of(kids[begin]));
        begin = end;
      }
    }
    first[forest.size()] = ranges.size();
  }
};

struct Item {
  VertexId u;
  std::size_t closure;
};

}  // namespace

std::vector<std::size_t> sibling_closures(std::span<const Interval> intervals, std::vector<std::size_t>& order) {
  order.resize(intervals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return intervals[a].end > intervals[b].end; });
  std::vector<std::size_t> bounds;
  sweep_sorted(order.size(), [&](std::size_t i) { return intervals[order[i]]; }, bounds);
  return bounds;
}

void BatchSchedule::dump(std::ostream& out) const {
  for (std::size_t b = 0; b < batches.size(); ++b) {
    for (VertexId v : batches[b]) out << b + 1 << ' ' << v << '\n';
  }
}

BatchSchedule construct_batches(const ContractionForest& forest, std::size_t b_max, std::size_t partitions) {
  const VertexId n = forest.size();
  b_max = std::max<std::size_t>(1, b_max);
  partitions = std::max<std::size_t>(1, partitions);
  const ClosureTable table(forest);

  BatchSchedule schedule;
  schedule.batch_index.assign(n, BatchSchedule::kNoBatch);

  std::uint32_t num_passes = 0;
  std::vector<VertexId> by_end;
  for (VertexId v = 0; v < n; ++v) {
    if (forest.is_root(v)) continue;
    num_passes = std::max(num_passes, forest.pass_of(v) + 1);
    by_end.push_back(v);
  }
  std::ranges::sort(by_end, [&](VertexId a, VertexId b) { return forest.end(a) < forest.end(b); });
  std::vector<std::vector<VertexId>> contracted_in_pass(num_passes);
  for (VertexId v : by_end) contracted_in_pass[forest.pass_of(v)].push_back(v);

  // Next unprocessed closure per vertex. Closures run in decreasing pass
  // order, so pass p's closures of u start at cursor[u] once later passes
  // are done.
  std::vector<std::size_t> cursor(table.first.begin(), table.first.end() - 1);
  const auto has_closure_in = [&](VertexId u, std::uint32_t p) {
    return cursor[u] < table.first[u + 1] && table.pass[cursor[u]] == p;
  };
  std::vector<std::size_t> subtree(n, 0);
  std::vector<std::size_t> ops(partitions, 0);
  std::vector<std::vector<std::vector<std::size_t>>> layers(partitions);
  std::vector<VertexId> closure_owner(table.ranges.size());
  for (VertexId u = 0; u < n; ++u) {
    for (std::size_t c = table.first[u]; c < table.first[u + 1]; ++c) closure_owner[c] = u;
  }

  for (std::uint32_t p = num_passes; p-- > 0;) {
    const auto& members = contracted_in_pass[p];
    std::vector<VertexId> roots;
    for (VertexId v : members) {
      subtree[v] += 1;
      const VertexId parent = forest.rep(v);
      if (forest.pass_of(parent) != p && subtree[parent] == 0) roots.push_back(parent);
      subtree[parent] += subtree[v];
    }
    std::ranges::sort(roots, [&](VertexId a, VertexId b) {
      return subtree[a] != subtree[b] ? subtree[a] > subtree[b] : a < b;
    });
    std::vector<std::vector<VertexId>> assigned(partitions);
    for (std::size_t i = 0; i < roots.size(); ++i) assigned[i % partitions].push_back(roots[i]);

    tbb::parallel_for(std::size_t{0}, partitions, [&](std::size_t t) {
      auto& out = layers[t];
      out.clear();
      std::vector<Item> queue;
      std::vector<Item> next;
      for (VertexId r : assigned[t]) {
        if (has_closure_in(r, p)) {
          queue.push_back({r, cursor[r]});
          ++ops[t];
        }
      }
      while (!queue.empty()) {
        auto& layer = out.emplace_back();
        for (std::size_t i = 0; i < queue.size(); ++i) {
          const Item item = queue[i];
          layer.push_back(item.closure);
          const auto [begin, end] = table.ranges[item.closure];
          const auto kids = forest.children(item.u);
          for (std::uint32_t j = begin; j < end; ++j) {
            const VertexId v = kids[j];
            if (has_closure_in(v, p)) {
              next.push_back({v, cursor[v]});
              ++ops[t];
            }
          }
          cursor[item.u] = item.closure + 1;
          if (has_closure_in(item.u, p)) {
            queue.push_back({item.u, cursor[item.u]});
            ++ops[t];
          }
        }
        queue.swap(next);
        next.clear();
      }
    });

    // Merge the per-partition layers round-robin into sealed batches.
    std::vector<VertexId> current;
    const auto seal = [&] {
      if (current.empty()) return;
      const auto id = static_cast<std::uint32_t>(schedule.batches.size() + 1);
      for (VertexId v : current) schedule.batch_index[v] = id;
      schedule.batches.push_back(std::move(current));
      schedule.batch_pass.push_back(p);
      current.clear();
    };
    std::size_t depth = 0;
    for (const auto& per : layers) depth = std::max(depth, per.size());
    for (std::size_t l = 0; l < depth; ++l) {
      std::vector<std::size_t> pos(partitions, 0);
      bool any = true;
      while (any) {
        any = false;
        for (std::size_t t = 0; t < partitions; ++t) {
          if (l >= layers[t].size() || pos[t] >= layers[t][l].size()) continue;
          any = true;
          const std::size_t c = layers[t][l][pos[t]++];
          const auto [begin, end] = table.ranges[c];
          const auto kids = forest.children(closure_owner[c]);
          if (!current.empty() && current.size() + (end - begin) > b_max) seal();
          current.insert(current.end(), kids.begin() + begin, kids.begin() + end);
          if (current.size() >= b_max) seal();
        }
      }
      seal();
    }

    for (VertexId v : members) {
      subtree[v] = 0;
      subtree[forest.rep(v)] = 0;
    }
  }
  schedule.queue_operations = std::accumulate(ops.begin(), ops.end(), std::size_t{0});
  return schedule;
}

std::vector<ScheduleViolation> check_schedule_legality(const ContractionForest& forest, const BatchSchedule& schedule,
                                                       std::size_t b_max) {
  using Kind = ScheduleViolation::Kind;
  std::vector<ScheduleViolation> violations;
  const auto report = [&](Kind kind, const std::string& message) { violations.push_back({kind, message}); };
  const VertexId n = forest.size();

  std::vector<std::uint32_t> batch_of(n, BatchSchedule::kNoBatch);
  for (std::size_t b = 0; b < schedule.batches.size(); ++b) {
    for (VertexId v : schedule.batches[b]) {
      if (v >= n) {
        report(Kind::Coverage, "batch " + std::to_string(b + 1) + " holds unknown vertex " + std::to_string(v));
        continue;
      }
      if (batch_of[v] != BatchSchedule::kNoBatch) {
        report(Kind::Coverage, "vertex " + std::to_string(v) + " appears in batches " + std::to_string(batch_of[v]) +
                                   " and " + std::to_string(b + 1));
      }
      batch_of[v] = static_cast<std::uint32_t>(b + 1);
    }
  }
  for (VertexId v = 0; v < n; ++v) {
    const bool contracted = !forest.is_root(v);
    if (contracted && batch_of[v] == BatchSchedule::kNoBatch) {
      report(Kind::Coverage, "contracted vertex " + std::to_string(v) + " is in no batch");
    } else if (!contracted && batch_of[v] != BatchSchedule::kNoBatch) {
      report(Kind::Coverage, "root " + std::to_string(v) + " is scheduled");
    }
    if (v < schedule.batch_index.size() && schedule.batch_index[v] != batch_of[v]) {
      report(Kind::Coverage, "batch_index of " + std::to_string(v) + " disagrees with the batches");
    }
  }

  for (VertexId v = 0; v < n; ++v) {
    if (forest.is_root(v)) continue;
    const VertexId parent = forest.rep(v);
    if (!forest.is_root(parent) && batch_of[v] <= batch_of[parent]) {
      report(Kind::AncestorOrder, "vertex " + std::to_string(v) + " (batch " + std::to_string(batch_of[v]) +
                                      ") is not after its representative " + std::to_string(parent) + " (batch " +
                                      std::to_string(batch_of[parent]) + ")");
    }
  }

  // Closure id per vertex, for co-batching, ordering and size checks.
  std::vector<std::size_t> closure_of(n, 0);
  std::vector<std::size_t> closure_size;
  std::vector<std::vector<VertexId>> children(n);
  for (VertexId v = 0; v < n; ++v) {
    if (!forest.is_root(v)) children[forest.rep(v)].push_back(v);
  }
  std::vector<Interval> intervals;
  std::vector<std::size_t> order;
  for (VertexId u = 0; u < n; ++u) {
    const auto& kids = children[u];
    if (kids.empty()) continue;
    intervals.clear();
    for (VertexId v : kids) intervals.push_back({forest.start(v), forest.end(v)});
    const auto bounds = sibling_closures(intervals, order);
    std::size_t begin = 0;
    std::uint32_t previous_max = 0;
    for (std::size_t end : bounds) {
      const std::size_t id = closure_size.size();
      closure_size.push_back(end - begin);
      std::uint32_t low = std::numeric_limits<std::uint32_t>::max();
      std::uint32_t high = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const VertexId v = kids[order[i]];
        closure_of[v] = id;
        if (batch_of[v] == BatchSchedule::kNoBatch) continue;
        low = std::min(low, batch_of[v]);
        high = std::max(high, batch_of[v]);
      }
      if (high == 0) {
        begin = end;
        continue;
      }
      if (low != high) {
        std::string names;
        for (std::size_t i = begin; i < end; ++i) names += (i == begin ? "" : ",") + std::to_string(kids[order[i]]);
        report(Kind::ClosureSplit, "siblings {" + names + "} of " + std::to_string(u) +
                                       " overlap in time but span batches " + std::to_string(low) + ".." +
                                       std::to_string(high));
      }
      if (begin > 0 && low < previous_max) {
        report(Kind::SiblingOrder, "children of " + std::to_string(u) + ": vertex " + std::to_string(kids[order[begin]]) +
                                       " was contracted earlier but is uncontracted in batch " + std::to_string(low) +
                                       ", before batch " + std::to_string(previous_max));
      }
      previous_max = std::max(previous_max, high);
      begin = end;
    }
  }

  for (std::size_t b = 0; b < schedule.batches.size(); ++b) {
    const auto& batch = schedule.batches[b];
    if (batch.empty()) {
      report(Kind::Size, "batch " + std::to_string(b + 1) + " is empty");
      continue;
    }
    if (batch.size() <= b_max) continue;
    const bool single_closure = std::ranges::all_of(batch, [&](VertexId v) {
      return v < n && !forest.is_root(v) && closure_of[v] == closure_of[batch[0]];
    }) && closure_size[closure_of[batch[0]]] == batch.size();
    if (!single_closure) {
      report(Kind::Size, "batch " + std::to_string(b + 1) + " has " + std::to_string(batch.size()) +
                             " vertices, more than b_max = " + std::to_string(b_max));
    }
  }

  if (schedule.batch_pass.size() == schedule.batches.size()) {
    for (std::size_t b = 0; b < schedule.batches.size(); ++b) {
      if (b > 0 && schedule.batch_pass[b] > schedule.batch_pass[b - 1]) {
        report(Kind::PassOrder, "batch " + std::to_string(b + 1) + " belongs to a later pass than its predecessor");
      }
      for (VertexId v : schedule.batches[b]) {
        if (v < n && !forest.is_root(v) && forest.pass_of(v) != schedule.batch_pass[b]) {
          report(Kind::PassOrder, "vertex " + std::to_string(v) + " scheduled outside its coarsening pass");
        }
      }
    }
  } else {
    report(Kind::PassOrder, "batch_pass does not match the number of batches");
  }
  return violations;
}

}  // namespace nlevel
