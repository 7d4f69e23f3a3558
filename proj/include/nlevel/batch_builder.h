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
#include <span>
#include <string>
#include <vector>

#include "nlevel/coarsener.h"

namespace nlevel {

struct Interval {
  Timestamp start;
  Timestamp end;
};

/// Groups siblings into closures of transitively overlapping intervals.
/// `order` receives the indices sorted by decreasing end; the result holds
/// the group boundaries into `order` (first group is [0, bounds[0]), ...).
std::vector<std::size_t> sibling_closures(std::span<const Interval> intervals, std::vector<std::size_t>& order);

/// Ordered, disjoint uncontraction batches. Batch ids are 1-based.
struct BatchSchedule {
  static constexpr std::uint32_t kNoBatch = 0;

  std::vector<std::vector<VertexId>> batches;
  /// Batch id per vertex, kNoBatch for vertices that were never contracted.
  std::vector<std::uint32_t> batch_index;
  /// Coarsening pass of every batch; non-increasing over the schedule.
  std::vector<std::uint32_t> batch_pass;
  std::size_t queue_operations = 0;

  std::size_t num_batches() const { return batches.size(); }
  const std::vector<VertexId>& batch(std::uint32_t id) const { return batches[id - 1]; }
  /// "batch_index vertex" per line.
  void dump(std::ostream& out) const;
};

/// Builds batches pass by pass, latest pass first, with a top-down BFS over
/// each pass's part of the forest. The forest's children must be built.
/// `partitions` independent BFS traversals run in parallel over disjoint
/// root sets.
BatchSchedule construct_batches(const ContractionForest& forest, std::size_t b_max, std::size_t partitions);

struct ScheduleViolation {
  enum class Kind { Coverage, AncestorOrder, ClosureSplit, SiblingOrder, Size, PassOrder };
  Kind kind;
  std::string message;
};

std::vector<ScheduleViolation> check_schedule_legality(const ContractionForest& forest, const BatchSchedule& schedule,
                                                       std::size_t b_max);

}  // namespace nlevel
