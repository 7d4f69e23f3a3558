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

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "nlevel/static_hypergraph.h"

namespace nlevel::io {

enum class DuplicatePins { Reject, Deduplicate };

/// Reads the hMetis .hgr format: header "#nets #vertices [fmt]" with fmt 1 =
/// net weights, 10 = vertex weights, 11 = both; one net per line with 1-based
/// vertex ids (net weight first when present); vertex weights on the
/// trailing lines. Lines starting with '%' are comments.
StaticHypergraph read_hmetis(std::istream& in, DuplicatePins policy = DuplicatePins::Reject);
StaticHypergraph load_hmetis(const std::filesystem::path& path, DuplicatePins policy = DuplicatePins::Reject);

/// Writes weights only when some weight differs from 1.
void write_hmetis(const StaticHypergraph& hypergraph, std::ostream& out);
void save_hmetis(const StaticHypergraph& hypergraph, const std::filesystem::path& path);

/// Partition files hold one 0-based block id per line; line n is vertex n.
void write_partition(const std::vector<BlockId>& parts, const std::filesystem::path& path);
std::vector<BlockId> read_partition(const std::filesystem::path& path);

}  // namespace nlevel::io
