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

#include "nlevel/hmetis_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace nlevel::io {

namespace {

bool is_comment_or_blank(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '%';
}

std::vector<std::int64_t> parse_numbers(std::string_view line, std::size_t line_no) {
  std::vector<std::int64_t> numbers;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::int64_t value = 0;
    const auto* begin = line.data() + pos;
    const auto [ptr, ec] = std::from_chars(begin, line.data() + line.size(), value);
    if (ec != std::errc{} || (ptr != line.data() + line.size() && *ptr != ' ' && *ptr != '\t' && *ptr != '\r')) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected integer");
    }
    numbers.push_back(value);
    pos = static_cast<std::size_t>(ptr - line.data());
  }
  return numbers;
}

// Returns the next non-comment line; false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_comment_or_blank(line)) return true;
  }
  return false;
}

}  // namespace

StaticHypergraph read_hmetis(std::istream& in, DuplicatePins policy) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw InvalidInput("missing header");
  const auto header = parse_numbers(line, line_no);
  if (header.size() < 2 || header.size() > 3 || header[0] < 0 || header[1] < 0) {
    throw InvalidInput("malformed header: expected '#nets #vertices [fmt]'");
  }
  const auto num_nets = static_cast<std::size_t>(header[0]);
  const auto num_vertices = static_cast<VertexId>(header[1]);
  const std::int64_t fmt = header.size() == 3 ? header[2] : 0;
  if (fmt != 0 && fmt != 1 && fmt != 10 && fmt != 11) throw InvalidInput("unsupported fmt code " + std::to_string(fmt));
  const bool has_net_weights = fmt == 1 || fmt == 11;
  const bool has_vertex_weights = fmt == 10 || fmt == 11;

  std::vector<std::vector<VertexId>> nets(num_nets);
  std::vector<Weight> net_weights;
  if (has_net_weights) net_weights.resize(num_nets);
  for (std::size_t e = 0; e < num_nets; ++e) {
    if (!next_line(in, line, line_no)) throw InvalidInput("expected " + std::to_string(num_nets) + " nets, file ended early");
    auto numbers = parse_numbers(line, line_no);
    std::size_t first_pin = 0;
    if (has_net_weights) {
      if (numbers.empty()) throw InvalidInput("line " + std::to_string(line_no) + ": missing net weight");
      if (numbers[0] <= 0) throw InvalidInput("line " + std::to_string(line_no) + ": non-positive net weight");
      net_weights[e] = numbers[0];
      first_pin = 1;
    }
    if (numbers.size() <= first_pin) throw InvalidInput("line " + std::to_string(line_no) + ": net without pins");
    auto& net = nets[e];
    for (std::size_t i = first_pin; i < numbers.size(); ++i) {
      if (numbers[i] < 1 || numbers[i] > static_cast<std::int64_t>(num_vertices)) {
        throw InvalidInput("line " + std::to_string(line_no) + ": pin index " + std::to_string(numbers[i]) + " out of range");
      }
      net.push_back(static_cast<VertexId>(numbers[i] - 1));
    }
    if (policy == DuplicatePins::Deduplicate) {
      std::vector<VertexId> seen = net;
      std::ranges::sort(seen);
      if (std::ranges::adjacent_find(seen) != seen.end()) {
        std::vector<VertexId> unique;
        for (VertexId v : net) {
          if (std::ranges::find(unique, v) == unique.end()) unique.push_back(v);
        }
        net = std::move(unique);
      }
    }
  }

  std::vector<Weight> vertex_weights;
  if (has_vertex_weights) {
    vertex_weights.reserve(num_vertices);
    while (vertex_weights.size() < num_vertices) {
      if (!next_line(in, line, line_no)) throw InvalidInput("missing vertex weights");
      for (auto w : parse_numbers(line, line_no)) {
        if (w <= 0) throw InvalidInput("line " + std::to_string(line_no) + ": non-positive vertex weight");
        vertex_weights.push_back(w);
      }
    }
    if (vertex_weights.size() != num_vertices) throw InvalidInput("too many vertex weights");
  }
  if (next_line(in, line, line_no)) throw InvalidInput("line " + std::to_string(line_no) + ": trailing content");

  return StaticHypergraph(num_vertices, nets, std::move(net_weights), std::move(vertex_weights));
}

StaticHypergraph load_hmetis(const std::filesystem::path& path, DuplicatePins policy) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_hmetis(in, policy);
}

void write_hmetis(const StaticHypergraph& hypergraph, std::ostream& out) {
  const bool net_weights = std::ranges::any_of(hypergraph.net_weights(), [](Weight w) { return w != 1; });
  const bool vertex_weights = std::ranges::any_of(hypergraph.vertex_weights(), [](Weight w) { return w != 1; });
  out << hypergraph.num_nets() << ' ' << hypergraph.num_vertices();
  if (net_weights || vertex_weights) out << ' ' << (vertex_weights ? 10 : 0) + (net_weights ? 1 : 0);
  out << '\n';
  for (NetId e = 0; e < hypergraph.num_nets(); ++e) {
    bool first = true;
    if (net_weights) {
      out << hypergraph.net_weight(e);
      first = false;
    }
    for (VertexId v : hypergraph.pins(e)) {
      if (!first) out << ' ';
      out << v + 1;
      first = false;
    }
    out << '\n';
  }
  if (vertex_weights) {
    for (VertexId v = 0; v < hypergraph.num_vertices(); ++v) out << hypergraph.vertex_weight(v) << '\n';
  }
}

void save_hmetis(const StaticHypergraph& hypergraph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  write_hmetis(hypergraph, out);
}

void write_partition(const std::vector<BlockId>& parts, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  std::string buffer;
  buffer.reserve(parts.size() * 3);
  for (BlockId b : parts) {
    buffer += std::to_string(b);
    buffer += '\n';
  }
  out << buffer;
}

std::vector<BlockId> read_partition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::vector<BlockId> parts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    parts.push_back(static_cast<BlockId>(std::stol(line)));
  }
  return parts;
}

}  // namespace nlevel::io
