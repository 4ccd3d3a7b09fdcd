// Copyright 2026 The VCProg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vcprog/graph.hpp"
#include "vcprog/record.hpp"

namespace vcprog::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "vcprog-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline PropertyGraph graph_from_text(const std::string& vertices, const std::string& edges) {
  std::istringstream v(vertices), e(edges);
  return load_graph(v, e);
}

struct RandomGraphSpec {
  std::size_t max_vertices = 2000;
  std::size_t max_edges = 20000;
  bool directed = true;
  /// Weights drawn from {0.25, 0.5, ..., 10} when true, else uniform (0, 10].
  bool dyadic_weights = false;
};

/// Seeded random graph: sparse, non-contiguous ids; duplicate edges and
/// self-loops allowed; edge schema weight:f64; empty vertex schema. For an
/// undirected graph the stored edge count is at most max_edges.
inline PropertyGraph random_graph(std::uint64_t seed, const RandomGraphSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  const auto n = std::uniform_int_distribution<std::size_t>(1, spec.max_vertices)(rng);
  const std::size_t edge_cap = spec.directed ? spec.max_edges : spec.max_edges / 2;
  const auto m = std::uniform_int_distribution<std::size_t>(0, std::min(edge_cap, n * 10))(rng);

  std::vector<VertexId> ids;
  ids.reserve(n);
  VertexId next = std::uniform_int_distribution<VertexId>(0, 5)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(next);
    next += std::uniform_int_distribution<VertexId>(1, 4)(rng);
  }
  std::shuffle(ids.begin(), ids.end(), rng);

  GraphBuilder b(Schema{}, parse_schema("weight:f64"), spec.directed);
  for (auto id : ids) b.add_vertex(id, Record{});
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> real(0.0, 10.0);
  std::uniform_int_distribution<int> quarter(1, 40);
  for (std::size_t k = 0; k < m; ++k) {
    const double w = spec.dyadic_weights ? quarter(rng) * 0.25 : 10.0 - real(rng);
    b.add_edge(ids[pick(rng)], ids[pick(rng)], Record{w});
  }
  return std::move(b).build();
}

/// First mismatch between two vertex tables, or nullopt. I64/BOOL/STR must be
/// equal; F64 within `tol` absolute (equal infinities and NaNs match).
inline std::optional<std::string> table_mismatch(const PropertyGraph& a, const PropertyGraph& b,
                                                 double tol) {
  if (a.num_vertices() != b.num_vertices()) return "vertex counts differ";
  if (!(a.vertex_schema() == b.vertex_schema())) return "schemas differ";
  for (std::size_t v = 0; v < a.num_vertices(); ++v) {
    if (a.id(v) != b.id(v)) return "ids differ at position " + std::to_string(v);
    const auto& ra = a.vertex(v);
    const auto& rb = b.vertex(v);
    for (std::size_t i = 0; i < ra.size(); ++i) {
      bool same;
      if (std::holds_alternative<double>(ra[i])) {
        const double x = ra.f64(i), y = rb.f64(i);
        same = (std::isnan(x) && std::isnan(y)) || x == y || std::fabs(x - y) <= tol;
      } else {
        same = ra[i] == rb[i];
      }
      if (!same) {
        return "vertex " + std::to_string(a.id(v)) + " field " + a.vertex_schema()[i].name + ": " +
               to_string(ra) + " vs " + to_string(rb);
      }
    }
  }
  return std::nullopt;
}

}  // namespace vcprog::testing
