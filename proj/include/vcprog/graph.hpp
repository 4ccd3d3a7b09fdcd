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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <ranges>
#include <string>
#include <vector>

#include "vcprog/record.hpp"

namespace vcprog {

using VertexId = std::int64_t;

/// Immutable structure of a graph: sorted vertex ids and out-edges in CSR
/// form, indexed by dense vertex position. Edge records live here and are
/// shared (never copied) by every PropertyGraph derived from the same load.
struct Topology {
  std::vector<VertexId> ids;
  std::vector<std::size_t> offsets;  // ids.size() + 1 entries
  std::vector<std::size_t> targets;  // dense index of each stored edge's target
  std::vector<Record> edge_props;
  Schema edge_schema;
  bool directed = true;
};

/// Directed property graph. Undirected inputs are stored symmetrized.
class PropertyGraph {
 public:
  PropertyGraph() : PropertyGraph(Schema{}, {}, std::make_shared<Topology>()) {}
  PropertyGraph(Schema vertex_schema, std::vector<Record> vertex_props,
                std::shared_ptr<const Topology> topology);

  std::size_t num_vertices() const { return topo_->ids.size(); }
  std::size_t num_edges() const { return topo_->targets.size(); }
  bool directed() const { return topo_->directed; }

  const Schema& vertex_schema() const { return vertex_schema_; }
  const Schema& edge_schema() const { return topo_->edge_schema; }

  VertexId id(std::size_t v) const { return topo_->ids[v]; }
  const std::vector<VertexId>& ids() const { return topo_->ids; }
  std::optional<std::size_t> index_of(VertexId id) const;
  bool contains(VertexId id) const { return index_of(id).has_value(); }

  const Record& vertex(std::size_t v) const { return vertex_props_[v]; }
  const std::vector<Record>& vertex_props() const { return vertex_props_; }
  /// Property of the vertex with the given id; throws kInvalidArgument if absent.
  const Record& vertex_by_id(VertexId id) const;

  std::size_t out_degree(std::size_t v) const { return topo_->offsets[v + 1] - topo_->offsets[v]; }
  /// Positions of v's out-edges, usable with target() / edge().
  auto out_edges(std::size_t v) const {
    return std::views::iota(topo_->offsets[v], topo_->offsets[v + 1]);
  }
  std::size_t target(std::size_t e) const { return topo_->targets[e]; }
  const Record& edge(std::size_t e) const { return topo_->edge_props[e]; }

  const std::shared_ptr<const Topology>& topology() const { return topo_; }

  /// Same topology and edge records, new vertex table.
  PropertyGraph with_vertices(Schema schema, std::vector<Record> props) const;

 private:
  Schema vertex_schema_;
  std::vector<Record> vertex_props_;
  std::shared_ptr<const Topology> topo_;
};

/// Accumulates vertices and edges, then validates and lays out a graph.
class GraphBuilder {
 public:
  GraphBuilder(Schema vertex_schema, Schema edge_schema, bool directed);

  void add_vertex(VertexId id, Record props);
  void add_edge(VertexId src, VertexId dst, Record props);
  void reserve_edges(std::size_t n) { edges_.reserve(n); }

  /// Throws kNegativeVertexId, kDuplicateVertex, kDanglingEndpoint or
  /// kRecordMismatch.
  PropertyGraph build() &&;

 private:
  struct PendingEdge {
    VertexId src;
    VertexId dst;
    Record props;
  };

  Schema vertex_schema_;
  Schema edge_schema_;
  bool directed_;
  std::vector<std::pair<VertexId, Record>> vertices_;
  std::vector<PendingEdge> edges_;
};

std::map<VertexId, std::size_t> out_degrees(const PropertyGraph& g);

/// Modulo (hash) placement of vertices onto workers.
class Partitioning {
 public:
  Partitioning(const PropertyGraph& g, std::size_t num_workers);

  std::size_t num_workers() const { return num_workers_; }
  std::size_t owner(VertexId id) const { return static_cast<std::size_t>(id) % num_workers_; }
  /// Dense indices of the vertices owned by `worker`, ascending.
  const std::vector<std::size_t>& owned(std::size_t worker) const { return owned_[worker]; }

 private:
  std::size_t num_workers_;
  std::vector<std::vector<std::size_t>> owned_;
};

/// Throws kInvalidArgument when num_workers is zero.
Partitioning partition(const PropertyGraph& g, std::size_t num_workers);

// Unified text format. Vertex file: "#vertex id:i64 <schema>" then
// tab-separated rows. Edge file: "#edge src:i64 dst:i64 directed:<bool>
// <schema>" then "src\tdst\t<fields>" rows.

PropertyGraph load_graph(const std::string& vertex_path, const std::string& edge_path);
PropertyGraph load_graph(std::istream& vertices, std::istream& edges);

/// Header, then one row per vertex ascending by id, F64 with 17 significant
/// digits.
void save_vertices(const PropertyGraph& g, const std::string& path);
void save_vertices(const PropertyGraph& g, std::ostream& out);

/// Writes every stored edge under a directed:true header.
void save_edges(const PropertyGraph& g, const std::string& path);
void save_edges(const PropertyGraph& g, std::ostream& out);

/// Text form of one value as written by save_vertices.
std::string format_value(const Value& v);
Value parse_value(FieldType type, std::string_view text);

/// Directed graph whose out-degrees follow round(exp(Normal(mu, sigma)))
/// clamped to [0, n-1], with distinct uniformly drawn targets (no
/// self-loops). Edge schema is weight:f64, all weights 1.0.
PropertyGraph generate_lognormal(std::size_t num_vertices, double mu, double sigma,
                                 std::uint64_t seed);

}  // namespace vcprog
