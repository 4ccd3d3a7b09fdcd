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

#include "vcprog/graph.hpp"

#include <algorithm>
#include <numeric>

namespace vcprog {

PropertyGraph::PropertyGraph(Schema vertex_schema, std::vector<Record> vertex_props,
                             std::shared_ptr<const Topology> topology)
    : vertex_schema_(std::move(vertex_schema)),
      vertex_props_(std::move(vertex_props)),
      topo_(std::move(topology)) {
  if (vertex_props_.size() != topo_->ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "vertex table size does not match topology");
  }
}

std::optional<std::size_t> PropertyGraph::index_of(VertexId id) const {
  const auto& ids = topo_->ids;
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids.begin());
}

const Record& PropertyGraph::vertex_by_id(VertexId id) const {
  auto v = index_of(id);
  if (!v) throw Error(ErrorCode::kInvalidArgument, "no vertex with id " + std::to_string(id));
  return vertex_props_[*v];
}

PropertyGraph PropertyGraph::with_vertices(Schema schema, std::vector<Record> props) const {
  return PropertyGraph(std::move(schema), std::move(props), topo_);
}

GraphBuilder::GraphBuilder(Schema vertex_schema, Schema edge_schema, bool directed)
    : vertex_schema_(std::move(vertex_schema)),
      edge_schema_(std::move(edge_schema)),
      directed_(directed) {}

void GraphBuilder::add_vertex(VertexId id, Record props) {
  vertices_.emplace_back(id, std::move(props));
}

void GraphBuilder::add_edge(VertexId src, VertexId dst, Record props) {
  edges_.push_back({src, dst, std::move(props)});
}

PropertyGraph GraphBuilder::build() && {
  for (const auto& [id, rec] : vertices_) {
    if (id < 0) throw Error(ErrorCode::kNegativeVertexId, "negative vertex id " + std::to_string(id));
    if (!conforms(vertex_schema_, rec)) {
      throw Error(ErrorCode::kRecordMismatch, "vertex " + std::to_string(id) +
                                                  " record does not match schema [" +
                                                  vertex_schema_.text() + "]");
    }
  }
  std::sort(vertices_.begin(), vertices_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    if (vertices_[i].first == vertices_[i - 1].first) {
      throw Error(ErrorCode::kDuplicateVertex,
                  "duplicate vertex id " + std::to_string(vertices_[i].first));
    }
  }

  auto topo = std::make_shared<Topology>();
  topo->edge_schema = edge_schema_;
  topo->directed = directed_;
  const std::size_t n = vertices_.size();
  topo->ids.reserve(n);
  std::vector<Record> props;
  props.reserve(n);
  for (auto& [id, rec] : vertices_) {
    topo->ids.push_back(id);
    props.push_back(std::move(rec));
  }
  vertices_.clear();

  auto locate = [&](VertexId id) -> std::size_t {
    auto it = std::lower_bound(topo->ids.begin(), topo->ids.end(), id);
    if (it == topo->ids.end() || *it != id) {
      throw Error(ErrorCode::kDanglingEndpoint, "edge endpoint " + std::to_string(id) +
                                                    " is not a vertex");
    }
    return static_cast<std::size_t>(it - topo->ids.begin());
  };

  // Resolve endpoints; undirected edges contribute both directions, in input
  // order. A self-loop is stored once.
  struct Resolved {
    std::size_t src, dst, input;
  };
  std::vector<Resolved> resolved;
  resolved.reserve(directed_ ? edges_.size() : 2 * edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    if (!conforms(edge_schema_, e.props)) {
      throw Error(ErrorCode::kRecordMismatch, "edge " + std::to_string(e.src) + "->" +
                                                  std::to_string(e.dst) +
                                                  " record does not match schema [" +
                                                  edge_schema_.text() + "]");
    }
    auto s = locate(e.src);
    auto d = locate(e.dst);
    resolved.push_back({s, d, k});
    if (!directed_ && s != d) resolved.push_back({d, s, k});
  }

  // Counting sort by source keeps per-source input order.
  topo->offsets.assign(n + 1, 0);
  for (const auto& r : resolved) ++topo->offsets[r.src + 1];
  std::partial_sum(topo->offsets.begin(), topo->offsets.end(), topo->offsets.begin());
  std::vector<std::size_t> cursor(topo->offsets.begin(), topo->offsets.end() - 1);
  topo->targets.resize(resolved.size());
  std::vector<std::size_t> input_of(resolved.size());
  for (const auto& r : resolved) {
    auto pos = cursor[r.src]++;
    topo->targets[pos] = r.dst;
    input_of[pos] = r.input;
  }
  topo->edge_props.resize(resolved.size());
  if (directed_) {
    for (std::size_t pos = 0; pos < input_of.size(); ++pos) {
      topo->edge_props[pos] = std::move(edges_[input_of[pos]].props);
    }
  } else {
    for (std::size_t pos = 0; pos < input_of.size(); ++pos) {
      topo->edge_props[pos] = edges_[input_of[pos]].props;
    }
  }
  edges_.clear();

  return PropertyGraph(vertex_schema_, std::move(props), std::move(topo));
}

std::map<VertexId, std::size_t> out_degrees(const PropertyGraph& g) {
  std::map<VertexId, std::size_t> out;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) out.emplace(g.id(v), g.out_degree(v));
  return out;
}

Partitioning::Partitioning(const PropertyGraph& g, std::size_t num_workers)
    : num_workers_(num_workers) {
  if (num_workers == 0) throw Error(ErrorCode::kInvalidArgument, "num_workers must be positive");
  owned_.resize(num_workers);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) owned_[owner(g.id(v))].push_back(v);
}

Partitioning partition(const PropertyGraph& g, std::size_t num_workers) {
  return Partitioning(g, num_workers);
}

}  // namespace vcprog
