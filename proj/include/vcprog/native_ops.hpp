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

#include <string>

#include "vcprog/program.hpp"

namespace vcprog {

struct PageRankParams {
  double damping = 0.85;
  std::size_t iters = 10;
};

struct SsspParams {
  VertexId source = 0;
  std::string weight_field = "weight";
};

/// Fixed-iteration PageRank. Vertex record is (rank, outdeg); iteration 1
/// keeps the initial 1/|V| and broadcasts, later iterations apply
/// rank = (1-d)/|V| + d * sum. Dangling vertices drop their mass.
class PageRankProgram final : public VertexProgram {
 public:
  explicit PageRankProgram(PageRankParams params);

  const Schema& vertex_schema() const override { return vertex_schema_; }
  const Schema& message_schema() const override { return message_schema_; }
  void bind(const GraphSummary& input) override;

  Record init_vertex_attr(VertexId id, std::size_t out_degree, const Record& prop) const override;
  Record empty_message() const override { return Record{0.0}; }
  Record merge_message(const Record& m1, const Record& m2) const override {
    return Record{m1.f64(0) + m2.f64(0)};
  }
  ComputeResult vertex_compute(const Record& prop, const Record& msg, std::size_t iter) const override;
  EmitResult emit_message(VertexId src, VertexId dst, const Record& src_prop,
                          const Record& edge_prop) const override;

  const PageRankParams& params() const { return params_; }

 private:
  PageRankParams params_;
  Schema vertex_schema_;
  Schema message_schema_;
  std::size_t num_vertices_ = 0;
};

/// Bellman-Ford style shortest paths: min-merge over distances, a vertex
/// stays active only while its distance improves.
class SsspProgram final : public VertexProgram {
 public:
  explicit SsspProgram(SsspParams params);

  const Schema& vertex_schema() const override { return schema_; }
  const Schema& message_schema() const override { return schema_; }
  void bind(const GraphSummary& input) override;

  Record init_vertex_attr(VertexId id, std::size_t out_degree, const Record& prop) const override;
  Record empty_message() const override;
  Record merge_message(const Record& m1, const Record& m2) const override;
  ComputeResult vertex_compute(const Record& prop, const Record& msg, std::size_t iter) const override;
  EmitResult emit_message(VertexId src, VertexId dst, const Record& src_prop,
                          const Record& edge_prop) const override;

  const SsspParams& params() const { return params_; }

 private:
  SsspParams params_;
  Schema schema_;
  std::size_t weight_index_ = 0;
};

/// Min-label propagation. Meant for symmetrized graphs; on directed input
/// it computes directed min-label reachability.
class CcProgram final : public VertexProgram {
 public:
  CcProgram();

  const Schema& vertex_schema() const override { return schema_; }
  const Schema& message_schema() const override { return schema_; }

  Record init_vertex_attr(VertexId id, std::size_t out_degree, const Record& prop) const override;
  Record empty_message() const override;
  Record merge_message(const Record& m1, const Record& m2) const override;
  ComputeResult vertex_compute(const Record& prop, const Record& msg, std::size_t iter) const override;
  EmitResult emit_message(VertexId src, VertexId dst, const Record& src_prop,
                          const Record& edge_prop) const override;

 private:
  Schema schema_;
};

}  // namespace vcprog
