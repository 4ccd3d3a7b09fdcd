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

#include "vcprog/native_ops.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace vcprog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxLabel = std::numeric_limits<std::int64_t>::max();

}  // namespace

GraphSummary summarize(const PropertyGraph& g) {
  GraphSummary s;
  s.num_vertices = g.num_vertices();
  s.num_edges = g.num_edges();
  s.input_vertex_schema = g.vertex_schema();
  s.edge_schema = g.edge_schema();
  // Borrows g; only valid while the caller keeps the graph alive.
  s.has_vertex = [&g](VertexId id) { return g.contains(id); };
  return s;
}

// ---------------------------------------------------------------------------
// PageRank

PageRankProgram::PageRankProgram(PageRankParams params)
    : params_(params),
      vertex_schema_(parse_schema("rank:f64,outdeg:f64")),
      message_schema_(parse_schema("rank:f64")) {
  if (!(params_.damping > 0.0 && params_.damping < 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "pagerank damping must lie in (0,1)");
  }
  if (params_.iters == 0) throw Error(ErrorCode::kInvalidParams, "pagerank iters must be >= 1");
}

void PageRankProgram::bind(const GraphSummary& input) {
  num_vertices_ = input.num_vertices;
}

Record PageRankProgram::init_vertex_attr(VertexId, std::size_t out_degree, const Record&) const {
  if (num_vertices_ == 0) throw Error(ErrorCode::kInvalidParams, "pagerank used before bind()");
  return Record{1.0 / static_cast<double>(num_vertices_), static_cast<double>(out_degree)};
}

ComputeResult PageRankProgram::vertex_compute(const Record& prop, const Record& msg,
                                              std::size_t iter) const {
  const bool active = iter < params_.iters;
  if (iter == 1) return {prop, active};
  const double n = static_cast<double>(num_vertices_);
  const double rank = (1.0 - params_.damping) / n + params_.damping * msg.f64(0);
  return {Record{rank, prop.f64(1)}, active};
}

EmitResult PageRankProgram::emit_message(VertexId, VertexId, const Record& src_prop,
                                         const Record&) const {
  return {true, Record{src_prop.f64(0) / src_prop.f64(1)}};
}

// ---------------------------------------------------------------------------
// SSSP

SsspProgram::SsspProgram(SsspParams params)
    : params_(std::move(params)), schema_(parse_schema("dist:f64")) {
  if (params_.weight_field.empty()) {
    throw Error(ErrorCode::kInvalidParams, "sssp weight field name is empty");
  }
}

void SsspProgram::bind(const GraphSummary& input) {
  auto idx = input.edge_schema.index_of(params_.weight_field);
  if (!idx || input.edge_schema[*idx].type != FieldType::kF64) {
    throw Error(ErrorCode::kSchemaMismatch, "sssp needs an f64 edge field '" +
                                                params_.weight_field + "', edge schema is [" +
                                                input.edge_schema.text() + "]");
  }
  if (input.has_vertex && !input.has_vertex(params_.source)) {
    throw Error(ErrorCode::kInvalidParams,
                "sssp source " + std::to_string(params_.source) + " is not in the graph");
  }
  weight_index_ = *idx;
}

Record SsspProgram::init_vertex_attr(VertexId id, std::size_t, const Record&) const {
  return Record{id == params_.source ? 0.0 : kInf};
}

Record SsspProgram::empty_message() const { return Record{kInf}; }

Record SsspProgram::merge_message(const Record& m1, const Record& m2) const {
  return Record{std::min(m1.f64(0), m2.f64(0))};
}

ComputeResult SsspProgram::vertex_compute(const Record& prop, const Record& msg,
                                          std::size_t iter) const {
  const double cur = prop.f64(0);
  const double next = std::min(cur, msg.f64(0));
  // Only the source holds a finite distance at iteration 1.
  const bool active = next < cur || (iter == 1 && std::isfinite(cur));
  return {Record{next}, active};
}

EmitResult SsspProgram::emit_message(VertexId, VertexId, const Record& src_prop,
                                     const Record& edge_prop) const {
  const double d = src_prop.f64(0);
  if (!std::isfinite(d)) return {false, {}};
  return {true, Record{d + edge_prop.f64(weight_index_)}};
}

// ---------------------------------------------------------------------------
// Connected components

CcProgram::CcProgram() : schema_(parse_schema("label:i64")) {}

Record CcProgram::init_vertex_attr(VertexId id, std::size_t, const Record&) const {
  return Record{id};
}

Record CcProgram::empty_message() const { return Record{kMaxLabel}; }

Record CcProgram::merge_message(const Record& m1, const Record& m2) const {
  return Record{std::min(m1.i64(0), m2.i64(0))};
}

ComputeResult CcProgram::vertex_compute(const Record& prop, const Record& msg,
                                        std::size_t iter) const {
  const auto cur = prop.i64(0);
  const auto next = std::min(cur, msg.i64(0));
  return {Record{next}, next < cur || iter == 1};
}

EmitResult CcProgram::emit_message(VertexId, VertexId, const Record& src_prop,
                                   const Record&) const {
  return {true, Record{src_prop.i64(0)}};
}

// ---------------------------------------------------------------------------
// Factory

namespace {

template <typename T>
T param_number(const ParamMap& params, const std::string& key, T fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const auto& text = it->second;
  T value{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidParams, "parameter " + key + "='" + text + "' is not a number");
  }
  return value;
}

void reject_unknown(const ParamMap& params, std::initializer_list<std::string_view> known,
                    const std::string& program) {
  for (const auto& [key, value] : params) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::kInvalidParams, program + " has no parameter '" + key + "'");
    }
  }
}

}  // namespace

std::unique_ptr<VertexProgram> native_program(const std::string& name, const ParamMap& params) {
  if (name == "pagerank") {
    reject_unknown(params, {"damping", "iters"}, name);
    PageRankParams p;
    p.damping = param_number(params, "damping", p.damping);
    p.iters = param_number(params, "iters", p.iters);
    return std::make_unique<PageRankProgram>(p);
  }
  if (name == "sssp") {
    reject_unknown(params, {"source", "weight"}, name);
    SsspParams p;
    p.source = param_number(params, "source", p.source);
    if (auto it = params.find("weight"); it != params.end()) p.weight_field = it->second;
    return std::make_unique<SsspProgram>(p);
  }
  if (name == "cc") {
    reject_unknown(params, {}, name);
    return std::make_unique<CcProgram>();
  }
  throw Error(ErrorCode::kUnknownProgram, "unknown native program '" + name + "'");
}

}  // namespace vcprog
