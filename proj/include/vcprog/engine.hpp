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
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "vcprog/graph.hpp"
#include "vcprog/program.hpp"

namespace vcprog {

enum class EngineKind { kPregel, kGas, kPushPullDense };

std::string_view to_string(EngineKind kind);
/// Accepts "pregel", "gas", "pushpull" (also "pushpull-dense").
std::optional<EngineKind> parse_engine_kind(std::string_view text);

struct ComputeEvent {
  std::size_t worker;
  VertexId vertex;
  std::size_t iter;
  bool had_message;
  bool was_active;
  bool now_active;
};

/// `iter` is the iteration whose vertex_compute produced the sender's state,
/// even for backends that invoke emit_message lazily in the next iteration.
struct EmitEvent {
  std::size_t worker;
  VertexId src;
  VertexId dst;
  std::size_t iter;
  bool emitted;
};

/// Optional instrumentation. Callbacks run on worker threads, concurrently;
/// `worker` identifies the caller.
struct EngineHooks {
  std::function<void(const ComputeEvent&)> on_compute;
  std::function<void(const EmitEvent&)> on_emit;
};

struct StepStats {
  std::size_t iter = 0;
  std::size_t num_active = 0;
  std::size_t participants = 0;
  std::size_t messages_received = 0;
  bool messages_pending = false;
  double seconds = 0;
};

struct RunReport {
  std::size_t iterations_executed = 0;
  bool converged_early = false;
  std::vector<StepStats> steps;
  double wall_seconds = 0;
};

struct RunOptions {
  std::size_t max_iter = 10;
  EngineKind kind = EngineKind::kPregel;
  std::size_t num_workers = 1;
  EngineHooks hooks;
};

struct RunResult {
  PropertyGraph graph;
  RunReport report;
};

/// Superstep state between barriers, materialized for inspection.
struct SuperstepState {
  std::size_t iter = 1;  // next iteration to execute
  std::vector<Record> values;
  std::vector<std::uint8_t> active;
  std::vector<std::optional<Record>> inbox;  // merged messages for `iter`
  std::size_t num_active = 0;
};

/**
 * Drives one program over one graph, a superstep at a time.
 *
 * Construction binds the program, caches empty_message() and initializes
 * every vertex with init_vertex_attr. All vertices start active. Each
 * step() runs one iteration on `num_workers` threads with the backend's
 * barrier structure (Pregel: one, GAS: three, Push-Pull dense: two).
 */
class Executor {
 public:
  Executor(const PropertyGraph& g, VertexProgram& p, EngineKind kind, std::size_t num_workers,
           EngineHooks hooks = {});
  /// The graph is referenced, not copied.
  Executor(PropertyGraph&&, VertexProgram&, EngineKind, std::size_t, EngineHooks = {}) = delete;
  ~Executor();
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  StepStats step();

  std::size_t next_iteration() const;
  /// True once a step ended with no active vertex and no pending message.
  bool quiescent() const;

  SuperstepState state() const;
  /// Input topology with the current vertex table.
  PropertyGraph result() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs up to max_iter supersteps, stopping early at quiescence.
RunResult run(const PropertyGraph& g, VertexProgram& p, const RunOptions& options);

}  // namespace vcprog
