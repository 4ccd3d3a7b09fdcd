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
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vcprog/graph.hpp"
#include "vcprog/record.hpp"

namespace vcprog {

/// Job-level facts a program may validate or capture in bind(). Remote
/// guests only see this, never the graph itself.
struct GraphSummary {
  std::size_t num_vertices = 0;
  std::size_t num_edges = 0;
  Schema input_vertex_schema;
  Schema edge_schema;
  /// Membership test for vertex ids; empty when unknown.
  std::function<bool(VertexId)> has_vertex;
};

GraphSummary summarize(const PropertyGraph& g);

struct ComputeResult {
  Record value;
  bool active = false;
};

struct EmitResult {
  bool emit = false;
  Record message;
};

/**
 * The five-method vertex program contract executed by every engine.
 *
 * merge_message must be commutative and associative with empty_message() as
 * its identity; engines fold messages in unspecified order and rely on these
 * laws for backend- and worker-count-independent results.
 *
 * All per-vertex methods are const and must be pure: engines call them
 * concurrently from every worker. Programs that cannot be shared across
 * threads (remote ones) hand out one instance per worker via for_worker().
 */
class VertexProgram {
 public:
  virtual ~VertexProgram() = default;

  /// Schema of the vertex records this program produces.
  virtual const Schema& vertex_schema() const = 0;
  virtual const Schema& message_schema() const = 0;

  /// Called once per run, before any other method. Validates parameters and
  /// schemas (kInvalidParams / kSchemaMismatch) and captures job-level
  /// constants such as |V|.
  virtual void bind(const GraphSummary& input) { (void)input; }

  virtual Record init_vertex_attr(VertexId id, std::size_t out_degree, const Record& prop) const = 0;
  virtual Record empty_message() const = 0;
  virtual Record merge_message(const Record& m1, const Record& m2) const = 0;
  virtual ComputeResult vertex_compute(const Record& prop, const Record& msg,
                                       std::size_t iter) const = 0;
  virtual EmitResult emit_message(VertexId src, VertexId dst, const Record& src_prop,
                                  const Record& edge_prop) const = 0;

  /// The instance worker `worker` must use. Native programs return *this.
  virtual const VertexProgram& for_worker(std::size_t worker) const {
    (void)worker;
    return *this;
  }
  /// Upper bound on usable workers, if any.
  virtual std::optional<std::size_t> max_workers() const { return std::nullopt; }
};

// ---------------------------------------------------------------------------
// Algebraic law checking

enum class MessageLaw { kCommutativity, kAssociativity, kIdentity };

std::string_view to_string(MessageLaw law);

struct LawViolation {
  MessageLaw law;
  std::vector<Record> witness;  // inputs that broke the law
  Record lhs;
  Record rhs;
};

struct LawReport {
  std::size_t samples = 0;
  std::size_t pairs_checked = 0;
  std::size_t triples_checked = 0;
  std::vector<LawViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Random record conforming to `schema`. F64 values mix small integers,
/// dyadic fractions and wide-range reals; I64 values include the extremes.
Record sample_record(const Schema& schema, std::mt19937_64& rng);

/// Equality used by the law checker: exact for I64/BOOL/STR, F64 equal when
/// bit-identical or within 1e-12 relative (floating-point sums are not
/// exactly associative).
bool law_equal(const Record& a, const Record& b);

/**
 * Samples `samples` rounds of random messages and checks, per round, one
 * commutativity pair, one identity case (both argument orders) and one
 * associativity triple. Violations are report content, not errors.
 */
LawReport check_message_laws(const VertexProgram& p, std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Program construction

using ParamMap = std::map<std::string, std::string>;

/// Builds one of the shipped operators: "pagerank", "sssp" or "cc".
/// Throws kUnknownProgram or kInvalidParams.
std::unique_ptr<VertexProgram> native_program(const std::string& name, const ParamMap& params);

struct RemoteSpec {
  std::string program_path;
  std::vector<std::string> guest_command;  // argv prefix; launch flags are appended
  std::string workdir;
  Schema vertex_schema;
  Schema edge_schema;
  Schema message_schema;
};

struct ProgramDescriptor {
  enum class Kind { kNative, kRemote };
  Kind kind = Kind::kNative;
  std::string native_name;
  ParamMap params;
  std::optional<RemoteSpec> remote;
};

}  // namespace vcprog
