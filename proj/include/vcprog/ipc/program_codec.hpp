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

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vcprog/ipc/channel.hpp"
#include "vcprog/program.hpp"

namespace vcprog::ipc {

// Method payloads. Records travel in schema order with no schema bytes.
//
//   INIT_VERTEX_ATTR  req: i64 id, i64 out_degree, record<input vertex>
//                     resp: record<vertex>
//   EMPTY_MESSAGE     req: -                      resp: record<message>
//   MERGE_MESSAGE     req: record<msg>, record<msg>
//                     resp: record<message>
//   VERTEX_COMPUTE    req: record<vertex>, record<message>, i64 iter
//                     resp: record<vertex>, u8 active
//   EMIT_MESSAGE      req: i64 src, i64 dst, record<vertex>, record<edge>
//                     resp: u8 emit, then record<message> when emit == 1
//   SHUTDOWN          req: -                      resp: -
//
// HANDSHAKE bodies are records themselves; see the schemas below.

/// input_vertex:str, vertex:str, edge:str, message:str, num_vertices:i64,
/// num_edges:i64
const Schema& handshake_request_schema();
/// vertex:str, edge:str, message:str
const Schema& handshake_response_schema();

struct HandshakeRequest {
  Schema input_vertex;
  Schema vertex;
  Schema edge;
  Schema message;
  std::int64_t num_vertices = 0;
  std::int64_t num_edges = 0;
};

struct ProgramSchemas {
  Schema vertex;
  Schema edge;
  Schema message;

  friend bool operator==(const ProgramSchemas&, const ProgramSchemas&) = default;
};

std::vector<std::uint8_t> encode_handshake_request(const HandshakeRequest& req);
HandshakeRequest decode_handshake_request(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_handshake_response(const ProgramSchemas& schemas);
ProgramSchemas decode_handshake_response(std::span<const std::uint8_t> bytes);

/// `vertex;edge;message`, as passed on a guest command line.
std::string format_schemas(const ProgramSchemas& schemas);
/// Inverse of format_schemas; throws kInvalidArgument unless there are
/// exactly three `;`-separated parts.
ProgramSchemas parse_schemas(std::string_view text);

/**
 * Host-side proxy: a VertexProgram whose methods are RPCs over one client.
 * Not thread-safe; engines use one instance per worker. Requests are
 * encoded directly into the shared mapping and responses decoded from it.
 */
class ChannelProgram final : public VertexProgram {
 public:
  ChannelProgram(RpcClient& client, ProgramSchemas schemas, Schema input_vertex_schema);

  /// Returns the guest's declared schemas after checking they match ours
  /// (kSchemaMismatch otherwise).
  ProgramSchemas handshake(std::int64_t num_vertices, std::int64_t num_edges);

  const Schema& vertex_schema() const override { return schemas_.vertex; }
  const Schema& message_schema() const override { return schemas_.message; }

  Record init_vertex_attr(VertexId id, std::size_t out_degree, const Record& prop) const override;
  Record empty_message() const override;
  Record merge_message(const Record& m1, const Record& m2) const override;
  ComputeResult vertex_compute(const Record& prop, const Record& msg, std::size_t iter) const override;
  EmitResult emit_message(VertexId src, VertexId dst, const Record& src_prop,
                          const Record& edge_prop) const override;

  void shutdown();

  /// Supplies extra context (for example guest stderr) for channel failures.
  void set_diagnostics(std::function<std::string()> fn) { diagnose_ = std::move(fn); }

  RpcClient& client() { return client_; }

 private:
  void call(MethodIndex m, const RpcClient::Writer& write, const RpcClient::Reader& read) const;

  RpcClient& client_;
  ProgramSchemas schemas_;
  Schema input_vertex_schema_;
  std::function<std::string()> diagnose_;
};

/**
 * Guest-side dispatcher around a local program. HANDSHAKE checks the host's
 * vertex, edge and message schemas against `declared`, binds the program to
 * the announced graph summary (without vertex membership) and answers with
 * `declared`.
 */
class ProgramServer {
 public:
  ProgramServer(VertexProgram& program, ProgramSchemas declared);

  void handle(MethodIndex m, std::span<const std::uint8_t> request, ResponseWriter& out);
  Dispatcher dispatcher();

  bool bound() const { return bound_.load(std::memory_order_acquire); }

 private:
  VertexProgram& program_;
  ProgramSchemas declared_;
  Schema input_vertex_schema_;
  std::atomic<bool> bound_{false};
};

}  // namespace vcprog::ipc
