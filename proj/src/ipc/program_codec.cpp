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

#include "vcprog/ipc/program_codec.hpp"

namespace vcprog::ipc {

const Schema& handshake_request_schema() {
  static const Schema s = parse_schema(
      "input_vertex:str,vertex:str,edge:str,message:str,num_vertices:i64,num_edges:i64");
  return s;
}

const Schema& handshake_response_schema() {
  static const Schema s = parse_schema("vertex:str,edge:str,message:str");
  return s;
}

std::vector<std::uint8_t> encode_handshake_request(const HandshakeRequest& req) {
  return serialize_record(handshake_request_schema(),
                          Record{req.input_vertex.text(), req.vertex.text(), req.edge.text(),
                                 req.message.text(), req.num_vertices, req.num_edges});
}

HandshakeRequest decode_handshake_request(std::span<const std::uint8_t> bytes) {
  auto r = deserialize_record(handshake_request_schema(), bytes);
  HandshakeRequest req;
  req.input_vertex = parse_schema(r.str(0));
  req.vertex = parse_schema(r.str(1));
  req.edge = parse_schema(r.str(2));
  req.message = parse_schema(r.str(3));
  req.num_vertices = r.i64(4);
  req.num_edges = r.i64(5);
  if (req.num_vertices < 0 || req.num_edges < 0) {
    throw Error(ErrorCode::kProtocol, "negative graph size in handshake");
  }
  return req;
}

std::vector<std::uint8_t> encode_handshake_response(const ProgramSchemas& s) {
  return serialize_record(handshake_response_schema(),
                          Record{s.vertex.text(), s.edge.text(), s.message.text()});
}

ProgramSchemas decode_handshake_response(std::span<const std::uint8_t> bytes) {
  auto r = deserialize_record(handshake_response_schema(), bytes);
  return {parse_schema(r.str(0)), parse_schema(r.str(1)), parse_schema(r.str(2))};
}

std::string format_schemas(const ProgramSchemas& s) {
  return s.vertex.text() + ";" + s.edge.text() + ";" + s.message.text();
}

ProgramSchemas parse_schemas(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(';', start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected 'vertex;edge;message' schemas, got '" + std::string(text) + "'");
  }
  return {parse_schema(parts[0]), parse_schema(parts[1]), parse_schema(parts[2])};
}

// ---------------------------------------------------------------------------
// Host side

ChannelProgram::ChannelProgram(RpcClient& client, ProgramSchemas schemas,
                               Schema input_vertex_schema)
    : client_(client),
      schemas_(std::move(schemas)),
      input_vertex_schema_(std::move(input_vertex_schema)) {}

void ChannelProgram::call(MethodIndex m, const RpcClient::Writer& write,
                          const RpcClient::Reader& read) const {
  try {
    client_.call_with(m, write, read);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kChannelDead || !diagnose_) throw;
    throw Error(e.code(), std::string(e.what()) + diagnose_());
  }
}

ProgramSchemas ChannelProgram::handshake(std::int64_t num_vertices, std::int64_t num_edges) {
  const auto body = encode_handshake_request({input_vertex_schema_, schemas_.vertex,
                                              schemas_.edge, schemas_.message, num_vertices,
                                              num_edges});
  std::vector<std::uint8_t> resp;
  try {
    resp = client_.handshake(body);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kChannelDead || !diagnose_) throw;
    throw Error(e.code(), std::string(e.what()) + diagnose_());
  }
  auto declared = decode_handshake_response(resp);
  if (!(declared == schemas_)) {
    throw Error(ErrorCode::kSchemaMismatch, "guest declared schemas '" + format_schemas(declared) +
                                                "', host expected '" + format_schemas(schemas_) +
                                                "'");
  }
  return declared;
}

Record ChannelProgram::init_vertex_attr(VertexId id, std::size_t out_degree,
                                        const Record& prop) const {
  Record out;
  call(
      MethodIndex::kInitVertexAttr,
      [&](ByteWriter& w) {
        w.put_i64(id);
        w.put_i64(static_cast<std::int64_t>(out_degree));
        w.put_record(input_vertex_schema_, prop);
      },
      [&](std::span<const std::uint8_t> body) {
        ByteReader r(body);
        out = r.get_record(schemas_.vertex);
        r.expect_end();
      });
  return out;
}

Record ChannelProgram::empty_message() const {
  Record out;
  call(
      MethodIndex::kEmptyMessage, [](ByteWriter&) {},
      [&](std::span<const std::uint8_t> body) { out = deserialize_record(schemas_.message, body); });
  return out;
}

Record ChannelProgram::merge_message(const Record& m1, const Record& m2) const {
  Record out;
  call(
      MethodIndex::kMergeMessage,
      [&](ByteWriter& w) {
        w.put_record(schemas_.message, m1);
        w.put_record(schemas_.message, m2);
      },
      [&](std::span<const std::uint8_t> body) { out = deserialize_record(schemas_.message, body); });
  return out;
}

ComputeResult ChannelProgram::vertex_compute(const Record& prop, const Record& msg,
                                             std::size_t iter) const {
  ComputeResult out;
  call(
      MethodIndex::kVertexCompute,
      [&](ByteWriter& w) {
        w.put_record(schemas_.vertex, prop);
        w.put_record(schemas_.message, msg);
        w.put_i64(static_cast<std::int64_t>(iter));
      },
      [&](std::span<const std::uint8_t> body) {
        ByteReader r(body);
        out.value = r.get_record(schemas_.vertex);
        out.active = r.get_bool();
        r.expect_end();
      });
  return out;
}

EmitResult ChannelProgram::emit_message(VertexId src, VertexId dst, const Record& src_prop,
                                        const Record& edge_prop) const {
  EmitResult out;
  call(
      MethodIndex::kEmitMessage,
      [&](ByteWriter& w) {
        w.put_i64(src);
        w.put_i64(dst);
        w.put_record(schemas_.vertex, src_prop);
        w.put_record(schemas_.edge, edge_prop);
      },
      [&](std::span<const std::uint8_t> body) {
        ByteReader r(body);
        out.emit = r.get_bool();
        if (out.emit) out.message = r.get_record(schemas_.message);
        r.expect_end();
      });
  return out;
}

void ChannelProgram::shutdown() {
  call(MethodIndex::kShutdown, [](ByteWriter&) {}, [](std::span<const std::uint8_t>) {});
}

// ---------------------------------------------------------------------------
// Guest side

ProgramServer::ProgramServer(VertexProgram& program, ProgramSchemas declared)
    : program_(program), declared_(std::move(declared)) {
  if (!(program_.vertex_schema() == declared_.vertex) ||
      !(program_.message_schema() == declared_.message)) {
    throw Error(ErrorCode::kSchemaMismatch,
                "program schemas '" + program_.vertex_schema().text() + ";" +
                    program_.message_schema().text() + "' differ from declared '" +
                    format_schemas(declared_) + "'");
  }
}

void ProgramServer::handle(MethodIndex m, std::span<const std::uint8_t> request,
                           ResponseWriter& out) {
  auto& w = out.out();
  if (m == MethodIndex::kHandshake) {
    auto req = decode_handshake_request(request);
    const ProgramSchemas host{req.vertex, req.edge, req.message};
    if (!(host == declared_)) {
      throw Error(ErrorCode::kSchemaMismatch, "host schemas '" + format_schemas(host) +
                                                  "' differ from declared '" +
                                                  format_schemas(declared_) + "'");
    }
    GraphSummary summary;
    summary.num_vertices = static_cast<std::size_t>(req.num_vertices);
    summary.num_edges = static_cast<std::size_t>(req.num_edges);
    summary.input_vertex_schema = req.input_vertex;
    summary.edge_schema = req.edge;
    program_.bind(summary);
    input_vertex_schema_ = std::move(req.input_vertex);
    bound_.store(true, std::memory_order_release);
    out.write(encode_handshake_response(declared_));
    return;
  }
  if (m == MethodIndex::kShutdown) return;

  // Every branch decodes the whole request before writing: the response
  // region overlaps the request.
  ByteReader r(request);
  switch (m) {
    case MethodIndex::kInitVertexAttr: {
      const auto id = r.get_i64();
      const auto deg = r.get_i64();
      if (deg < 0) throw Error(ErrorCode::kProtocol, "negative out-degree");
      auto prop = r.get_record(input_vertex_schema_);
      r.expect_end();
      w.put_record(program_.vertex_schema(),
                   program_.init_vertex_attr(id, static_cast<std::size_t>(deg), prop));
      break;
    }
    case MethodIndex::kEmptyMessage:
      r.expect_end();
      w.put_record(program_.message_schema(), program_.empty_message());
      break;
    case MethodIndex::kMergeMessage: {
      auto m1 = r.get_record(program_.message_schema());
      auto m2 = r.get_record(program_.message_schema());
      r.expect_end();
      w.put_record(program_.message_schema(), program_.merge_message(m1, m2));
      break;
    }
    case MethodIndex::kVertexCompute: {
      auto prop = r.get_record(program_.vertex_schema());
      auto msg = r.get_record(program_.message_schema());
      const auto iter = r.get_i64();
      r.expect_end();
      if (iter < 1) throw Error(ErrorCode::kProtocol, "iteration numbers start at 1");
      auto res = program_.vertex_compute(prop, msg, static_cast<std::size_t>(iter));
      w.put_record(program_.vertex_schema(), res.value);
      w.put_u8(res.active ? 1 : 0);
      break;
    }
    case MethodIndex::kEmitMessage: {
      const auto src = r.get_i64();
      const auto dst = r.get_i64();
      auto prop = r.get_record(program_.vertex_schema());
      auto edge = r.get_record(declared_.edge);
      r.expect_end();
      auto res = program_.emit_message(src, dst, prop, edge);
      w.put_u8(res.emit ? 1 : 0);
      if (res.emit) w.put_record(program_.message_schema(), res.message);
      break;
    }
    default:
      throw Error(ErrorCode::kProtocol, "unexpected method " + std::string(to_string(m)));
  }
}

Dispatcher ProgramServer::dispatcher() {
  return [this](MethodIndex m, std::span<const std::uint8_t> req, ResponseWriter& out) {
    handle(m, req, out);
  };
}

}  // namespace vcprog::ipc
