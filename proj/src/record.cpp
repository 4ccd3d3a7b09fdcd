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

#include "vcprog/record.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace vcprog {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTypeMismatch: return "type-mismatch";
    case ErrorCode::kTruncatedInput: return "truncated-input";
    case ErrorCode::kTrailingBytes: return "trailing-bytes";
    case ErrorCode::kInvalidUtf8: return "invalid-utf8";
    case ErrorCode::kInvalidBool: return "invalid-bool";
    case ErrorCode::kDuplicateName: return "duplicate-name";
    case ErrorCode::kUnknownType: return "unknown-type";
    case ErrorCode::kEmptyName: return "empty-name";
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kRecordMismatch: return "record-mismatch";
    case ErrorCode::kDanglingEndpoint: return "dangling-endpoint";
    case ErrorCode::kDuplicateVertex: return "duplicate-vertex";
    case ErrorCode::kNegativeVertexId: return "negative-vertex-id";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kUnknownProgram: return "unknown-program";
    case ErrorCode::kInvalidParams: return "invalid-params";
    case ErrorCode::kSchemaMismatch: return "schema-mismatch";
    case ErrorCode::kOversizedPayload: return "oversized-payload";
    case ErrorCode::kChannelDead: return "channel-dead";
    case ErrorCode::kRemoteFailure: return "remote-failure";
    case ErrorCode::kProtocol: return "protocol";
  }
  return "unknown";
}

std::string_view to_string(FieldType type) {
  switch (type) {
    case FieldType::kI64: return "i64";
    case FieldType::kF64: return "f64";
    case FieldType::kBool: return "bool";
    case FieldType::kStr: return "str";
  }
  return "?";
}

Schema::Schema(std::vector<Field> fields) : fields_(std::move(fields)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& f : fields_) {
    if (f.name.empty()) throw Error(ErrorCode::kEmptyName, "schema field with empty name");
    if (!seen.insert(f.name).second) {
      throw Error(ErrorCode::kDuplicateName, "duplicate schema field '" + f.name + "'");
    }
  }
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (fields_[i].name == name) return i;
  }
  return std::nullopt;
}

std::string Schema::text() const {
  std::string out;
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (i) out += ',';
    out += fields_[i].name;
    out += ':';
    out += to_string(fields_[i].type);
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

FieldType parse_type(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "i64") return FieldType::kI64;
  if (lower == "f64") return FieldType::kF64;
  if (lower == "bool") return FieldType::kBool;
  if (lower == "str") return FieldType::kStr;
  throw Error(ErrorCode::kUnknownType, "unknown field type '" + std::string(token) + "'");
}

}  // namespace

Schema parse_schema(std::string_view text) {
  std::vector<Field> fields;
  text = trim(text);
  if (text.empty()) return Schema{};
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto token = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    auto colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kUnknownType, "schema token '" + std::string(token) + "' lacks ':type'");
    }
    auto name = trim(token.substr(0, colon));
    if (name.empty()) throw Error(ErrorCode::kEmptyName, "schema field with empty name");
    fields.push_back({std::string(name), parse_type(trim(token.substr(colon + 1)))});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return Schema(std::move(fields));
}

FieldType type_of(const Value& v) {
  return static_cast<FieldType>(v.index());
}

bool operator==(const Record& a, const Record& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.index() != y.index()) return false;
    if (std::holds_alternative<double>(x)) {
      if (std::bit_cast<std::uint64_t>(std::get<double>(x)) !=
          std::bit_cast<std::uint64_t>(std::get<double>(y))) {
        return false;
      }
    } else if (x != y) {
      return false;
    }
  }
  return true;
}

std::string to_string(const Record& rec) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (i) os << ", ";
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, bool>) {
            os << (v ? "true" : "false");
          } else if constexpr (std::is_same_v<T, std::string>) {
            os << '"' << v << '"';
          } else {
            os << v;
          }
        },
        rec[i]);
  }
  os << ']';
  return os.str();
}

bool conforms(const Schema& schema, const Record& rec) {
  if (rec.size() != schema.size()) return false;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (type_of(rec[i]) != schema[i].type) return false;
  }
  return true;
}

void check_conforms(const Schema& schema, const Record& rec) {
  if (rec.size() != schema.size()) {
    throw Error(ErrorCode::kTypeMismatch, "record has " + std::to_string(rec.size()) +
                                              " values, schema [" + schema.text() + "] has " +
                                              std::to_string(schema.size()) + " fields");
  }
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (type_of(rec[i]) != schema[i].type) {
      throw Error(ErrorCode::kTypeMismatch,
                  "field '" + schema[i].name + "' expects " + std::string(to_string(schema[i].type)) +
                      ", got " + std::string(to_string(type_of(rec[i]))));
    }
  }
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const auto n = s.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

std::size_t serialized_size(const Schema& schema, const Record& rec) {
  check_conforms(schema, rec);
  std::size_t n = 0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    switch (schema[i].type) {
      case FieldType::kI64:
      case FieldType::kF64: n += 8; break;
      case FieldType::kBool: n += 1; break;
      case FieldType::kStr: n += 4 + rec.str(i).size(); break;
    }
  }
  return n;
}

std::vector<std::uint8_t> serialize_record(const Schema& schema, const Record& rec) {
  std::vector<std::uint8_t> out(serialized_size(schema, rec));
  ByteWriter w(out);
  w.put_record(schema, rec);
  return out;
}

Record deserialize_record(const Schema& schema, std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Record rec = r.get_record(schema);
  r.expect_end();
  return rec;
}

// ---------------------------------------------------------------------------

std::uint8_t* ByteWriter::reserve(std::size_t n) {
  if (n > out_.size() - pos_) {
    throw Error(ErrorCode::kOversizedPayload, "encoded data exceeds the " +
                                                  std::to_string(out_.size()) + "-byte buffer");
  }
  auto* p = out_.data() + pos_;
  pos_ += n;
  return p;
}

void ByteWriter::put_u8(std::uint8_t v) { *reserve(1) = v; }

void ByteWriter::put_u32(std::uint32_t v) {
  auto* p = reserve(4);
  for (int k = 0; k < 4; ++k) p[k] = static_cast<std::uint8_t>(v >> (8 * k));
}

void ByteWriter::put_i64(std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  auto* p = reserve(8);
  for (int k = 0; k < 8; ++k) p[k] = static_cast<std::uint8_t>(u >> (8 * k));
}

void ByteWriter::put_f64(double v) { put_i64(std::bit_cast<std::int64_t>(v)); }

void ByteWriter::put_str(std::string_view s) {
  if (s.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kOversizedPayload, "string longer than 2^32-1 bytes");
  }
  put_u32(static_cast<std::uint32_t>(s.size()));
  if (!s.empty()) std::memcpy(reserve(s.size()), s.data(), s.size());
}

void ByteWriter::put_bytes(std::span<const std::uint8_t> bytes) {
  if (!bytes.empty()) std::memmove(reserve(bytes.size()), bytes.data(), bytes.size());
}

void ByteWriter::put_record(const Schema& schema, const Record& rec) {
  check_conforms(schema, rec);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    switch (schema[i].type) {
      case FieldType::kI64: put_i64(rec.i64(i)); break;
      case FieldType::kF64: put_f64(rec.f64(i)); break;
      case FieldType::kBool: put_u8(rec.boolean(i) ? 1 : 0); break;
      case FieldType::kStr:
        if (!is_valid_utf8(rec.str(i))) {
          throw Error(ErrorCode::kInvalidUtf8, "field '" + schema[i].name + "' is not valid UTF-8");
        }
        put_str(rec.str(i));
        break;
    }
  }
}

const std::uint8_t* ByteReader::take(std::size_t n) {
  if (n > in_.size() - pos_) {
    throw Error(ErrorCode::kTruncatedInput, "need " + std::to_string(n) + " bytes at offset " +
                                                std::to_string(pos_) + ", have " +
                                                std::to_string(in_.size() - pos_));
  }
  const auto* p = in_.data() + pos_;
  pos_ += n;
  return p;
}

std::uint8_t ByteReader::get_u8() { return *take(1); }

std::uint32_t ByteReader::get_u32() {
  const auto* p = take(4);
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(p[k]) << (8 * k);
  return v;
}

std::int64_t ByteReader::get_i64() {
  const auto* p = take(8);
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(p[k]) << (8 * k);
  return static_cast<std::int64_t>(v);
}

double ByteReader::get_f64() { return std::bit_cast<double>(get_i64()); }

std::string ByteReader::get_str() {
  auto len = get_u32();
  const auto* p = take(len);
  std::string s(reinterpret_cast<const char*>(p), len);
  if (!is_valid_utf8(s)) throw Error(ErrorCode::kInvalidUtf8, "string field is not valid UTF-8");
  return s;
}

bool ByteReader::get_bool() {
  auto b = get_u8();
  if (b > 1) throw Error(ErrorCode::kInvalidBool, "bool byte " + std::to_string(b) + " not in {0,1}");
  return b == 1;
}

Record ByteReader::get_record(const Schema& schema) {
  Record rec;
  rec.reserve(schema.size());
  for (const auto& f : schema) {
    switch (f.type) {
      case FieldType::kI64: rec.push_back(get_i64()); break;
      case FieldType::kF64: rec.push_back(get_f64()); break;
      case FieldType::kBool: rec.push_back(get_bool()); break;
      case FieldType::kStr: rec.push_back(get_str()); break;
    }
  }
  return rec;
}

void ByteReader::expect_end() const {
  if (pos_ != in_.size()) {
    throw Error(ErrorCode::kTrailingBytes,
                std::to_string(in_.size() - pos_) + " trailing bytes after record");
  }
}

}  // namespace vcprog
