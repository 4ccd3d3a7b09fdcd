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
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "vcprog/error.hpp"

namespace vcprog {

enum class FieldType : std::uint8_t { kI64, kF64, kBool, kStr };

std::string_view to_string(FieldType type);

struct Field {
  std::string name;
  FieldType type;

  friend bool operator==(const Field&, const Field&) = default;
};

/// Ordered, named field list shared by every record of one kind (vertex
/// properties, edge properties or messages). Never transmitted per row.
class Schema {
 public:
  Schema() = default;
  /// Throws kEmptyName / kDuplicateName.
  explicit Schema(std::vector<Field> fields);

  std::size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }
  const Field& operator[](std::size_t i) const { return fields_[i]; }
  const std::vector<Field>& fields() const { return fields_; }
  auto begin() const { return fields_.begin(); }
  auto end() const { return fields_.end(); }

  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Canonical text form, "name:type(,name:type)*" with lower-case types.
  std::string text() const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Field> fields_;
};

/// Parses "dist:f64,ok:bool". Type tokens are case-insensitive; the empty
/// string yields the empty schema.
Schema parse_schema(std::string_view text);

using Value = std::variant<std::int64_t, double, bool, std::string>;

FieldType type_of(const Value& v);

/// A row of typed scalars. Equality compares F64 values by bit pattern, so
/// NaN == NaN and 0.0 != -0.0.
class Record {
 public:
  using Storage = boost::container::small_vector<Value, 2>;

  Record() = default;
  Record(std::initializer_list<Value> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  const Value& operator[](std::size_t i) const { return values_[i]; }
  Value& operator[](std::size_t i) { return values_[i]; }

  std::int64_t i64(std::size_t i) const { return std::get<std::int64_t>(values_[i]); }
  double f64(std::size_t i) const { return std::get<double>(values_[i]); }
  bool boolean(std::size_t i) const { return std::get<bool>(values_[i]); }
  const std::string& str(std::size_t i) const { return std::get<std::string>(values_[i]); }

  void push_back(Value v) { values_.push_back(std::move(v)); }
  void reserve(std::size_t n) { values_.reserve(n); }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const Record& a, const Record& b);

 private:
  Storage values_;
};

std::string to_string(const Record& rec);

bool conforms(const Schema& schema, const Record& rec);
/// Throws kTypeMismatch naming the first offending field.
void check_conforms(const Schema& schema, const Record& rec);

bool is_valid_utf8(std::string_view s);

// Row serialization. Fields in schema order: I64/F64 as 8-byte little
// endian, BOOL as one byte (0/1), STR as a 4-byte little-endian length
// followed by UTF-8 bytes. No schema bytes are emitted.

std::size_t serialized_size(const Schema& schema, const Record& rec);
std::vector<std::uint8_t> serialize_record(const Schema& schema, const Record& rec);
/// Consumes the whole input; throws kTruncatedInput, kTrailingBytes,
/// kInvalidUtf8 or kInvalidBool.
Record deserialize_record(const Schema& schema, std::span<const std::uint8_t> bytes);

/// Bounds-checked little-endian writer over caller-owned memory. Used to
/// encode straight into IPC buffers without an intermediate copy.
class ByteWriter {
 public:
  explicit ByteWriter(std::span<std::uint8_t> out) : out_(out) {}

  void put_u8(std::uint8_t v);
  void put_u32(std::uint32_t v);
  void put_i64(std::int64_t v);
  void put_f64(double v);
  void put_str(std::string_view s);
  /// The source may overlap the destination.
  void put_bytes(std::span<const std::uint8_t> bytes);
  /// Validates conformance before writing anything.
  void put_record(const Schema& schema, const Record& rec);

  std::size_t written() const { return pos_; }

 private:
  std::uint8_t* reserve(std::size_t n);

  std::span<std::uint8_t> out_;
  std::size_t pos_ = 0;
};

/// Cursor over an encoded byte sequence. Records are prefix-free within a
/// schema, so several may be read back to back.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t get_u8();
  std::uint32_t get_u32();
  std::int64_t get_i64();
  double get_f64();
  std::string get_str();
  bool get_bool();
  Record get_record(const Schema& schema);

  std::size_t remaining() const { return in_.size() - pos_; }
  std::span<const std::uint8_t> rest() const { return in_.subspan(pos_); }
  /// Throws kTrailingBytes if anything is left.
  void expect_end() const;

 private:
  const std::uint8_t* take(std::size_t n);

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace vcprog
