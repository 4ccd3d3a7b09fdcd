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

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vcprog/graph.hpp"

namespace vcprog {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    switch (s[++i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: out += s[i];
    }
  }
  return out;
}

std::int64_t parse_i64(std::string_view text) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw Error(ErrorCode::kRecordMismatch, "'" + std::string(text) + "' is not an i64");
  }
  return v;
}

Record parse_row(const Schema& schema, const std::vector<std::string_view>& cols,
                 std::size_t first, std::size_t line_no) {
  if (cols.size() != first + schema.size()) {
    throw Error(ErrorCode::kRecordMismatch,
                "line " + std::to_string(line_no) + ": expected " +
                    std::to_string(first + schema.size()) + " columns, got " +
                    std::to_string(cols.size()));
  }
  Record rec;
  rec.reserve(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    try {
      rec.push_back(parse_value(schema[i].type, cols[first + i]));
    } catch (const Error& e) {
      throw Error(ErrorCode::kRecordMismatch, "line " + std::to_string(line_no) + ", field '" +
                                                  schema[i].name + "': " + e.what());
    }
  }
  return rec;
}

Schema header_schema(const std::vector<std::string_view>& tokens, std::size_t fixed) {
  if (tokens.size() == fixed) return Schema{};
  if (tokens.size() == fixed + 1) {
    try {
      return parse_schema(tokens[fixed]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedHeader, std::string("bad schema in header: ") + e.what());
    }
  }
  throw Error(ErrorCode::kMalformedHeader, "unexpected tokens in header");
}

template <typename RowFn>
void for_each_row(std::istream& in, RowFn&& fn) {
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    fn(split(line, '\t'), line_no);
  }
}

}  // namespace

std::string format_value(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[64];
          auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
          return std::string(buf, p);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          return escape(x);
        }
      },
      v);
}

Value parse_value(FieldType type, std::string_view text) {
  switch (type) {
    case FieldType::kI64: return parse_i64(text);
    case FieldType::kF64: {
      double v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec == std::errc::result_out_of_range && p == text.data() + text.size()) {
        // Denormal underflow or overflow: fall back to strtod semantics.
        return std::strtod(std::string(text).c_str(), nullptr);
      }
      if (ec != std::errc{} || p != text.data() + text.size()) {
        throw Error(ErrorCode::kRecordMismatch, "'" + std::string(text) + "' is not an f64");
      }
      return v;
    }
    case FieldType::kBool:
      if (iequals(text, "true") || text == "1") return true;
      if (iequals(text, "false") || text == "0") return false;
      throw Error(ErrorCode::kRecordMismatch, "'" + std::string(text) + "' is not a bool");
    case FieldType::kStr: {
      auto s = unescape(text);
      if (!is_valid_utf8(s)) throw Error(ErrorCode::kInvalidUtf8, "string value is not valid UTF-8");
      return s;
    }
  }
  throw Error(ErrorCode::kUnknownType, "unknown field type");
}

PropertyGraph load_graph(std::istream& vertices, std::istream& edges) {
  std::string line;

  if (!std::getline(vertices, line)) throw Error(ErrorCode::kMalformedHeader, "vertex file is empty");
  strip_cr(line);
  auto vtok = split_ws(line);
  if (vtok.size() < 2 || vtok[0] != "#vertex" || !iequals(vtok[1], "id:i64")) {
    throw Error(ErrorCode::kMalformedHeader, "vertex header must start with '#vertex id:i64'");
  }
  Schema vertex_schema = header_schema(vtok, 2);

  if (!std::getline(edges, line)) throw Error(ErrorCode::kMalformedHeader, "edge file is empty");
  strip_cr(line);
  auto etok = split_ws(line);
  if (etok.size() < 4 || etok[0] != "#edge" || !iequals(etok[1], "src:i64") ||
      !iequals(etok[2], "dst:i64") || !etok[3].starts_with("directed:")) {
    throw Error(ErrorCode::kMalformedHeader,
                "edge header must start with '#edge src:i64 dst:i64 directed:<bool>'");
  }
  auto flag = etok[3].substr(std::string_view("directed:").size());
  bool directed;
  if (iequals(flag, "true")) {
    directed = true;
  } else if (iequals(flag, "false")) {
    directed = false;
  } else {
    throw Error(ErrorCode::kMalformedHeader, "directed flag must be true or false");
  }
  Schema edge_schema = header_schema(etok, 4);

  GraphBuilder builder(vertex_schema, edge_schema, directed);
  for_each_row(vertices, [&](const std::vector<std::string_view>& cols, std::size_t line_no) {
    auto id = parse_i64(cols[0]);
    builder.add_vertex(id, parse_row(vertex_schema, cols, 1, line_no));
  });
  for_each_row(edges, [&](const std::vector<std::string_view>& cols, std::size_t line_no) {
    if (cols.size() < 2) {
      throw Error(ErrorCode::kRecordMismatch, "line " + std::to_string(line_no) + ": missing dst");
    }
    auto src = parse_i64(cols[0]);
    auto dst = parse_i64(cols[1]);
    builder.add_edge(src, dst, parse_row(edge_schema, cols, 2, line_no));
  });
  return std::move(builder).build();
}

PropertyGraph load_graph(const std::string& vertex_path, const std::string& edge_path) {
  std::ifstream vin(vertex_path);
  if (!vin) throw Error(ErrorCode::kIo, "cannot open vertex file " + vertex_path);
  std::ifstream ein(edge_path);
  if (!ein) throw Error(ErrorCode::kIo, "cannot open edge file " + edge_path);
  return load_graph(vin, ein);
}

void save_vertices(const PropertyGraph& g, std::ostream& out) {
  out << "#vertex id:i64";
  if (!g.vertex_schema().empty()) out << ' ' << g.vertex_schema().text();
  out << '\n';
  std::string row;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    row = std::to_string(g.id(v));
    for (const auto& value : g.vertex(v)) {
      row += '\t';
      row += format_value(value);
    }
    row += '\n';
    out << row;
  }
}

void save_vertices(const PropertyGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  save_vertices(g, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write to " + path + " failed");
}

void save_edges(const PropertyGraph& g, std::ostream& out) {
  out << "#edge src:i64 dst:i64 directed:true";
  if (!g.edge_schema().empty()) out << ' ' << g.edge_schema().text();
  out << '\n';
  std::string row;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    for (auto e : g.out_edges(v)) {
      row = std::to_string(g.id(v));
      row += '\t';
      row += std::to_string(g.id(g.target(e)));
      for (const auto& value : g.edge(e)) {
        row += '\t';
        row += format_value(value);
      }
      row += '\n';
      out << row;
    }
  }
}

void save_edges(const PropertyGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  save_edges(g, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write to " + path + " failed");
}

}  // namespace vcprog
