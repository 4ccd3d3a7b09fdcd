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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "vcprog/program.hpp"

namespace vcprog {

std::string_view to_string(MessageLaw law) {
  switch (law) {
    case MessageLaw::kCommutativity: return "commutativity";
    case MessageLaw::kAssociativity: return "associativity";
    case MessageLaw::kIdentity: return "identity";
  }
  return "?";
}

namespace {

double sample_f64(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 2);
  switch (kind(rng)) {
    case 0: return static_cast<double>(std::uniform_int_distribution<int>(-1000, 1000)(rng));
    case 1: {
      auto num = std::uniform_int_distribution<std::int64_t>(-(1 << 20), 1 << 20)(rng);
      return std::ldexp(static_cast<double>(num), -std::uniform_int_distribution<int>(0, 20)(rng));
    }
    default: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
  }
}

std::int64_t sample_i64(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 9);
  switch (kind(rng)) {
    case 0: return std::numeric_limits<std::int64_t>::max();
    case 1: return std::numeric_limits<std::int64_t>::min();
    case 2:
    case 3: return std::uniform_int_distribution<std::int64_t>(-10, 10)(rng);
    default: return std::uniform_int_distribution<std::int64_t>(-1'000'000, 1'000'000)(rng);
  }
}

std::string sample_str(std::mt19937_64& rng) {
  static constexpr std::string_view kAlphabet = "abcxyz019 _-";
  std::string s(std::uniform_int_distribution<std::size_t>(0, 6)(rng), ' ');
  for (auto& c : s) c = kAlphabet[std::uniform_int_distribution<std::size_t>(0, kAlphabet.size() - 1)(rng)];
  return s;
}

bool f64_close(double a, double b) {
  if (std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b)) return true;
  if (std::isnan(a) && std::isnan(b)) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= 1e-12 * scale;
}

}  // namespace

Record sample_record(const Schema& schema, std::mt19937_64& rng) {
  Record rec;
  rec.reserve(schema.size());
  for (const auto& f : schema) {
    switch (f.type) {
      case FieldType::kI64: rec.push_back(sample_i64(rng)); break;
      case FieldType::kF64: rec.push_back(sample_f64(rng)); break;
      case FieldType::kBool: rec.push_back(std::bernoulli_distribution(0.5)(rng)); break;
      case FieldType::kStr: rec.push_back(sample_str(rng)); break;
    }
  }
  return rec;
}

bool law_equal(const Record& a, const Record& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].index() != b[i].index()) return false;
    if (std::holds_alternative<double>(a[i])) {
      if (!f64_close(a.f64(i), b.f64(i))) return false;
    } else if (a[i] != b[i]) {
      return false;
    }
  }
  return true;
}

LawReport check_message_laws(const VertexProgram& p, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& schema = p.message_schema();
  const Record empty = p.empty_message();
  LawReport report;
  report.samples = samples;

  auto record = [&](MessageLaw law, std::vector<Record> witness, Record lhs, Record rhs) {
    if (!law_equal(lhs, rhs)) {
      report.violations.push_back({law, std::move(witness), std::move(lhs), std::move(rhs)});
    }
  };

  for (std::size_t s = 0; s < samples; ++s) {
    Record a = sample_record(schema, rng);
    Record b = sample_record(schema, rng);
    Record c = sample_record(schema, rng);
    // Occasionally feed the identity itself into the binary laws.
    if (s % 16 == 0) b = empty;

    record(MessageLaw::kCommutativity, {a, b}, p.merge_message(a, b), p.merge_message(b, a));
    ++report.pairs_checked;

    record(MessageLaw::kIdentity, {a}, p.merge_message(a, empty), a);
    record(MessageLaw::kIdentity, {a}, p.merge_message(empty, a), a);

    record(MessageLaw::kAssociativity, {a, b, c}, p.merge_message(p.merge_message(a, b), c),
           p.merge_message(a, p.merge_message(b, c)));
    ++report.triples_checked;
  }
  return report;
}

}  // namespace vcprog
