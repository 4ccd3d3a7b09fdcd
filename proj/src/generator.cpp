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
#include <cmath>
#include <random>
#include <unordered_set>

#include "vcprog/graph.hpp"

namespace vcprog {

namespace {

std::size_t draw_degree(std::mt19937_64& rng, std::normal_distribution<double>* normal, double mu,
                        std::size_t max_degree) {
  const double x = normal ? (*normal)(rng) : mu;
  const double d = std::round(std::exp(x));
  if (!(d > 0)) return 0;
  if (d >= static_cast<double>(max_degree)) return max_degree;
  return static_cast<std::size_t>(d);
}

// Floyd's sampling of k distinct values from [0, m).
void sample_distinct(std::mt19937_64& rng, std::size_t m, std::size_t k,
                     std::vector<std::size_t>& out) {
  out.clear();
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(k * 2);
  for (std::size_t j = m - k; j < m; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    auto t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
}

}  // namespace

PropertyGraph generate_lognormal(std::size_t num_vertices, double mu, double sigma,
                                 std::uint64_t seed) {
  if (num_vertices == 0) throw Error(ErrorCode::kInvalidArgument, "num_vertices must be >= 1");
  if (!(sigma >= 0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw Error(ErrorCode::kInvalidArgument, "mu must be finite and sigma finite and >= 0");
  }

  std::mt19937_64 rng(seed);
  std::optional<std::normal_distribution<double>> normal;
  if (sigma > 0) normal.emplace(mu, sigma);

  GraphBuilder builder(Schema{}, parse_schema("weight:f64"), /*directed=*/true);
  for (std::size_t v = 0; v < num_vertices; ++v) builder.add_vertex(static_cast<VertexId>(v), {});

  std::vector<std::size_t> picks;
  for (std::size_t v = 0; v < num_vertices; ++v) {
    auto k = draw_degree(rng, normal ? &*normal : nullptr, mu, num_vertices - 1);
    sample_distinct(rng, num_vertices - 1, k, picks);
    for (auto t : picks) {
      // Skip over v itself so targets range over the other n-1 vertices.
      auto dst = t >= v ? t + 1 : t;
      builder.add_edge(static_cast<VertexId>(v), static_cast<VertexId>(dst), Record{1.0});
    }
  }
  return std::move(builder).build();
}

}  // namespace vcprog
