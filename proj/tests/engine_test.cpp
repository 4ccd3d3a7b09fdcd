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

#include <doctest.h>

#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <tuple>

#include "oracles.hpp"
#include "support.hpp"
#include "vcprog/engine.hpp"
#include "vcprog/native_ops.hpp"

using namespace vcprog;
using vcprog::testing::graph_from_text;
using vcprog::testing::random_graph;
using vcprog::testing::table_mismatch;

namespace {

constexpr EngineKind kAllKinds[] = {EngineKind::kPregel, EngineKind::kGas,
                                    EngineKind::kPushPullDense};

// Sums i64 messages; vertex value is (total received, times computed).
// Active while iter < rounds, emits its id on every out-edge.
class CountingProgram : public VertexProgram {
 public:
  explicit CountingProgram(std::size_t rounds, bool emit = true) : rounds_(rounds), emit_(emit) {}

  const Schema& vertex_schema() const override { return vschema_; }
  const Schema& message_schema() const override { return mschema_; }
  Record init_vertex_attr(VertexId, std::size_t, const Record&) const override {
    return {std::int64_t{0}, std::int64_t{0}};
  }
  Record empty_message() const override { return {std::int64_t{0}}; }
  Record merge_message(const Record& a, const Record& b) const override {
    return {a.i64(0) + b.i64(0)};
  }
  ComputeResult vertex_compute(const Record& p, const Record& m, std::size_t iter) const override {
    return {{p.i64(0) + m.i64(0), p.i64(1) + 1}, iter < rounds_};
  }
  EmitResult emit_message(VertexId src, VertexId, const Record&, const Record&) const override {
    return {emit_, {src}};
  }

 private:
  std::size_t rounds_;
  bool emit_;
  Schema vschema_ = parse_schema("total:i64,computed:i64");
  Schema mschema_ = parse_schema("m:i64");
};

class ThrowingProgram : public CountingProgram {
 public:
  ThrowingProgram() : CountingProgram(5) {}
  ComputeResult vertex_compute(const Record& p, const Record& m, std::size_t iter) const override {
    if (iter == 2) throw std::runtime_error("boom in compute");
    return CountingProgram::vertex_compute(p, m, iter);
  }
};

class BadInitProgram : public CountingProgram {
 public:
  BadInitProgram() : CountingProgram(1) {}
  Record init_vertex_attr(VertexId, std::size_t, const Record&) const override { return {1.5}; }
};

PropertyGraph path3() {
  return graph_from_text("#vertex id:i64\n0\n1\n2\n",
                         "#edge src:i64 dst:i64 directed:true weight:f64\n0\t1\t1\n1\t2\t1\n");
}

RunResult run_with(const PropertyGraph& g, VertexProgram& p, EngineKind kind, std::size_t workers,
                   std::size_t max_iter = 200, EngineHooks hooks = {}) {
  RunOptions o;
  o.kind = kind;
  o.num_workers = workers;
  o.max_iter = max_iter;
  o.hooks = std::move(hooks);
  return run(g, p, o);
}

}  // namespace

TEST_CASE("engine kind names") {
  CHECK(parse_engine_kind("pregel") == EngineKind::kPregel);
  CHECK(parse_engine_kind("gas") == EngineKind::kGas);
  CHECK(parse_engine_kind("pushpull") == EngineKind::kPushPullDense);
  CHECK(parse_engine_kind("pushpull-dense") == EngineKind::kPushPullDense);
  CHECK_FALSE(parse_engine_kind("bogus").has_value());
  for (auto k : kAllKinds) CHECK(parse_engine_kind(to_string(k)) == k);
}

TEST_CASE("documented small runs agree on every backend") {
  for (auto kind : kAllKinds) {
    CAPTURE(to_string(kind));
    auto sssp = native_program("sssp", {{"source", "0"}});
    auto r = run_with(path3(), *sssp, kind, 2, 10);
    CHECK(r.graph.vertex(0) == Record{0.0});
    CHECK(r.graph.vertex(1) == Record{1.0});
    CHECK(r.graph.vertex(2) == Record{2.0});
    CHECK(r.report.converged_early);

    auto cc = native_program("cc", {});
    auto g = graph_from_text("#vertex id:i64\n0\n1\n2\n3\n",
                             "#edge src:i64 dst:i64 directed:false\n0\t1\n2\t3\n");
    auto c = run_with(g, *cc, kind, 3);
    CHECK(c.graph.vertex(1) == Record{std::int64_t{0}});
    CHECK(c.graph.vertex(3) == Record{std::int64_t{2}});

    auto pr = native_program("pagerank", {{"iters", "10"}});
    auto two = graph_from_text("#vertex id:i64\n0\n1\n", "#edge src:i64 dst:i64 directed:true\n0\t1\n1\t0\n");
    Executor ex(two, *pr, kind, 1);
    for (int i = 0; i < 10; ++i) {
      ex.step();
      CHECK(ex.state().values[0].f64(0) == 0.5);
      CHECK(ex.state().values[1].f64(0) == 0.5);
    }
  }
}

TEST_CASE("a program that is never active stops after one iteration") {
  for (auto kind : kAllKinds) {
    CountingProgram p(0, false);
    auto r = run_with(path3(), p, kind, 2, 10);
    CHECK(r.report.iterations_executed == 1);
    CHECK(r.report.converged_early);
    CHECK(r.report.steps.back().num_active == 0);
  }
}

TEST_CASE("max_iter bounds the run") {
  for (auto kind : kAllKinds) {
    CountingProgram p(100);
    auto r = run_with(path3(), p, kind, 1, 4);
    CHECK(r.report.iterations_executed == 4);
    CHECK_FALSE(r.report.converged_early);
    CHECK(r.report.steps.size() == 4);
    CHECK(r.graph.vertex(0).i64(1) == 4);
  }
}

TEST_CASE("single active vertex with two out-edges emits exactly twice") {
  auto g = graph_from_text("#vertex id:i64\n0\n1\n2\n",
                           "#edge src:i64 dst:i64 directed:true\n0\t1\n0\t2\n");
  for (auto kind : kAllKinds) {
    CountingProgram p(2);
    std::atomic<int> emits{0};
    EngineHooks hooks;
    hooks.on_emit = [&](const EmitEvent& e) {
      if (e.iter == 1) ++emits;
    };
    Executor ex(g, p, kind, 2, hooks);
    ex.step();
    ex.step();  // pull-based backends evaluate iteration-1 emits here
    CHECK(emits == 2);
  }
}

TEST_CASE("two messages to one vertex merge into one inbox entry") {
  auto g = graph_from_text("#vertex id:i64\n1\n2\n3\n",
                           "#edge src:i64 dst:i64 directed:true\n1\t3\n2\t3\n");
  for (auto kind : kAllKinds) {
    CountingProgram p(5);
    Executor ex(g, p, kind, 2);
    CHECK(ex.state().iter == 1);
    for (const auto& m : ex.state().inbox) CHECK_FALSE(m.has_value());  // nothing scattered yet
    ex.step();
    auto st = ex.state();
    CHECK(st.iter == 2);
    REQUIRE(st.inbox[2].has_value());
    CHECK(*st.inbox[2] == Record{std::int64_t{3}});
    CHECK(*st.inbox[2] == p.merge_message(Record{std::int64_t{2}}, Record{std::int64_t{1}}));
    CHECK_FALSE(st.inbox[0].has_value());
  }
}

TEST_CASE("a step with no participants only advances the iteration") {
  for (auto kind : kAllKinds) {
    CountingProgram p(1, false);
    const auto g = path3();
    Executor ex(g, p, kind, 1);
    ex.step();
    auto before = ex.state();
    auto stats = ex.step();
    auto after = ex.state();
    CHECK(stats.participants == 0);
    CHECK(after.iter == before.iter + 1);
    CHECK(after.values == before.values);
    CHECK(after.active == before.active);
  }
}

TEST_CASE("inactive vertices scatter nothing and message-less ones are skipped") {
  // Vertex 0 stays active for three rounds, everyone else deactivates at once.
  class OneActive : public CountingProgram {
   public:
    OneActive() : CountingProgram(0) {}
    Record init_vertex_attr(VertexId id, std::size_t, const Record&) const override {
      return {static_cast<std::int64_t>(id), std::int64_t{0}};
    }
    ComputeResult vertex_compute(const Record& p, const Record& m, std::size_t iter) const override {
      auto r = CountingProgram::vertex_compute(p, m, iter);
      r.active = p.i64(0) == 0 && iter < 3;
      return r;
    }
  };
  auto g = graph_from_text("#vertex id:i64\n0\n1\n2\n",
                           "#edge src:i64 dst:i64 directed:true\n1\t2\n2\t1\n");
  for (auto kind : kAllKinds) {
    OneActive p;
    std::atomic<int> emitted{0};
    EngineHooks hooks;
    hooks.on_emit = [&](const EmitEvent&) { ++emitted; };
    auto r = run_with(g, p, kind, 2, 10, hooks);
    // Vertices 1 and 2 deactivate at iteration 1 and never hear from anyone.
    CHECK(emitted == 0);
    CHECK(r.graph.vertex(1).i64(1) == 1);
    CHECK(r.graph.vertex(0).i64(1) == 3);
  }
}

TEST_CASE("an active vertex without in-edges computes on the empty message") {
  for (auto kind : kAllKinds) {
    CountingProgram p(3);
    std::mutex mu;
    std::vector<ComputeEvent> events;
    EngineHooks hooks;
    hooks.on_compute = [&](const ComputeEvent& e) {
      std::lock_guard lock(mu);
      if (e.vertex == 0) events.push_back(e);
    };
    auto r = run_with(path3(), p, kind, 1, 10, hooks);
    REQUIRE(events.size() == 3);
    for (const auto& e : events) CHECK_FALSE(e.had_message);
    CHECK(r.graph.vertex(0).i64(0) == 0);
  }
}

TEST_CASE("backends agree bit-for-bit on random graphs") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    auto g = random_graph(seed, {300, 2000, seed % 2 == 0});
    for (const std::string name : {"pagerank", "sssp", "cc"}) {
      ParamMap params;
      if (name == "sssp") params["source"] = std::to_string(g.id(0));
      std::vector<RunResult> results;
      for (auto kind : kAllKinds) {
        auto p = native_program(name, params);
        results.push_back(run_with(g, *p, kind, 3));
      }
      for (std::size_t k = 1; k < results.size(); ++k) {
        CHECK_MESSAGE(!table_mismatch(results[0].graph, results[k].graph, 0.0), name, " seed ", seed);
        CHECK(results[0].report.iterations_executed == results[k].report.iterations_executed);
      }
    }
  }
}

TEST_CASE("worker count does not change results") {
  for (std::uint64_t seed = 200; seed < 205; ++seed) {
    auto g = random_graph(seed, {400, 3000, true});
    for (auto kind : kAllKinds) {
      auto base_p = native_program("pagerank", {});
      auto base = run_with(g, *base_p, kind, 1);
      for (std::size_t w : {2, 3, 4, 8}) {
        auto p = native_program("pagerank", {});
        auto r = run_with(g, *p, kind, w);
        CHECK(!table_mismatch(base.graph, r.graph, 0.0));
        CHECK(base.report.iterations_executed == r.report.iterations_executed);
      }
    }
  }
}

TEST_CASE("edge records are unchanged by a run") {
  auto g = random_graph(7, {200, 1000, true});
  std::vector<Record> before;
  for (std::size_t e = 0; e < g.num_edges(); ++e) before.push_back(g.edge(e));
  for (auto kind : kAllKinds) {
    auto p = native_program("sssp", {{"source", std::to_string(g.id(0))}});
    auto r = run_with(g, *p, kind, 2);
    REQUIRE(r.graph.num_edges() == before.size());
    for (std::size_t e = 0; e < before.size(); ++e) CHECK(r.graph.edge(e) == before[e]);
    CHECK(r.graph.topology() == g.topology());
  }
}

TEST_CASE("one more step after convergence is a no-op") {
  for (std::uint64_t seed = 300; seed < 306; ++seed) {
    auto g = random_graph(seed, {200, 800, false});
    for (auto kind : kAllKinds) {
      auto p = native_program("cc", {});
      Executor ex(g, *p, kind, 2);
      std::size_t steps = 0;
      while (!ex.quiescent() && steps < 1000) {
        ex.step();
        ++steps;
      }
      REQUIRE(ex.quiescent());
      const auto before = ex.state();
      const auto extra = ex.step();
      CHECK(extra.participants == 0);
      CHECK(extra.num_active == 0);
      CHECK(ex.state().values == before.values);
    }
  }
}

TEST_CASE("activity rule holds under instrumentation") {
  for (std::uint64_t seed = 400; seed < 404; ++seed) {
    auto g = random_graph(seed, {150, 600, true});
    for (auto kind : kAllKinds) {
      auto p = native_program("sssp", {{"source", std::to_string(g.id(0))}});
      std::mutex mu;
      std::map<std::pair<std::size_t, VertexId>, bool> active_after;  // (iter, v)
      std::set<std::pair<std::size_t, VertexId>> got_message;          // (sender iter, dst)
      std::vector<ComputeEvent> computes;
      EngineHooks hooks;
      hooks.on_compute = [&](const ComputeEvent& e) {
        std::lock_guard lock(mu);
        active_after[{e.iter, e.vertex}] = e.now_active;
        computes.push_back(e);
      };
      hooks.on_emit = [&](const EmitEvent& e) {
        std::lock_guard lock(mu);
        if (e.emitted) got_message.insert({e.iter, e.dst});
      };
      run_with(g, *p, kind, 3, 500, hooks);
      for (const auto& c : computes) {
        if (c.iter == 1) continue;
        auto it = active_after.find({c.iter - 1, c.vertex});
        const bool was_active = it != active_after.end() && it->second;
        const bool messaged = got_message.count({c.iter - 1, c.vertex}) > 0;
        CHECK((was_active || messaged));
        CHECK(c.had_message == messaged);
        CHECK(c.was_active == was_active);
      }
    }
  }
}

TEST_CASE("emit events match across backends on converged runs") {
  auto g = random_graph(55, {120, 500, true});
  std::vector<std::multiset<std::tuple<VertexId, VertexId, std::size_t, bool>>> per_kind;
  for (auto kind : kAllKinds) {
    auto p = native_program("sssp", {{"source", std::to_string(g.id(0))}});
    std::mutex mu;
    std::multiset<std::tuple<VertexId, VertexId, std::size_t, bool>> events;
    EngineHooks hooks;
    hooks.on_emit = [&](const EmitEvent& e) {
      std::lock_guard lock(mu);
      events.insert({e.src, e.dst, e.iter, e.emitted});
    };
    auto r = run_with(g, *p, kind, 2, 500, hooks);
    REQUIRE(r.report.converged_early);
    per_kind.push_back(std::move(events));
  }
  CHECK(per_kind[0] == per_kind[1]);
  CHECK(per_kind[0] == per_kind[2]);
}

TEST_CASE("argument and program errors") {
  auto g = path3();
  CountingProgram p(2);
  CHECK_THROWS_AS(Executor(g, p, EngineKind::kPregel, 0), Error);
  RunOptions o;
  o.max_iter = 0;
  CHECK_THROWS_AS(run(g, p, o), Error);

  BadInitProgram bad;
  try {
    Executor(g, bad, EngineKind::kGas, 2);
    FAIL("expected schema mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSchemaMismatch);
  }

  for (auto kind : kAllKinds) {
    ThrowingProgram t;
    CHECK_THROWS_WITH(run_with(g, t, kind, 3), "boom in compute");
  }
}

TEST_CASE("more workers than vertices and an empty graph") {
  for (auto kind : kAllKinds) {
    auto p = native_program("cc", {});
    auto r = run_with(path3(), *p, kind, 8);
    CHECK(r.graph.vertex(2) == Record{std::int64_t{0}});

    auto q = native_program("cc", {});
    auto e = run_with(PropertyGraph{}, *q, kind, 2);
    CHECK(e.graph.num_vertices() == 0);
    CHECK(e.report.iterations_executed == 1);
  }
}

TEST_CASE("step stats report activity and message counts") {
  auto g = graph_from_text("#vertex id:i64\n0\n1\n2\n",
                           "#edge src:i64 dst:i64 directed:true\n0\t1\n0\t2\n1\t2\n");
  for (auto kind : kAllKinds) {
    CountingProgram p(2);
    auto r = run_with(g, p, kind, 2, 10);
    REQUIRE(r.report.steps.size() == 2);
    CHECK(r.report.steps[0].num_active == 3);
    CHECK(r.report.steps[0].participants == 3);
    CHECK(r.report.steps[1].messages_received == 3);
    CHECK(r.report.steps[1].num_active == 0);
    CHECK(r.graph.vertex(2).i64(0) == 1);
  }
}
