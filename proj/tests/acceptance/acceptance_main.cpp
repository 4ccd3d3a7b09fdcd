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

// Acceptance suite. Prints one PASS/FAIL line per criterion followed by its
// measurements, and exits non-zero if any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"
#include "vcprog/engine.hpp"
#include "vcprog/ipc/bench.hpp"
#include "vcprog/ipc/channel.hpp"
#include "vcprog/ipc/program_codec.hpp"
#include "vcprog/ipc/socket.hpp"
#include "vcprog/native_ops.hpp"

using namespace vcprog;
using vcprog::testing::random_graph;
using vcprog::testing::RandomGraphSpec;
using vcprog::testing::table_mismatch;
using Clock = std::chrono::steady_clock;

namespace {

constexpr EngineKind kEngines[] = {EngineKind::kPregel, EngineKind::kGas,
                                   EngineKind::kPushPullDense};
constexpr double kF64Tol = 1e-12;
constexpr std::size_t kMaxIter = 100000;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string first_failure;

  void fail(const std::string& why) {
    if (pass) first_failure = why;
    pass = false;
  }
};

struct Criterion {
  std::string name;
  std::function<void(Outcome&)> body;
};

struct Workload {
  std::string program;
  ParamMap params;
  PropertyGraph graph;
};

// Seed-dependent instance of one operator. CC runs on undirected graphs.
Workload make_workload(const std::string& program, std::uint64_t seed) {
  RandomGraphSpec spec;
  spec.directed = program != "cc";
  spec.dyadic_weights = seed % 2 == 0;
  Workload w{program, {}, random_graph(seed, spec)};
  if (program == "pagerank") w.params = {{"iters", "10"}};
  if (program == "sssp") {
    std::mt19937_64 rng(seed ^ 0x5eed);
    w.params = {{"source", std::to_string(w.graph.id(rng() % w.graph.num_vertices()))}};
  }
  return w;
}

RunResult run_workload(const Workload& w, EngineKind kind, std::size_t workers,
                       std::size_t max_iter = kMaxIter, EngineHooks hooks = {}) {
  auto p = native_program(w.program, w.params);
  RunOptions o;
  o.kind = kind;
  o.num_workers = workers;
  o.max_iter = max_iter;
  o.hooks = std::move(hooks);
  return run(w.graph, *p, o);
}

std::string label(const Workload& w, std::uint64_t seed) {
  return w.program + " seed " + std::to_string(seed) + " (|V|=" +
         std::to_string(w.graph.num_vertices()) + ", |E|=" + std::to_string(w.graph.num_edges()) +
         ")";
}

// ---------------------------------------------------------------------------

void cross_engine(Outcome& out) {
  const auto start = Clock::now();
  std::size_t runs = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    for (const std::string program : {"sssp", "pagerank", "cc"}) {
      const auto w = make_workload(program, 1000 + seed);
      const auto base = run_workload(w, EngineKind::kPregel, 2);
      ++runs;
      for (auto kind : {EngineKind::kGas, EngineKind::kPushPullDense}) {
        const auto r = run_workload(w, kind, 2);
        ++runs;
        if (auto m = table_mismatch(base.graph, r.graph, kF64Tol)) {
          out.fail(label(w, seed) + " pregel vs " + std::string(to_string(kind)) + ": " + *m);
        }
        if (r.report.iterations_executed != base.report.iterations_executed) {
          out.fail(label(w, seed) + " iteration counts " +
                   std::to_string(base.report.iterations_executed) + " vs " +
                   std::to_string(r.report.iterations_executed));
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 300) out.fail("took " + std::to_string(elapsed) + " s");
  out.detail << runs << " runs over 50 graphs x 3 operators x 3 engines in " << elapsed << " s";
}

void oracle_equivalence(Outcome& out) {
  std::size_t sssp_ok = 0, cc_ok = 0, pr_ok = 0;
  double pr_worst = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const auto kind = kEngines[k % 3];
    {
      const auto w = make_workload("sssp", 5000 + k);
      const auto r = run_workload(w, kind, 2);
      const auto expect = oracle::dijkstra(w.graph, std::stoll(w.params.at("source")));
      bool ok = true;
      for (std::size_t v = 0; v < expect.size(); ++v) ok &= r.graph.vertex(v).f64(0) == expect[v];
      ok ? ++sssp_ok : (out.fail(label(w, 5000 + k) + " differs from Dijkstra"), 0);
    }
    {
      const auto w = make_workload("cc", 6000 + k);
      const auto r = run_workload(w, kind, 2);
      const auto expect = oracle::union_find_min_labels(w.graph);
      // Same partition: labels must correspond one-to-one.
      std::map<std::int64_t, std::int64_t> fwd, back;
      bool ok = true;
      for (std::size_t v = 0; v < expect.size(); ++v) {
        const auto got = r.graph.vertex(v).i64(0);
        ok &= fwd.emplace(got, expect[v]).first->second == expect[v];
        ok &= back.emplace(expect[v], got).first->second == got;
      }
      ok ? ++cc_ok : (out.fail(label(w, 6000 + k) + " partition differs from union-find"), 0);
    }
    {
      const auto w = make_workload("pagerank", 7000 + k);
      const auto r = run_workload(w, kind, 2);
      // PageRank(10) holds the uniform start through iteration 1, then
      // applies nine power steps.
      const auto expect = oracle::pagerank_dense(w.graph, 0.85, 9);
      double worst = 0;
      for (std::size_t v = 0; v < expect.size(); ++v) {
        worst = std::max(worst, std::fabs(r.graph.vertex(v).f64(0) - expect[v]));
      }
      pr_worst = std::max(pr_worst, worst);
      worst <= 1e-10 ? ++pr_ok : (out.fail(label(w, 7000 + k) + " max error " + std::to_string(worst)), 0);
    }
  }
  out.detail << "sssp " << sssp_ok << "/100 exact, cc " << cc_ok << "/100 same partition, pagerank "
             << pr_ok << "/100 within 1e-10 (worst " << pr_worst << ")";
}

void message_laws(Outcome& out) {
  for (const std::string program : {"pagerank", "sssp", "cc"}) {
    auto p = native_program(program, {});
    const auto r = check_message_laws(*p, 2000, 42);
    out.detail << program << ": " << r.samples << " samples, " << r.violations.size()
               << " violations; ";
    if (r.samples < 1000) out.fail(program + " sampled too few");
    if (!r.ok()) out.fail(program + " violates " + std::string(to_string(r.violations[0].law)));
  }
}

// After quiescence, further steps change nothing; every computing vertex was
// active or messaged in the previous iteration, and every such vertex computes.
void early_stop_and_activity(Outcome& out) {
  std::size_t instances = 0, computes_checked = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    for (const std::string program : {"sssp", "cc", "pagerank"}) {
      RandomGraphSpec spec;
      spec.max_vertices = 400;
      spec.max_edges = 3000;
      spec.directed = program != "cc";
      Workload w{program, {}, random_graph(8000 + seed, spec)};
      if (program == "sssp") w.params = {{"source", std::to_string(w.graph.id(0))}};
      for (auto kind : kEngines) {
        ++instances;
        const std::string tag = label(w, 8000 + seed) + " " + std::string(to_string(kind));

        // Soundness of the stop.
        auto p = native_program(w.program, w.params);
        Executor ex(w.graph, *p, kind, 3);
        std::size_t steps = 0;
        while (!ex.quiescent() && steps < kMaxIter) {
          ex.step();
          ++steps;
        }
        if (!ex.quiescent()) {
          out.fail(tag + " never quiesced");
          continue;
        }
        const auto frozen = ex.state();
        for (int extra = 0; extra < 3; ++extra) {
          const auto s = ex.step();
          if (s.participants != 0 || s.num_active != 0 || s.messages_received != 0) {
            out.fail(tag + " did work after quiescence");
          }
        }
        if (ex.state().values != frozen.values) out.fail(tag + " values moved after quiescence");
        const auto longer = run_workload(w, kind, 3, steps + 25);
        if (longer.report.iterations_executed != steps || !longer.report.converged_early) {
          out.fail(tag + " run() did not stop at quiescence");
        }

        // Activity rule.
        std::mutex mu;
        std::map<std::size_t, std::map<VertexId, ComputeEvent>> computes;  // iter -> vertex
        std::set<std::pair<std::size_t, VertexId>> messaged;                // (sender iter, dst)
        EngineHooks hooks;
        hooks.on_compute = [&](const ComputeEvent& e) {
          std::lock_guard lock(mu);
          computes[e.iter][e.vertex] = e;
        };
        hooks.on_emit = [&](const EmitEvent& e) {
          std::lock_guard lock(mu);
          if (e.emitted) messaged.insert({e.iter, e.dst});
        };
        const auto r = run_workload(w, kind, 3, kMaxIter, hooks);
        if (computes[1].size() != w.graph.num_vertices()) out.fail(tag + " iteration 1 skipped vertices");
        for (std::size_t it = 2; it <= r.report.iterations_executed; ++it) {
          std::set<VertexId> expected;
          for (const auto& [v, e] : computes[it - 1]) {
            if (e.now_active) expected.insert(v);
          }
          for (const auto& [sit, dst] : messaged) {
            if (sit == it - 1) expected.insert(dst);
          }
          std::set<VertexId> actual;
          for (const auto& [v, e] : computes[it]) {
            actual.insert(v);
            ++computes_checked;
            const bool had = messaged.count({it - 1, v}) > 0;
            if (e.had_message != had) out.fail(tag + " had_message disagrees with emits");
          }
          if (actual != expected) {
            out.fail(tag + " iteration " + std::to_string(it) + " participant set differs");
          }
        }
      }
    }
  }
  out.detail << instances << " instances, " << computes_checked << " compute events checked";
}

void worker_invariance(Outcome& out) {
  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::string program = std::vector<std::string>{"sssp", "pagerank", "cc"}[seed % 3];
    const auto w = make_workload(program, 9000 + seed);
    for (auto kind : kEngines) {
      const auto base = run_workload(w, kind, 1);
      for (std::size_t workers : {2, 4, 8}) {
        const auto r = run_workload(w, kind, workers);
        ++compared;
        const std::string tag = label(w, 9000 + seed) + " " + std::string(to_string(kind)) +
                                " workers " + std::to_string(workers);
        if (auto m = table_mismatch(base.graph, r.graph, kF64Tol)) out.fail(tag + ": " + *m);
        if (r.report.iterations_executed != base.report.iterations_executed) {
          out.fail(tag + ": iteration count differs");
        }
      }
    }
  }
  out.detail << compared << " comparisons against 1 worker (20 instances x 3 engines x {2,4,8})";
}

void scalability(Outcome& out) {
  const auto start = Clock::now();
  const auto g = generate_lognormal(250000, 1.3, 1.0, 2026);
  out.detail << "graph |V|=" << g.num_vertices() << " |E|=" << g.num_edges() << "; ";
  if (g.num_edges() < 1000000) out.fail("generated graph has fewer than 1M edges");

  auto timed = [&](std::size_t workers) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      auto p = native_program("pagerank", {{"iters", "10"}});
      RunOptions o;
      o.num_workers = workers;
      o.max_iter = 10;
      const auto t = Clock::now();
      const auto r = run(g, *p, o);
      best = std::min(best, seconds_since(t));
      if (r.report.iterations_executed != 10) out.fail("pagerank did not run 10 iterations");
    }
    return best;
  };
  const double t1 = timed(1);
  const double t4 = timed(4);
  const double speedup = t1 / t4;
  const double elapsed = seconds_since(start);
  out.detail << "1 worker " << t1 << " s, 4 workers " << t4 << " s, speedup " << speedup
             << "x (need >= 1.5x), hardware threads " << std::thread::hardware_concurrency()
             << ", total " << elapsed << " s";
  if (speedup < 1.5) out.fail("speedup " + std::to_string(speedup) + "x below 1.5x");
  if (elapsed >= 120) out.fail("took " + std::to_string(elapsed) + " s");
}

// Echo dispatcher for the framing checks.
void echo(ipc::MethodIndex, std::span<const std::uint8_t> req, ipc::ResponseWriter& out) {
  out.write(req);
}

void ipc_framing(Outcome& out) {
  vcprog::testing::TempDir dir;
  std::mt19937_64 rng(2718);
  std::size_t shm_ok = 0, sock_ok = 0;
  constexpr std::size_t kCap = 65536;
  const std::size_t max_echo = kCap - ipc::kHeaderSize - 1;
  auto random_payload = [&] {
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_echo)(rng);
    if (rng() % 4 == 0) n = rng() % 64;  // plenty of small frames too
    std::vector<std::uint8_t> p(n);
    for (auto& b : p) b = static_cast<std::uint8_t>(rng());
    return p;
  };
  {
    ipc::RpcClient client(ipc::MappedChannel::create(dir.file("f.buf"), kCap));
    auto server_ch = ipc::MappedChannel::open(dir.file("f.buf"));
    std::thread server([&] { ipc::serve(server_ch, echo); });
    client.handshake({});
    for (int k = 0; k < 10000; ++k) {
      const auto p = random_payload();
      const auto m = static_cast<ipc::MethodIndex>(1 + rng() % 5);
      if (client.call(m, p) == p) ++shm_ok;
    }
    client.call(ipc::MethodIndex::kShutdown, {});
    server.join();
  }
  {
    auto [a, b] = ipc::make_socketpair();
    std::thread server([&, fd = std::move(b)] { ipc::serve_socket(fd, echo, kCap - ipc::kHeaderSize); });
    ipc::SocketClient client(std::move(a), kCap - ipc::kHeaderSize);
    client.handshake({});
    for (int k = 0; k < 10000; ++k) {
      const auto p = random_payload();
      if (client.call(ipc::MethodIndex::kVertexCompute, p) == p) ++sock_ok;
    }
    client.call(ipc::MethodIndex::kShutdown, {});
    server.join();
  }
  out.detail << "mapped channel " << shm_ok << "/10000, socket " << sock_ok
             << "/10000 payloads echoed intact (sizes 0.." << max_echo << ")";
  if (shm_ok != 10000 || sock_ok != 10000) out.fail("corrupted frames");
}

void ipc_zero_copy(Outcome& out) {
  vcprog::testing::TempDir dir;
  auto guest_program = native_program("sssp", {{"source", "0"}});
  const ipc::ProgramSchemas schemas{guest_program->vertex_schema(), parse_schema("weight:f64"),
                                    guest_program->message_schema()};
  ipc::ProgramServer server(*guest_program, schemas);
  ipc::RpcClient client(ipc::MappedChannel::create(dir.file("z.buf"), 65536));
  auto server_ch = ipc::MappedChannel::open(dir.file("z.buf"));
  std::thread t([&] { ipc::serve(server_ch, server.dispatcher()); });
  ipc::ChannelProgram proxy(client, schemas, Schema{});
  proxy.handshake(1000, 5000);

  std::mt19937_64 rng(31);
  std::size_t bad = 0, calls = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto before = client.counters();
    switch (k % 5) {
      case 0: proxy.init_vertex_attr(static_cast<VertexId>(rng() % 1000), rng() % 9, {}); break;
      case 1: proxy.empty_message(); break;
      case 2: proxy.merge_message(Record{1.5}, Record{0.25}); break;
      case 3: proxy.vertex_compute(Record{3.0}, Record{2.0}, 2); break;
      case 4: proxy.emit_message(1, 2, Record{1.0}, Record{0.5}); break;
    }
    const auto after = client.counters();
    ++calls;
    bad += after.calls - before.calls != 1 || after.writes_in - before.writes_in != 1 ||
           after.reads_out - before.reads_out != 1;
  }
  proxy.shutdown();
  t.join();
  out.detail << calls << " proxied method calls, " << bad
             << " with other than one write-in and one read-out";
  if (bad) out.fail("extra copies observed");

  ipc::BenchOptions o;
  o.payload_sizes = {64, 4096};
  o.calls = 2000;
  o.warmup = 100;
  o.workdir = dir.path();
  for (const auto& point : ipc::bench_ipc(o)) {
    const auto& c = point.shared_memory_counters;
    out.detail << "; bench " << point.payload_bytes << " B: calls " << c.calls << " writes_in "
               << c.writes_in << " reads_out " << c.reads_out;
    if (c.writes_in != c.calls || c.reads_out != c.calls) out.fail("bench counters unbalanced");
    if (c.bytes_in != (c.calls - 1) * point.payload_bytes + 8) out.fail("bench bytes_in off");
  }
}

void ipc_latency(Outcome& out) {
  vcprog::testing::TempDir dir;
  ipc::BenchOptions o;
  o.payload_sizes = {64, 4096};
  o.calls = 100000;
  o.warmup = 2000;
  o.workdir = dir.path();
  for (const auto& p : ipc::bench_ipc(o)) {
    out.detail << p.payload_bytes << " B: shm mean " << p.shared_memory.mean_us << " us (p99 "
               << p.shared_memory.p99_us << "), socket mean " << p.socket.mean_us << " us (p99 "
               << p.socket.p99_us << ") over " << p.shared_memory.calls << " calls; ";
    if (p.shared_memory.calls < 100000 || p.socket.calls < 100000) out.fail("too few calls");
    if (!(p.shared_memory.mean_us < p.socket.mean_us)) {
      out.fail("shared memory not faster at " + std::to_string(p.payload_bytes) + " B");
    }
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"cross-engine-equivalence", cross_engine},
      {"oracle-equivalence", oracle_equivalence},
      {"message-laws", message_laws},
      {"early-stop-and-activity-rule", early_stop_and_activity},
      {"worker-invariance", worker_invariance},
      {"scalability-pagerank-4-workers", scalability},
      {"ipc-framing-round-trip", ipc_framing},
      {"ipc-zero-copy-counters", ipc_zero_copy},
      {"ipc-latency-shm-vs-socket", ipc_latency},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = Clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), seconds_since(start));
    std::printf("    %s\n", o.detail.str().c_str());
    if (!o.pass) {
      std::printf("    first failure: %s\n", o.first_failure.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
