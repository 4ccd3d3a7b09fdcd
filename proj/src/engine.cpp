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

#include "vcprog/engine.hpp"

#include <array>
#include <chrono>

#include "worker_group.hpp"

namespace vcprog {

std::string_view to_string(EngineKind kind) {
  switch (kind) {
    case EngineKind::kPregel: return "pregel";
    case EngineKind::kGas: return "gas";
    case EngineKind::kPushPullDense: return "pushpull";
  }
  return "?";
}

std::optional<EngineKind> parse_engine_kind(std::string_view text) {
  if (text == "pregel") return EngineKind::kPregel;
  if (text == "gas") return EngineKind::kGas;
  if (text == "pushpull" || text == "pushpull-dense" || text == "pushpull_dense") {
    return EngineKind::kPushPullDense;
  }
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

struct alignas(64) WorkerCounters {
  std::size_t active = 0;
  std::size_t participants = 0;
  std::size_t received = 0;
  std::size_t sent = 0;

  void reset() { *this = {}; }
};

/// State shared by all backends. Worker w writes values/active/inbox only
/// for the vertices it owns.
struct Shared {
  Shared(const PropertyGraph& graph, const VertexProgram& program, std::size_t workers,
         EngineHooks h)
      : g(graph), p(program), part(graph, workers), hooks(std::move(h)), counters(workers) {}

  const PropertyGraph& g;
  const VertexProgram& p;
  Partitioning part;
  EngineHooks hooks;
  Record empty;
  std::vector<Record> values;
  std::vector<std::uint8_t> active;
  std::vector<WorkerCounters> counters;

  // Reverse adjacency, built only by backends that scan in-edges.
  std::vector<std::size_t> in_offsets;
  std::vector<std::size_t> in_edges;     // out-edge positions grouped by target
  std::vector<std::size_t> edge_source;  // source index of each out-edge position

  std::size_t owner_of(std::size_t v) const { return part.owner(g.id(v)); }

  void fold(std::optional<Record>& acc, const VertexProgram& vp, const Record& m) const {
    acc = vp.merge_message(acc ? *acc : empty, m);
  }

  void build_reverse_index() {
    const std::size_t n = g.num_vertices();
    in_offsets.assign(n + 1, 0);
    edge_source.resize(g.num_edges());
    for (std::size_t v = 0; v < n; ++v) {
      for (auto e : g.out_edges(v)) {
        ++in_offsets[g.target(e) + 1];
        edge_source[e] = v;
      }
    }
    for (std::size_t v = 0; v < n; ++v) in_offsets[v + 1] += in_offsets[v];
    std::vector<std::size_t> cursor(in_offsets.begin(), in_offsets.end() - 1);
    in_edges.resize(g.num_edges());
    for (std::size_t v = 0; v < n; ++v) {
      for (auto e : g.out_edges(v)) in_edges[cursor[g.target(e)]++] = e;
    }
  }

  /// Merge inbox, vertex_compute, record activity. Returns the new flag.
  bool compute(std::size_t w, const VertexProgram& vp, std::size_t v,
               std::optional<Record>& inbox, std::size_t iter) {
    const bool had = inbox.has_value();
    const bool was = active[v] != 0;
    auto& c = counters[w];
    ++c.participants;
    auto r = had ? vp.vertex_compute(values[v], *inbox, iter)
                 : vp.vertex_compute(values[v], empty, iter);
    inbox.reset();
    values[v] = std::move(r.value);
    active[v] = r.active ? 1 : 0;
    if (r.active) ++c.active;
    if (hooks.on_compute) hooks.on_compute({w, g.id(v), iter, had, was, r.active});
    return r.active;
  }

  void note_emit(std::size_t w, std::size_t src, std::size_t dst, std::size_t iter,
                 bool emitted) const {
    if (hooks.on_emit) hooks.on_emit({w, g.id(src), g.id(dst), iter, emitted});
  }
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual void step(detail::WorkerGroup& group, std::size_t iter) = 0;
  virtual bool messages_pending() const = 0;
  /// Single-threaded view of the inbox the next step would merge.
  virtual std::vector<std::optional<Record>> pending_inbox() const = 0;
};

// Compute-then-send. Messages travel through per (sender, receiver) worker
// queues, double-buffered by iteration parity; the receiver drains and
// merges them at the start of the next step, so one barrier per step.
class PregelBackend final : public Backend {
 public:
  explicit PregelBackend(Shared& s) : s_(s), inbox_(s.g.num_vertices()) {
    const auto W = s.part.num_workers();
    for (auto& side : queues_) side.assign(W, std::vector<std::vector<Envelope>>(W));
  }

  void step(detail::WorkerGroup& group, std::size_t iter) override {
    const std::size_t cur = iter & 1;
    const std::size_t prev = cur ^ 1;
    group.run([&](std::size_t w) {
      const auto& vp = s_.p.for_worker(w);
      auto& c = s_.counters[w];
      c.received += drain(prev, w, [&](const Envelope& env) { s_.fold(inbox_[env.dst], vp, env.msg); });
      for (auto& queue : queues_[prev]) queue[w].clear();
      auto& out = queues_[cur][w];
      for (auto v : s_.part.owned(w)) {
        if (!inbox_[v] && !s_.active[v]) continue;
        if (!s_.compute(w, vp, v, inbox_[v], iter)) continue;
        for (auto e : s_.g.out_edges(v)) {
          const auto t = s_.g.target(e);
          auto em = vp.emit_message(s_.g.id(v), s_.g.id(t), s_.values[v], s_.g.edge(e));
          s_.note_emit(w, v, t, iter, em.emit);
          if (!em.emit) continue;
          out[s_.owner_of(t)].push_back({v, t, std::move(em.message)});
          ++c.sent;
        }
      }
    });
    last_ = cur;
    pending_ = 0;
    for (const auto& c : s_.counters) pending_ += c.sent;
  }

  bool messages_pending() const override { return pending_ > 0; }

  std::vector<std::optional<Record>> pending_inbox() const override {
    auto inbox = inbox_;
    const auto& vp = s_.p.for_worker(0);
    for (std::size_t w = 0; w < s_.part.num_workers(); ++w) {
      drain(last_, w, [&](const Envelope& env) { s_.fold(inbox[env.dst], vp, env.msg); });
    }
    return inbox;
  }

 private:
  struct Envelope {
    std::size_t src;
    std::size_t dst;
    Record msg;
  };

  // Visits receiver w's inbound envelopes in ascending source order. Each
  // sender queue is already sorted that way, and a source has one sender,
  // so this reproduces in-edge order: every backend folds a vertex's
  // messages in the same sequence.
  template <typename Fn>
  std::size_t drain(std::size_t parity, std::size_t w, Fn&& fn) const {
    const auto& senders = queues_[parity];
    const auto W = senders.size();
    std::vector<std::size_t> pos(W, 0);
    std::size_t total = 0;
    while (true) {
      std::size_t best = W;
      for (std::size_t k = 0; k < W; ++k) {
        const auto& q = senders[k][w];
        if (pos[k] < q.size() && (best == W || q[pos[k]].src < senders[best][w][pos[best]].src)) {
          best = k;
        }
      }
      if (best == W) return total;
      const auto& q = senders[best][w];
      // Consume the whole run of this source at once.
      const auto src = q[pos[best]].src;
      while (pos[best] < q.size() && q[pos[best]].src == src) {
        fn(q[pos[best]++]);
        ++total;
      }
    }
  }

  Shared& s_;
  std::vector<std::optional<Record>> inbox_;
  // queues_[parity][sender][receiver]
  std::array<std::vector<std::vector<std::vector<Envelope>>>, 2> queues_;
  std::size_t last_ = 0;
  std::size_t pending_ = 0;
};

// Gather-Apply-Scatter with a barrier after each phase. Scatter leaves at
// most one message per out-edge slot; gather folds a vertex's in-edge slots.
class GasBackend final : public Backend {
 public:
  explicit GasBackend(Shared& s)
      : s_(s), inbox_(s.g.num_vertices()), edge_msg_(s.g.num_edges()) {
    if (s_.in_offsets.empty()) s_.build_reverse_index();
  }

  void step(detail::WorkerGroup& group, std::size_t iter) override {
    group.run([&](std::size_t w) {  // gather
      const auto& vp = s_.p.for_worker(w);
      for (auto v : s_.part.owned(w)) inbox_[v] = gather(vp, v, &s_.counters[w].received);
    });
    group.run([&](std::size_t w) {  // apply
      const auto& vp = s_.p.for_worker(w);
      for (auto v : s_.part.owned(w)) {
        if (inbox_[v] || s_.active[v]) s_.compute(w, vp, v, inbox_[v], iter);
      }
    });
    group.run([&](std::size_t w) {  // scatter
      const auto& vp = s_.p.for_worker(w);
      auto& c = s_.counters[w];
      for (auto v : s_.part.owned(w)) {
        const bool active = s_.active[v] != 0;
        for (auto e : s_.g.out_edges(v)) {
          auto& slot = edge_msg_[e];
          slot.reset();
          if (!active) continue;
          const auto t = s_.g.target(e);
          auto em = vp.emit_message(s_.g.id(v), s_.g.id(t), s_.values[v], s_.g.edge(e));
          s_.note_emit(w, v, t, iter, em.emit);
          if (em.emit) {
            slot = std::move(em.message);
            ++c.sent;
          }
        }
      }
    });
    pending_ = 0;
    for (const auto& c : s_.counters) pending_ += c.sent;
  }

  bool messages_pending() const override { return pending_ > 0; }

  std::vector<std::optional<Record>> pending_inbox() const override {
    std::vector<std::optional<Record>> inbox(s_.g.num_vertices());
    const auto& vp = s_.p.for_worker(0);
    for (std::size_t v = 0; v < inbox.size(); ++v) inbox[v] = gather(vp, v, nullptr);
    return inbox;
  }

 private:
  std::optional<Record> gather(const VertexProgram& vp, std::size_t v, std::size_t* received) const {
    std::optional<Record> acc;
    for (auto k = s_.in_offsets[v]; k < s_.in_offsets[v + 1]; ++k) {
      const auto& slot = edge_msg_[s_.in_edges[k]];
      if (!slot) continue;
      s_.fold(acc, vp, *slot);
      if (received) ++*received;
    }
    return acc;
  }

  Shared& s_;
  std::vector<std::optional<Record>> inbox_;
  std::vector<std::optional<Record>> edge_msg_;
  std::size_t pending_ = 0;
};

// Dense pull: each vertex scans its in-edges and evaluates emit_message on
// behalf of sources that ended the previous iteration active, then applies.
// Pull and apply are separated by a barrier so sources are read stable.
class PushPullDenseBackend final : public Backend {
 public:
  explicit PushPullDenseBackend(Shared& s) : s_(s), inbox_(s.g.num_vertices()) {
    if (s_.in_offsets.empty()) s_.build_reverse_index();
  }

  void step(detail::WorkerGroup& group, std::size_t iter) override {
    group.run([&](std::size_t w) {  // pull
      if (iter == 1) return;
      const auto& vp = s_.p.for_worker(w);
      for (auto v : s_.part.owned(w)) {
        inbox_[v] = pull(vp, w, v, iter - 1, &s_.counters[w].received);
      }
    });
    group.run([&](std::size_t w) {  // apply
      const auto& vp = s_.p.for_worker(w);
      for (auto v : s_.part.owned(w)) {
        if (inbox_[v] || s_.active[v]) s_.compute(w, vp, v, inbox_[v], iter);
      }
    });
    any_active_ = false;
    for (const auto& c : s_.counters) any_active_ |= c.active > 0;
    stepped_ = true;
  }

  // Only active sources can produce messages for the next pull.
  bool messages_pending() const override { return any_active_; }

  std::vector<std::optional<Record>> pending_inbox() const override {
    std::vector<std::optional<Record>> inbox(s_.g.num_vertices());
    if (!stepped_) return inbox;
    const auto& vp = s_.p.for_worker(0);
    for (std::size_t v = 0; v < inbox.size(); ++v) inbox[v] = pull(vp, 0, v, 0, nullptr);
    return inbox;
  }


 private:
  std::optional<Record> pull(const VertexProgram& vp, std::size_t w, std::size_t v,
                             std::size_t sender_iter, std::size_t* received) const {
    std::optional<Record> acc;
    for (auto k = s_.in_offsets[v]; k < s_.in_offsets[v + 1]; ++k) {
      const auto e = s_.in_edges[k];
      const auto u = s_.edge_source[e];
      if (!s_.active[u]) continue;
      auto em = vp.emit_message(s_.g.id(u), s_.g.id(v), s_.values[u], s_.g.edge(e));
      if (received) s_.note_emit(w, u, v, sender_iter, em.emit);
      if (!em.emit) continue;
      s_.fold(acc, vp, em.message);
      if (received) ++*received;
    }
    return acc;
  }

  Shared& s_;
  std::vector<std::optional<Record>> inbox_;
  bool any_active_ = true;
  bool stepped_ = false;
};

}  // namespace

struct Executor::Impl {
  Impl(const PropertyGraph& g, VertexProgram& p, EngineKind k, std::size_t workers,
       EngineHooks hooks)
      : kind(k), shared(g, p, workers, std::move(hooks)), group(workers) {}

  EngineKind kind;
  Shared shared;
  detail::WorkerGroup group;
  std::unique_ptr<Backend> backend;
  std::size_t next_iter = 1;
  std::size_t last_active = 0;
  bool quiescent = false;
};

Executor::Executor(const PropertyGraph& g, VertexProgram& p, EngineKind kind,
                   std::size_t num_workers, EngineHooks hooks) {
  if (num_workers == 0) throw Error(ErrorCode::kInvalidArgument, "num_workers must be positive");
  if (auto cap = p.max_workers(); cap && num_workers > *cap) {
    throw Error(ErrorCode::kInvalidArgument, "program supports at most " + std::to_string(*cap) +
                                                 " workers, " + std::to_string(num_workers) +
                                                 " requested");
  }
  p.bind(summarize(g));
  impl_ = std::make_unique<Impl>(g, p, kind, num_workers, std::move(hooks));
  auto& s = impl_->shared;

  s.empty = p.for_worker(0).empty_message();
  if (!conforms(p.message_schema(), s.empty)) {
    throw Error(ErrorCode::kSchemaMismatch, "empty_message() does not match the message schema");
  }
  const std::size_t n = g.num_vertices();
  s.values.resize(n);
  s.active.assign(n, 1);
  impl_->group.run([&](std::size_t w) {
    const auto& vp = p.for_worker(w);
    for (auto v : s.part.owned(w)) {
      s.values[v] = vp.init_vertex_attr(g.id(v), g.out_degree(v), g.vertex(v));
      if (!conforms(p.vertex_schema(), s.values[v])) {
        throw Error(ErrorCode::kSchemaMismatch, "init_vertex_attr result for vertex " +
                                                    std::to_string(g.id(v)) +
                                                    " does not match [" +
                                                    p.vertex_schema().text() + "]");
      }
    }
  });

  switch (kind) {
    case EngineKind::kPregel: impl_->backend = std::make_unique<PregelBackend>(s); break;
    case EngineKind::kGas: impl_->backend = std::make_unique<GasBackend>(s); break;
    case EngineKind::kPushPullDense:
      impl_->backend = std::make_unique<PushPullDenseBackend>(s);
      break;
  }
}

Executor::~Executor() = default;

StepStats Executor::step() {
  auto& s = impl_->shared;
  for (auto& c : s.counters) c.reset();
  const auto start = Clock::now();
  const auto iter = impl_->next_iter;
  impl_->backend->step(impl_->group, iter);

  StepStats stats;
  stats.iter = iter;
  for (const auto& c : s.counters) {
    stats.num_active += c.active;
    stats.participants += c.participants;
    stats.messages_received += c.received;
  }
  stats.messages_pending = impl_->backend->messages_pending();
  stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();

  impl_->last_active = stats.num_active;
  impl_->quiescent = stats.num_active == 0 && !stats.messages_pending;
  ++impl_->next_iter;
  return stats;
}

std::size_t Executor::next_iteration() const { return impl_->next_iter; }

bool Executor::quiescent() const { return impl_->quiescent; }

SuperstepState Executor::state() const {
  const auto& s = impl_->shared;
  SuperstepState st;
  st.iter = impl_->next_iter;
  st.values = s.values;
  st.active = s.active;
  st.inbox = impl_->backend->pending_inbox();
  st.num_active = impl_->last_active;
  return st;
}

PropertyGraph Executor::result() const {
  const auto& s = impl_->shared;
  return s.g.with_vertices(s.p.vertex_schema(), s.values);
}

RunResult run(const PropertyGraph& g, VertexProgram& p, const RunOptions& options) {
  if (options.max_iter == 0) throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  const auto start = Clock::now();
  Executor ex(g, p, options.kind, options.num_workers, options.hooks);
  RunReport report;
  for (std::size_t i = 1; i <= options.max_iter; ++i) {
    report.steps.push_back(ex.step());
    ++report.iterations_executed;
    if (ex.quiescent()) {
      report.converged_early = true;
      break;
    }
  }
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return {ex.result(), std::move(report)};
}

}  // namespace vcprog
