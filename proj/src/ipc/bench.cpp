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

#include "vcprog/ipc/bench.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <random>

#include "vcprog/ipc/socket.hpp"

namespace vcprog::ipc {

namespace {

using Clock = std::chrono::steady_clock;

void echo(MethodIndex, std::span<const std::uint8_t> req, ResponseWriter& out) { out.write(req); }

// Runs fn in a forked child and returns its pid. The child never returns.
template <typename Fn>
pid_t fork_server(Fn&& fn) {
  const pid_t parent = ::getpid();
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::kIo, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    int rc = 0;
    try {
      fn(parent);
    } catch (...) {
      rc = 1;
    }
    ::_exit(rc);
  }
  return pid;
}

void reap(pid_t pid) {
  int st = 0;
  while (::waitpid(pid, &st, 0) < 0 && errno == EINTR) {
  }
}

std::vector<std::uint8_t> random_payload(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

template <typename Call>
LatencyStats measure(std::size_t warmup, std::size_t calls, Call&& call) {
  for (std::size_t i = 0; i < warmup; ++i) call();
  std::vector<double> samples(calls);
  for (std::size_t i = 0; i < calls; ++i) {
    const auto t0 = Clock::now();
    call();
    samples[i] = std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
  }
  return summarize_latencies(std::move(samples));
}

}  // namespace

LatencyStats summarize_latencies(std::vector<double> micros) {
  LatencyStats s;
  s.calls = micros.size();
  if (micros.empty()) return s;
  s.mean_us = std::accumulate(micros.begin(), micros.end(), 0.0) / static_cast<double>(micros.size());
  std::sort(micros.begin(), micros.end());
  s.median_us = micros[micros.size() / 2];
  const auto p99 = std::min(micros.size() - 1, (micros.size() * 99) / 100);
  s.p99_us = micros[p99];
  return s;
}

std::vector<BenchPoint> bench_ipc(const BenchOptions& options) {
  std::vector<BenchPoint> points;
  if (options.calls == 0) return points;
  std::mt19937_64 rng(7);
  const auto path = channel_path(options.workdir, 0) + "." + std::to_string(::getpid());

  for (const auto size : options.payload_sizes) {
    if (size + 1 > options.capacity - kHeaderSize) {
      throw Error(ErrorCode::kOversizedPayload,
                  "bench payload of " + std::to_string(size) + " bytes does not fit");
    }
    BenchPoint point;
    point.payload_bytes = size;
    const auto payload = random_payload(size, rng);

    {
      RpcClient client(MappedChannel::create(path, options.capacity));
      const auto server = fork_server([&](pid_t parent) {
        auto ch = MappedChannel::open(path);
        serve(ch, echo, {[parent] { return ::getppid() == parent; }});
      });
      client.set_liveness_probe([server] { return ::waitpid(server, nullptr, WNOHANG) == 0; });
      client.handshake({});
      std::size_t mismatches = 0;
      point.shared_memory = measure(options.warmup, options.calls, [&] {
        client.call_with(
            MethodIndex::kEmptyMessage, [&](ByteWriter& w) { w.put_bytes(payload); },
            [&](std::span<const std::uint8_t> body) {
              mismatches += body.size() != size;
            });
      });
      point.shared_memory_counters = client.counters();
      client.call(MethodIndex::kShutdown, {});
      reap(server);
      std::filesystem::remove(path);
      if (mismatches) throw Error(ErrorCode::kProtocol, "echo size mismatch on mapped channel");
    }

    {
      auto [host, guest] = make_socketpair();
      const auto server = fork_server([&, fd = guest.get()](pid_t) {
        host.reset();
        serve_socket(UniqueFd(fd), echo, options.capacity - kHeaderSize);
      });
      guest.reset();
      SocketClient client(std::move(host), options.capacity - kHeaderSize);
      client.handshake({});
      point.socket = measure(options.warmup, options.calls, [&] {
        if (client.call(MethodIndex::kEmptyMessage, payload).size() != size) {
          throw Error(ErrorCode::kProtocol, "echo size mismatch on socket");
        }
      });
      client.call(MethodIndex::kShutdown, {});
      reap(server);
    }
    points.push_back(point);
  }
  return points;
}

}  // namespace vcprog::ipc
