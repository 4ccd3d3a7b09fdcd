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
#include <string>
#include <vector>

#include "vcprog/ipc/channel.hpp"

namespace vcprog::ipc {

struct LatencyStats {
  std::size_t calls = 0;
  double mean_us = 0;
  double median_us = 0;
  double p99_us = 0;
};

struct BenchPoint {
  std::size_t payload_bytes = 0;
  LatencyStats shared_memory;
  LatencyStats socket;
  CopyCounters shared_memory_counters;
};

struct BenchOptions {
  std::vector<std::size_t> payload_sizes{64, 4096};
  std::size_t calls = 100000;
  std::size_t warmup = 2000;
  std::size_t capacity = kDefaultCapacity;
  /// Directory for the channel file.
  std::string workdir = "/tmp";
};

LatencyStats summarize_latencies(std::vector<double> micros);

/**
 * Echo round-trip latency against a forked server process, once over a
 * mapped channel and once over an AF_UNIX stream socket pair. Each call
 * sends `payload_bytes` and receives them back. Zero calls yields an empty
 * report.
 */
std::vector<BenchPoint> bench_ipc(const BenchOptions& options);

}  // namespace vcprog::ipc
