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

#include <sys/types.h>

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vcprog/ipc/channel.hpp"
#include "vcprog/ipc/program_codec.hpp"
#include "vcprog/program.hpp"

namespace vcprog::ipc {

/// A spawned child process. The destructor kills and reaps it if it is
/// still running.
class GuestProcess {
 public:
  /// argv[0] is resolved through PATH. stdout and stderr go to `log_path`.
  GuestProcess(const std::vector<std::string>& argv, const std::string& log_path);
  ~GuestProcess();
  GuestProcess(const GuestProcess&) = delete;
  GuestProcess& operator=(const GuestProcess&) = delete;

  pid_t pid() const { return pid_; }
  bool alive();
  /// Waits up to `timeout` for exit; returns the raw wait status if reaped.
  std::optional<int> wait_for(std::chrono::milliseconds timeout);
  void kill();
  const std::string& log_path() const { return log_path_; }
  /// Last `max_bytes` of the log file.
  std::string log_tail(std::size_t max_bytes = 2048) const;

 private:
  pid_t pid_ = -1;
  std::optional<int> status_;
  std::string log_path_;
};

/// Guest argv: the command prefix followed by
/// `--program <file> --channel <file> --schemas <vertex;edge;message>`.
std::vector<std::string> guest_argv(const RemoteSpec& spec, const std::string& channel_file);

struct RemoteOptions {
  std::size_t num_workers = 1;
  std::size_t channel_capacity = kDefaultCapacity;
  std::chrono::milliseconds call_timeout{30000};
};

/**
 * A vertex program running in external guest processes, one per worker,
 * each reached through its own mapped channel `<workdir>/ipc-worker-<k>.buf`.
 * Guests are launched and handshaken in bind(); destruction sends SHUTDOWN
 * and reaps them.
 */
class RemoteProgram final : public VertexProgram {
 public:
  RemoteProgram(RemoteSpec spec, RemoteOptions options);
  ~RemoteProgram() override;

  const Schema& vertex_schema() const override { return spec_.vertex_schema; }
  const Schema& message_schema() const override { return spec_.message_schema; }
  void bind(const GraphSummary& input) override;

  Record init_vertex_attr(VertexId id, std::size_t out_degree, const Record& prop) const override;
  Record empty_message() const override;
  Record merge_message(const Record& m1, const Record& m2) const override;
  ComputeResult vertex_compute(const Record& prop, const Record& msg, std::size_t iter) const override;
  EmitResult emit_message(VertexId src, VertexId dst, const Record& src_prop,
                          const Record& edge_prop) const override;

  const VertexProgram& for_worker(std::size_t worker) const override;
  std::optional<std::size_t> max_workers() const override { return options_.num_workers; }

  /// Sends SHUTDOWN to every guest and reaps them; idempotent.
  void shutdown();

  std::size_t num_guests() const { return workers_.size(); }
  const CopyCounters& counters(std::size_t worker) const;

 private:
  struct Worker {
    std::unique_ptr<GuestProcess> process;
    std::unique_ptr<RpcClient> client;
    std::unique_ptr<ChannelProgram> program;
  };

  const ChannelProgram& first() const;

  RemoteSpec spec_;
  RemoteOptions options_;
  std::vector<Worker> workers_;
};

}  // namespace vcprog::ipc
