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

#include "vcprog/ipc/remote_program.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

extern char** environ;

namespace vcprog::ipc {

namespace fs = std::filesystem;

GuestProcess::GuestProcess(const std::vector<std::string>& argv, const std::string& log_path)
    : log_path_(log_path) {
  if (argv.empty()) throw Error(ErrorCode::kInvalidArgument, "empty guest command");
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 2, log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC,
                                   0644);
  posix_spawn_file_actions_adddup2(&actions, 2, 1);
  posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
  const int rc = ::posix_spawnp(&pid_, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    pid_ = -1;
    throw Error(ErrorCode::kIo, "cannot launch guest '" + argv[0] + "': " + std::strerror(rc));
  }
}

GuestProcess::~GuestProcess() {
  if (alive()) kill();
}

bool GuestProcess::alive() {
  if (pid_ < 0 || status_) return false;
  int st = 0;
  const auto r = ::waitpid(pid_, &st, WNOHANG);
  if (r == pid_) {
    status_ = st;
    return false;
  }
  return r == 0;
}

std::optional<int> GuestProcess::wait_for(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (alive()) {
    if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  return status_;
}

void GuestProcess::kill() {
  if (!alive()) return;
  ::kill(pid_, SIGKILL);
  int st = 0;
  while (::waitpid(pid_, &st, 0) < 0 && errno == EINTR) {
  }
  status_ = st;
}

std::string GuestProcess::log_tail(std::size_t max_bytes) const {
  std::ifstream in(log_path_, std::ios::binary);
  if (!in) return {};
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  const auto start = size > max_bytes ? size - max_bytes : 0;
  in.seekg(static_cast<std::streamoff>(start));
  std::string out(size - start, '\0');
  in.read(out.data(), static_cast<std::streamsize>(out.size()));
  return out;
}

std::vector<std::string> guest_argv(const RemoteSpec& spec, const std::string& channel_file) {
  std::vector<std::string> argv = spec.guest_command;
  argv.insert(argv.end(), {"--program", spec.program_path, "--channel", channel_file, "--schemas",
                           format_schemas({spec.vertex_schema, spec.edge_schema,
                                           spec.message_schema})});
  return argv;
}

// ---------------------------------------------------------------------------

RemoteProgram::RemoteProgram(RemoteSpec spec, RemoteOptions options)
    : spec_(std::move(spec)), options_(options) {
  if (options_.num_workers == 0) {
    throw Error(ErrorCode::kInvalidArgument, "remote program needs at least one worker");
  }
  if (spec_.guest_command.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "remote program needs a guest command");
  }
  if (spec_.workdir.empty()) throw Error(ErrorCode::kInvalidArgument, "remote program needs a workdir");
}

RemoteProgram::~RemoteProgram() {
  try {
    shutdown();
  } catch (...) {
  }
}

void RemoteProgram::bind(const GraphSummary& input) {
  if (!workers_.empty()) throw Error(ErrorCode::kProtocol, "remote program is already bound");
  if (!(input.edge_schema == spec_.edge_schema)) {
    throw Error(ErrorCode::kSchemaMismatch, "graph edge schema [" + input.edge_schema.text() +
                                                "] differs from declared [" +
                                                spec_.edge_schema.text() + "]");
  }
  fs::create_directories(spec_.workdir);
  const ProgramSchemas schemas{spec_.vertex_schema, spec_.edge_schema, spec_.message_schema};

  // Launch everything first so guests start up in parallel.
  workers_.resize(options_.num_workers);
  for (std::size_t k = 0; k < workers_.size(); ++k) {
    auto& w = workers_[k];
    const auto path = channel_path(spec_.workdir, k);
    w.client = std::make_unique<RpcClient>(MappedChannel::create(path, options_.channel_capacity));
    w.client->set_timeout(options_.call_timeout);
    w.process = std::make_unique<GuestProcess>(
        guest_argv(spec_, path), spec_.workdir + "/guest-" + std::to_string(k) + ".stderr");
    auto* proc = w.process.get();
    w.client->set_liveness_probe([proc] { return proc->alive(); });
    w.program = std::make_unique<ChannelProgram>(*w.client, schemas, input.input_vertex_schema);
    w.program->set_diagnostics([proc, k] {
      auto tail = proc->log_tail();
      return "; guest " + std::to_string(k) +
             (tail.empty() ? std::string(" wrote no stderr") : " stderr:\n" + tail);
    });
  }
  for (auto& w : workers_) {
    w.program->handshake(static_cast<std::int64_t>(input.num_vertices),
                         static_cast<std::int64_t>(input.num_edges));
  }
}

void RemoteProgram::shutdown() {
  for (std::size_t k = 0; k < workers_.size(); ++k) {
    auto& w = workers_[k];
    if (w.client && w.process && w.process->alive() && !w.client->dead() &&
        w.client->handshaken()) {
      try {
        w.client->set_timeout(std::chrono::milliseconds(5000));
        w.program->shutdown();
      } catch (const Error&) {
      }
    }
    if (w.process && !w.process->wait_for(std::chrono::milliseconds(5000))) w.process->kill();
    if (w.client) {
      std::error_code ec;
      fs::remove(w.client->channel().path(), ec);
    }
  }
  workers_.clear();
}

const ChannelProgram& RemoteProgram::first() const {
  if (workers_.empty()) throw Error(ErrorCode::kProtocol, "remote program used before bind()");
  return *workers_.front().program;
}

const VertexProgram& RemoteProgram::for_worker(std::size_t worker) const {
  if (worker >= workers_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "no guest for worker " + std::to_string(worker));
  }
  return *workers_[worker].program;
}

const CopyCounters& RemoteProgram::counters(std::size_t worker) const {
  return workers_.at(worker).client->counters();
}

Record RemoteProgram::init_vertex_attr(VertexId id, std::size_t out_degree,
                                       const Record& prop) const {
  return first().init_vertex_attr(id, out_degree, prop);
}

Record RemoteProgram::empty_message() const { return first().empty_message(); }

Record RemoteProgram::merge_message(const Record& m1, const Record& m2) const {
  return first().merge_message(m1, m2);
}

ComputeResult RemoteProgram::vertex_compute(const Record& prop, const Record& msg,
                                            std::size_t iter) const {
  return first().vertex_compute(prop, msg, iter);
}

EmitResult RemoteProgram::emit_message(VertexId src, VertexId dst, const Record& src_prop,
                                       const Record& edge_prop) const {
  return first().emit_message(src, dst, src_prop, edge_prop);
}

}  // namespace vcprog::ipc
