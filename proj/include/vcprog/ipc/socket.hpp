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
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vcprog/ipc/channel.hpp"

namespace vcprog::ipc {

// Stream-socket transport with the same request semantics as the mapped
// channel. It exists as the latency baseline.
//
//   request:  u32 method, u32 length, payload
//   response: u32 length, payload (status byte first)

class UniqueFd {
 public:
  UniqueFd() = default;
  explicit UniqueFd(int fd) : fd_(fd) {}
  UniqueFd(UniqueFd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  UniqueFd& operator=(UniqueFd&& o) noexcept;
  UniqueFd(const UniqueFd&) = delete;
  UniqueFd& operator=(const UniqueFd&) = delete;
  ~UniqueFd() { reset(); }

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset();

 private:
  int fd_ = -1;
};

/// AF_UNIX stream pair; both ends close-on-exec.
std::pair<UniqueFd, UniqueFd> make_socketpair();
UniqueFd listen_unix(const std::string& path);
UniqueFd accept_unix(const UniqueFd& listener);
UniqueFd connect_unix(const std::string& path);

class SocketClient {
 public:
  explicit SocketClient(UniqueFd fd, std::size_t max_payload = kDefaultCapacity - kHeaderSize);

  std::vector<std::uint8_t> handshake(std::span<const std::uint8_t> body);
  std::vector<std::uint8_t> call(MethodIndex m, std::span<const std::uint8_t> request);

  const CopyCounters& counters() const { return counters_; }

 private:
  void send_frame(MethodIndex m, std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
  std::vector<std::uint8_t> receive();

  UniqueFd fd_;
  std::size_t max_payload_;
  std::vector<std::uint8_t> buffer_;
  CopyCounters counters_;
};

/// Serves one connection until SHUTDOWN or the peer closes it.
void serve_socket(const UniqueFd& fd, const Dispatcher& dispatcher,
                  std::size_t max_payload = kDefaultCapacity - kHeaderSize);

}  // namespace vcprog::ipc
