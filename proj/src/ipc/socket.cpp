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

#include "vcprog/ipc/socket.hpp"

#include <sys/socket.h>
#include <sys/uio.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace vcprog::ipc {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::kIo, what + ": " + std::strerror(errno));
}

void put_le32(std::uint8_t* p, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) p[k] = static_cast<std::uint8_t>(v >> (8 * k));
}

std::uint32_t get_le32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(p[k]) << (8 * k);
  return v;
}

// Returns false on orderly EOF before the first byte.
bool read_exact(int fd, std::uint8_t* p, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const auto r = ::read(fd, p + got, n - got);
    if (r == 0) {
      if (got == 0) return false;
      throw Error(ErrorCode::kChannelDead, "socket closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      fail("socket read");
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

void write_all(int fd, iovec* iov, int count) {
  while (count > 0) {
    auto w = ::writev(fd, iov, count);
    if (w < 0) {
      if (errno == EINTR) continue;
      fail("socket write");
    }
    auto left = static_cast<std::size_t>(w);
    while (count > 0 && left >= iov->iov_len) {
      left -= iov->iov_len;
      ++iov;
      --count;
    }
    if (count > 0) {
      iov->iov_base = static_cast<std::uint8_t*>(iov->iov_base) + left;
      iov->iov_len -= left;
    }
  }
}

sockaddr_un unix_address(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) {
    throw Error(ErrorCode::kInvalidArgument, "socket path too long: " + path);
  }
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  return addr;
}

}  // namespace

UniqueFd& UniqueFd::operator=(UniqueFd&& o) noexcept {
  if (this != &o) {
    reset();
    fd_ = std::exchange(o.fd_, -1);
  }
  return *this;
}

void UniqueFd::reset() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

std::pair<UniqueFd, UniqueFd> make_socketpair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) fail("socketpair");
  return {UniqueFd(fds[0]), UniqueFd(fds[1])};
}

UniqueFd listen_unix(const std::string& path) {
  UniqueFd fd(::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd) fail("socket");
  ::unlink(path.c_str());
  auto addr = unix_address(path);
  if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) fail("bind " + path);
  if (::listen(fd.get(), 1) != 0) fail("listen " + path);
  return fd;
}

UniqueFd accept_unix(const UniqueFd& listener) {
  while (true) {
    int fd = ::accept4(listener.get(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd >= 0) return UniqueFd(fd);
    if (errno != EINTR) fail("accept");
  }
}

UniqueFd connect_unix(const std::string& path) {
  UniqueFd fd(::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd) fail("socket");
  auto addr = unix_address(path);
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    fail("connect " + path);
  }
  return fd;
}

// ---------------------------------------------------------------------------

SocketClient::SocketClient(UniqueFd fd, std::size_t max_payload)
    : fd_(std::move(fd)), max_payload_(max_payload) {}

void SocketClient::send_frame(MethodIndex m, std::span<const std::uint8_t> a,
                              std::span<const std::uint8_t> b) {
  const auto len = a.size() + b.size();
  if (len > max_payload_) {
    throw Error(ErrorCode::kOversizedPayload,
                "request of " + std::to_string(len) + " bytes exceeds " +
                    std::to_string(max_payload_));
  }
  std::uint8_t head[8];
  put_le32(head, static_cast<std::uint32_t>(m));
  put_le32(head + 4, static_cast<std::uint32_t>(len));
  iovec iov[3] = {{head, 8},
                  {const_cast<std::uint8_t*>(a.data()), a.size()},
                  {const_cast<std::uint8_t*>(b.data()), b.size()}};
  write_all(fd_.get(), iov, 3);
  ++counters_.writes_in;
  counters_.bytes_in += len;
}

std::vector<std::uint8_t> SocketClient::receive() {
  std::uint8_t head[4];
  if (!read_exact(fd_.get(), head, 4)) throw Error(ErrorCode::kChannelDead, "server hung up");
  const auto len = get_le32(head);
  if (len < 1 || len > max_payload_) {
    throw Error(ErrorCode::kProtocol, "bad response length " + std::to_string(len));
  }
  buffer_.resize(len);
  read_exact(fd_.get(), buffer_.data(), len);
  ++counters_.calls;
  if (buffer_[0] == kStatusError) {
    throw Error(ErrorCode::kRemoteFailure,
                std::string(reinterpret_cast<const char*>(buffer_.data()) + 1, len - 1));
  }
  if (buffer_[0] != kStatusOk) throw Error(ErrorCode::kProtocol, "bad status byte");
  ++counters_.reads_out;
  counters_.bytes_out += len - 1;
  return {buffer_.begin() + 1, buffer_.end()};
}

std::vector<std::uint8_t> SocketClient::handshake(std::span<const std::uint8_t> body) {
  std::uint8_t prefix[8];
  put_le32(prefix, kMagic);
  put_le32(prefix + 4, kProtocolVersion);
  send_frame(MethodIndex::kHandshake, prefix, body);
  return receive();
}

std::vector<std::uint8_t> SocketClient::call(MethodIndex m, std::span<const std::uint8_t> request) {
  send_frame(m, request, {});
  return receive();
}

// ---------------------------------------------------------------------------

void serve_socket(const UniqueFd& fd, const Dispatcher& dispatcher, std::size_t max_payload) {
  std::vector<std::uint8_t> request(max_payload);
  std::vector<std::uint8_t> response(max_payload);
  bool handshaken = false;
  while (true) {
    std::uint8_t head[8];
    if (!read_exact(fd.get(), head, 8)) return;
    const auto method = get_le32(head);
    const auto len = get_le32(head + 4);
    RequestOutcome outcome;
    if (len > max_payload) {
      outcome.response_length = write_error_frame(response, "request length overflow");
      // Drain the oversized body so the stream stays in sync.
      std::vector<std::uint8_t> sink(len);
      read_exact(fd.get(), sink.data(), len);
    } else {
      read_exact(fd.get(), request.data(), len);
      outcome = handle_request(method, std::span<const std::uint8_t>(request.data(), len),
                               response, dispatcher, handshaken);
    }
    std::uint8_t out_head[4];
    put_le32(out_head, static_cast<std::uint32_t>(outcome.response_length));
    iovec iov[2] = {{out_head, 4}, {response.data(), outcome.response_length}};
    write_all(fd.get(), iov, 2);
    if (outcome.shutdown) return;
  }
}

}  // namespace vcprog::ipc
