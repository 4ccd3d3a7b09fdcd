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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcprog/record.hpp"

namespace vcprog::ipc {

// Shared buffer layout (all integers little-endian):
//
//   [0]       client flag   0 = idle, 1 = request ready
//   [1]       server flag   0 = not done, 1 = response ready
//   [4, 8)    method index
//   [8, 12)   request length
//   [12, 16)  response length
//   [16, cap) payload; a response starts with a status byte (0 ok, 1 error)
//
// A HANDSHAKE request payload begins with the magic and version words, so
// they land at offsets 16..24.
inline constexpr std::size_t kClientFlagOffset = 0;
inline constexpr std::size_t kServerFlagOffset = 1;
inline constexpr std::size_t kMethodOffset = 4;
inline constexpr std::size_t kRequestLengthOffset = 8;
inline constexpr std::size_t kResponseLengthOffset = 12;
inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::size_t kMinCapacity = 4096;
inline constexpr std::size_t kDefaultCapacity = std::size_t{1} << 20;
inline constexpr std::uint32_t kMagic = 0x47504356;  // "VCPG"
inline constexpr std::uint32_t kProtocolVersion = 1;

inline constexpr std::uint8_t kStatusOk = 0;
inline constexpr std::uint8_t kStatusError = 1;

enum class MethodIndex : std::uint32_t {
  kHandshake = 0,
  kInitVertexAttr = 1,
  kEmptyMessage = 2,
  kMergeMessage = 3,
  kVertexCompute = 4,
  kEmitMessage = 5,
  kShutdown = 6,
};

inline constexpr std::uint32_t kMethodCount = 7;

std::string_view to_string(MethodIndex m);

/// `<workdir>/ipc-worker-<k>.buf`
std::string channel_path(const std::string& workdir, std::size_t worker);

/// RAII shared mapping of a channel file.
class MappedChannel {
 public:
  /// Creates (truncating) a zero-filled file of `capacity` bytes and maps it.
  /// capacity must be >= 4096 and a multiple of the page size.
  static MappedChannel create(const std::string& path, std::size_t capacity = kDefaultCapacity);
  /// Maps an existing channel file; the capacity is the file size.
  static MappedChannel open(const std::string& path);

  MappedChannel(MappedChannel&& other) noexcept;
  MappedChannel& operator=(MappedChannel&& other) noexcept;
  MappedChannel(const MappedChannel&) = delete;
  MappedChannel& operator=(const MappedChannel&) = delete;
  ~MappedChannel();

  std::size_t capacity() const { return size_; }
  std::size_t max_payload() const { return size_ - kHeaderSize; }
  const std::string& path() const { return path_; }

  std::uint8_t* data() { return base_; }
  const std::uint8_t* data() const { return base_; }

  std::uint8_t load_flag(std::size_t offset) const;
  void store_flag(std::size_t offset, std::uint8_t value);
  std::uint32_t load_u32(std::size_t offset) const;
  void store_u32(std::size_t offset, std::uint32_t value);

 private:
  MappedChannel(std::string path, std::uint8_t* base, std::size_t size)
      : path_(std::move(path)), base_(base), size_(size) {}

  std::string path_;
  std::uint8_t* base_ = nullptr;
  std::size_t size_ = 0;
};

/// Client-side byte accounting: every request is written into the mapping
/// exactly once and every response body read out of it exactly once.
struct CopyCounters {
  std::uint64_t calls = 0;
  std::uint64_t writes_in = 0;
  std::uint64_t bytes_in = 0;
  std::uint64_t reads_out = 0;
  std::uint64_t bytes_out = 0;
};

/// Synchronous RPC client over one channel; one call in flight at a time.
class RpcClient {
 public:
  using Writer = std::function<void(ByteWriter&)>;
  using Reader = std::function<void(std::span<const std::uint8_t>)>;

  explicit RpcClient(MappedChannel channel);

  /// Default 30 s. Expiry marks the channel dead.
  void set_timeout(std::chrono::milliseconds timeout) { timeout_ = timeout; }
  /// Polled while waiting; returning false aborts the call as channel-dead.
  void set_liveness_probe(std::function<bool()> probe) { probe_ = std::move(probe); }

  /// Sends magic, version and `body`; returns the response body.
  std::vector<std::uint8_t> handshake(std::span<const std::uint8_t> body);

  std::vector<std::uint8_t> call(MethodIndex m, std::span<const std::uint8_t> request);

  /// Encodes the request straight into the shared payload region and hands
  /// the response body to `read` in place.
  void call_with(MethodIndex m, const Writer& write, const Reader& read);

  bool handshaken() const { return handshaken_; }
  bool dead() const { return dead_; }
  const CopyCounters& counters() const { return counters_; }
  MappedChannel& channel() { return ch_; }
  const MappedChannel& channel() const { return ch_; }

 private:
  MappedChannel ch_;
  std::chrono::milliseconds timeout_{30000};
  std::function<bool()> probe_;
  bool handshaken_ = false;
  bool dead_ = false;
  CopyCounters counters_;
};

/// Where a dispatcher writes its response body (after the status byte).
class ResponseWriter {
 public:
  explicit ResponseWriter(std::span<std::uint8_t> body) : w_(body) {}
  ByteWriter& out() { return w_; }
  void write(std::span<const std::uint8_t> bytes) { w_.put_bytes(bytes); }
  std::size_t size() const { return w_.written(); }

 private:
  ByteWriter w_;
};

/// Handles one request. Throwing produces an error frame carrying what().
using Dispatcher =
    std::function<void(MethodIndex, std::span<const std::uint8_t>, ResponseWriter&)>;

/// Adapts a function returning the response body as a byte vector.
Dispatcher simple_dispatcher(
    std::function<std::vector<std::uint8_t>(MethodIndex, std::span<const std::uint8_t>)> fn);

struct ServeOptions {
  /// Polled while idle; returning false makes serve() return.
  std::function<bool()> keep_going;
};

/// Serves requests on a mapped channel until SHUTDOWN (answered, then
/// returns) or keep_going() fails. The dispatcher sees HANDSHAKE bodies with
/// the magic/version prefix stripped; other methods before a handshake and
/// unknown method indices are answered with error frames.
void serve(MappedChannel& channel, const Dispatcher& dispatcher, const ServeOptions& options = {});

struct RequestOutcome {
  std::size_t response_length = 0;  // status byte included
  bool shutdown = false;
};

/// Transport-independent request handling shared by every server loop:
/// validates the method index and handshake state, runs the dispatcher and
/// writes a status-prefixed frame into `response`, which may alias `request`.
RequestOutcome handle_request(std::uint32_t raw_method, std::span<const std::uint8_t> request,
                              std::span<std::uint8_t> response, const Dispatcher& dispatcher,
                              bool& handshaken);

/// Copies an error message into an error frame body, truncating to fit.
std::size_t write_error_frame(std::span<std::uint8_t> payload, std::string_view message);

}  // namespace vcprog::ipc
