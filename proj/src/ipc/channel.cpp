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

#include "vcprog/ipc/channel.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <thread>

namespace vcprog::ipc {

std::string_view to_string(MethodIndex m) {
  switch (m) {
    case MethodIndex::kHandshake: return "HANDSHAKE";
    case MethodIndex::kInitVertexAttr: return "INIT_VERTEX_ATTR";
    case MethodIndex::kEmptyMessage: return "EMPTY_MESSAGE";
    case MethodIndex::kMergeMessage: return "MERGE_MESSAGE";
    case MethodIndex::kVertexCompute: return "VERTEX_COMPUTE";
    case MethodIndex::kEmitMessage: return "EMIT_MESSAGE";
    case MethodIndex::kShutdown: return "SHUTDOWN";
  }
  return "UNKNOWN";
}

std::string channel_path(const std::string& workdir, std::size_t worker) {
  return workdir + "/ipc-worker-" + std::to_string(worker) + ".buf";
}

namespace {

std::string errno_text() { return std::strerror(errno); }

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

std::uint8_t* map_shared(int fd, std::size_t size, const std::string& path) {
  void* p = ::mmap(nullptr, size, PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
  if (p == MAP_FAILED) throw Error(ErrorCode::kIo, "mmap " + path + ": " + errno_text());
  return static_cast<std::uint8_t*>(p);
}

// Spins with a yield per iteration until pred() holds. The clock and probe
// are consulted every 256 spins.
template <typename Pred>
bool spin_until(Pred&& pred, std::chrono::steady_clock::time_point deadline,
                const std::function<bool()>& alive) {
  for (std::uint32_t spins = 0;; ++spins) {
    if (pred()) return true;
    if ((spins & 0xFF) == 0xFF) {
      if (std::chrono::steady_clock::now() >= deadline) return false;
      if (alive && !alive()) return pred();
    }
    std::this_thread::yield();
  }
}

}  // namespace

MappedChannel MappedChannel::create(const std::string& path, std::size_t capacity) {
  const auto page = static_cast<std::size_t>(::sysconf(_SC_PAGESIZE));
  if (capacity < kMinCapacity || capacity % page != 0) {
    throw Error(ErrorCode::kInvalidArgument, "channel capacity " + std::to_string(capacity) +
                                                 " must be >= 4096 and a multiple of " +
                                                 std::to_string(page));
  }
  Fd fd(::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC | O_CLOEXEC, 0600));
  if (fd.get() < 0) throw Error(ErrorCode::kIo, "create " + path + ": " + errno_text());
  if (::ftruncate(fd.get(), static_cast<off_t>(capacity)) != 0) {
    throw Error(ErrorCode::kIo, "size " + path + ": " + errno_text());
  }
  return MappedChannel(path, map_shared(fd.get(), capacity, path), capacity);
}

MappedChannel MappedChannel::open(const std::string& path) {
  Fd fd(::open(path.c_str(), O_RDWR | O_CLOEXEC));
  if (fd.get() < 0) throw Error(ErrorCode::kIo, "open " + path + ": " + errno_text());
  struct stat st {};
  if (::fstat(fd.get(), &st) != 0) throw Error(ErrorCode::kIo, "stat " + path + ": " + errno_text());
  const auto size = static_cast<std::size_t>(st.st_size);
  if (size < kMinCapacity) {
    throw Error(ErrorCode::kInvalidArgument, path + " is too small to be a channel");
  }
  return MappedChannel(path, map_shared(fd.get(), size, path), size);
}

MappedChannel::MappedChannel(MappedChannel&& other) noexcept
    : path_(std::move(other.path_)), base_(other.base_), size_(other.size_) {
  other.base_ = nullptr;
  other.size_ = 0;
}

MappedChannel& MappedChannel::operator=(MappedChannel&& other) noexcept {
  if (this != &other) {
    if (base_) ::munmap(base_, size_);
    path_ = std::move(other.path_);
    base_ = other.base_;
    size_ = other.size_;
    other.base_ = nullptr;
    other.size_ = 0;
  }
  return *this;
}

MappedChannel::~MappedChannel() {
  if (base_) ::munmap(base_, size_);
}

std::uint8_t MappedChannel::load_flag(std::size_t offset) const {
  return std::atomic_ref<std::uint8_t>(const_cast<std::uint8_t&>(base_[offset]))
      .load(std::memory_order_acquire);
}

void MappedChannel::store_flag(std::size_t offset, std::uint8_t value) {
  std::atomic_ref<std::uint8_t>(base_[offset]).store(value, std::memory_order_release);
}

std::uint32_t MappedChannel::load_u32(std::size_t offset) const {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(base_[offset + k]) << (8 * k);
  return v;
}

void MappedChannel::store_u32(std::size_t offset, std::uint32_t value) {
  for (int k = 0; k < 4; ++k) base_[offset + k] = static_cast<std::uint8_t>(value >> (8 * k));
}

// ---------------------------------------------------------------------------

RpcClient::RpcClient(MappedChannel channel) : ch_(std::move(channel)) {}

std::vector<std::uint8_t> RpcClient::handshake(std::span<const std::uint8_t> body) {
  std::vector<std::uint8_t> out;
  call_with(
      MethodIndex::kHandshake,
      [&](ByteWriter& w) {
        w.put_u32(kMagic);
        w.put_u32(kProtocolVersion);
        w.put_bytes(body);
      },
      [&](std::span<const std::uint8_t> resp) { out.assign(resp.begin(), resp.end()); });
  handshaken_ = true;
  return out;
}

std::vector<std::uint8_t> RpcClient::call(MethodIndex m, std::span<const std::uint8_t> request) {
  if (request.size() > ch_.max_payload()) {
    throw Error(ErrorCode::kOversizedPayload,
                "request of " + std::to_string(request.size()) + " bytes exceeds the " +
                    std::to_string(ch_.max_payload()) + "-byte payload region");
  }
  std::vector<std::uint8_t> out;
  call_with(
      m, [&](ByteWriter& w) { w.put_bytes(request); },
      [&](std::span<const std::uint8_t> resp) { out.assign(resp.begin(), resp.end()); });
  return out;
}

void RpcClient::call_with(MethodIndex m, const Writer& write, const Reader& read) {
  if (dead_) throw Error(ErrorCode::kChannelDead, "channel " + ch_.path() + " is dead");
  if (!handshaken_ && m != MethodIndex::kHandshake) {
    throw Error(ErrorCode::kProtocol, std::string(to_string(m)) + " before HANDSHAKE");
  }
  std::uint8_t* base = ch_.data();

  ByteWriter w(std::span<std::uint8_t>(base + kHeaderSize, ch_.max_payload()));
  write(w);
  ++counters_.writes_in;
  counters_.bytes_in += w.written();

  ch_.store_u32(kMethodOffset, static_cast<std::uint32_t>(m));
  ch_.store_u32(kRequestLengthOffset, static_cast<std::uint32_t>(w.written()));
  ch_.store_u32(kResponseLengthOffset, 0);
  ch_.store_flag(kClientFlagOffset, 1);

  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  if (!spin_until([&] { return ch_.load_flag(kServerFlagOffset) == 1; }, deadline, probe_)) {
    dead_ = true;
    throw Error(ErrorCode::kChannelDead, "no response on " + ch_.path() + " to " +
                                             std::string(to_string(m)));
  }

  struct Ack {
    MappedChannel& ch;
    ~Ack() {
      ch.store_flag(kClientFlagOffset, 0);
      ch.store_flag(kServerFlagOffset, 0);
    }
  } ack{ch_};

  ++counters_.calls;
  const auto len = ch_.load_u32(kResponseLengthOffset);
  if (len < 1 || len > ch_.max_payload()) {
    dead_ = true;
    throw Error(ErrorCode::kProtocol, "bad response length " + std::to_string(len));
  }
  const auto status = base[kHeaderSize];
  std::span<const std::uint8_t> body(base + kHeaderSize + 1, len - 1);
  if (status == kStatusError) {
    throw Error(ErrorCode::kRemoteFailure,
                std::string(reinterpret_cast<const char*>(body.data()), body.size()));
  }
  if (status != kStatusOk) {
    throw Error(ErrorCode::kProtocol, "bad status byte " + std::to_string(status));
  }
  read(body);
  ++counters_.reads_out;
  counters_.bytes_out += body.size();
}

// ---------------------------------------------------------------------------

std::size_t write_error_frame(std::span<std::uint8_t> payload, std::string_view message) {
  const auto n = std::min(message.size(), payload.size() - 1);
  payload[0] = kStatusError;
  std::memcpy(payload.data() + 1, message.data(), n);
  return n + 1;
}

Dispatcher simple_dispatcher(
    std::function<std::vector<std::uint8_t>(MethodIndex, std::span<const std::uint8_t>)> fn) {
  return [fn = std::move(fn)](MethodIndex m, std::span<const std::uint8_t> req,
                              ResponseWriter& out) { out.write(fn(m, req)); };
}

namespace {

bool wait_forever(const std::function<bool()>& pred, const ServeOptions& options) {
  for (std::uint32_t spins = 0;; ++spins) {
    if (pred()) return true;
    if ((spins & 0xFFF) == 0xFFF && options.keep_going && !options.keep_going()) return false;
    std::this_thread::yield();
  }
}

}  // namespace

RequestOutcome handle_request(std::uint32_t raw_method, std::span<const std::uint8_t> request,
                              std::span<std::uint8_t> response, const Dispatcher& dispatcher,
                              bool& handshaken) {
  const auto method = static_cast<MethodIndex>(raw_method);
  RequestOutcome outcome;
  try {
    if (raw_method >= kMethodCount) {
      throw Error(ErrorCode::kProtocol, "unknown method index " + std::to_string(raw_method));
    }
    if (method == MethodIndex::kHandshake) {
      ByteReader r(request);
      if (r.remaining() < 8 || r.get_u32() != kMagic || r.get_u32() != kProtocolVersion) {
        throw Error(ErrorCode::kProtocol, "handshake magic/version mismatch");
      }
      request = request.subspan(8);
      handshaken = true;
    } else if (!handshaken) {
      throw Error(ErrorCode::kProtocol, std::string(to_string(method)) + " before HANDSHAKE");
    }
    // Requests are decoded in place. Responses start one byte later and the
    // shipped codecs consume their input before writing, so aliasing is safe.
    ResponseWriter out(response.subspan(1));
    if (dispatcher) dispatcher(method, request, out);
    response[0] = kStatusOk;
    outcome.response_length = 1 + out.size();
    outcome.shutdown = method == MethodIndex::kShutdown;
  } catch (const std::exception& e) {
    outcome.response_length = write_error_frame(response, e.what());
    outcome.shutdown = false;
  }
  return outcome;
}

void serve(MappedChannel& ch, const Dispatcher& dispatcher, const ServeOptions& options) {
  std::span<std::uint8_t> payload(ch.data() + kHeaderSize, ch.max_payload());
  bool handshaken = false;

  while (true) {
    if (!wait_forever([&] { return ch.load_flag(kClientFlagOffset) == 1; }, options)) return;

    const auto raw_method = ch.load_u32(kMethodOffset);
    const auto req_len = ch.load_u32(kRequestLengthOffset);
    RequestOutcome outcome;
    if (req_len > ch.max_payload()) {
      outcome.response_length = write_error_frame(payload, "request length overflow");
    } else {
      outcome = handle_request(raw_method, payload.first(req_len), payload, dispatcher, handshaken);
    }

    ch.store_u32(kResponseLengthOffset, static_cast<std::uint32_t>(outcome.response_length));
    ch.store_flag(kServerFlagOffset, 1);
    if (outcome.shutdown) return;

    if (!wait_forever([&] { return ch.load_flag(kServerFlagOffset) == 0; }, options)) return;
  }
}

}  // namespace vcprog::ipc
