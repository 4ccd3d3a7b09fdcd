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

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace vcprog::detail {

/// Persistent worker threads driven in fork-join rounds. Each run() is a
/// full barrier: it returns once every worker finished the task. The
/// calling thread acts as worker 0.
class WorkerGroup {
 public:
  explicit WorkerGroup(std::size_t n) : n_(n), errors_(n) {
    threads_.reserve(n - 1);
    for (std::size_t w = 1; w < n; ++w) threads_.emplace_back([this, w] { loop(w); });
  }

  ~WorkerGroup() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
      ++generation_;
    }
    start_cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  WorkerGroup(const WorkerGroup&) = delete;
  WorkerGroup& operator=(const WorkerGroup&) = delete;

  std::size_t size() const { return n_; }

  /// Runs task(w) for every worker w; rethrows the lowest-numbered worker's
  /// exception, if any.
  void run(const std::function<void(std::size_t)>& task) {
    {
      std::lock_guard lock(mu_);
      task_ = &task;
      pending_ = n_ - 1;
      ++generation_;
    }
    start_cv_.notify_all();
    execute(0);
    {
      std::unique_lock lock(mu_);
      done_cv_.wait(lock, [this] { return pending_ == 0; });
      task_ = nullptr;
    }
    for (auto& e : errors_) {
      if (e) {
        auto err = e;
        for (auto& x : errors_) x = nullptr;
        std::rethrow_exception(err);
      }
    }
  }

 private:
  void execute(std::size_t w) {
    try {
      (*task_)(w);
    } catch (...) {
      errors_[w] = std::current_exception();
    }
  }

  void loop(std::size_t w) {
    std::uint64_t seen = 0;
    while (true) {
      {
        std::unique_lock lock(mu_);
        start_cv_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
      }
      execute(w);
      {
        std::lock_guard lock(mu_);
        if (--pending_ == 0) done_cv_.notify_one();
      }
    }
  }

  std::size_t n_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  std::uint64_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stop_ = false;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::vector<std::exception_ptr> errors_;
};

}  // namespace vcprog::detail
