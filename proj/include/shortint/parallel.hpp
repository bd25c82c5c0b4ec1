// Copyright 2026 The shortint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace shortint {

/// Default worker count: SHORTINT_WORKERS if set to a positive integer, else 1.
inline unsigned default_workers() {
  if (const char* env = std::getenv("SHORTINT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

struct Shard {
  std::uint64_t first;  // inclusive
  std::uint64_t last;   // inclusive
};

// Splits [first, last] into at most `parts` contiguous shards in ascending order.
inline std::vector<Shard> make_shards(std::uint64_t first, std::uint64_t last, unsigned parts) {
  std::vector<Shard> out;
  if (last < first) return out;
  const std::uint64_t total = last - first + 1;
  parts = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(parts, total)));
  const std::uint64_t step = total / parts;
  const std::uint64_t extra = total % parts;
  std::uint64_t lo = first;
  for (unsigned i = 0; i < parts; ++i) {
    const std::uint64_t len = step + (i < extra ? 1 : 0);
    out.push_back({lo, lo + len - 1});
    lo += len;
  }
  return out;
}

// Runs task(i) for i in [0, count) on up to `workers` threads. Results are
// written by the task into caller-owned slots, so merge order is the caller's.
inline void run_indexed(std::size_t count, unsigned workers,
                        const std::function<void(std::size_t)>& task) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += n) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace shortint
