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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shortint {

// Raised when an enumeration would exceed its work budget. `required` is the
// number of evaluations the request would have needed.
class budget_error : public std::runtime_error {
 public:
  budget_error(const std::string& what, std::uint64_t required, std::uint64_t limit)
      : std::runtime_error(what + " (requires " + std::to_string(required) +
                           ", budget " + std::to_string(limit) + ")"),
        required_(required),
        limit_(limit) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t required_;
  std::uint64_t limit_;
};

}  // namespace shortint
