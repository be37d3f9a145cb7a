// Copyright 2026 The clear Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>

#include "clear/oracle.hpp"

namespace clear {

inline constexpr std::uint64_t kBruteForceCap = 1'000'000;

struct BruteForceResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<ConcreteState> witness;
  std::uint64_t family_size = 0;
};

/// Decide a query by running the interpreter on every member of its family.
/// Works only when every atom has a finite candidate set whose product stays
/// under `cap`; otherwise throws DomainTooLarge. The witness is the first
/// match in odometer order (first input slowest).
BruteForceResult brute_force_check(const declang::Program& program, const Trace& trace, const Query& query,
                                   std::uint64_t cap = kBruteForceCap);

}  // namespace clear
