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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "clear/model.hpp"

namespace clear {

/// A factual execution log: one full state per step, steps numbered 0..n-1.
class Trace {
 public:
  Trace() = default;
  explicit Trace(std::vector<ConcreteState> steps) : steps_(std::move(steps)) {}

  [[nodiscard]] std::size_t length() const noexcept { return steps_.size(); }
  [[nodiscard]] const std::vector<ConcreteState>& steps() const noexcept { return steps_; }

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<ConcreteState> steps_;
};

/// Throws StepOutOfRange.
const ConcreteState& state_at(const Trace& trace, std::size_t t);

/// Reserved record key whose contents are ignored by the parser.
inline constexpr std::string_view kLogMetaKey = "meta";

/// Parse a newline-delimited log. Each non-blank line is
/// `{"t": <int>, "vars": {<name>: <value>, ...}}` covering every catalog variable.
Trace parse_trace_log(std::string_view text, const VarCatalog& catalog);

/// Inverse of parse_trace_log; floats carry both decimal and bit pattern.
std::string serialize_trace_log(const Trace& trace, const VarCatalog& catalog);

}  // namespace clear
