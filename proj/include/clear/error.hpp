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

#include <stdexcept>
#include <string>
#include <string_view>

namespace clear {

/// Every failure the library reports carries one of these codes. Callers
/// switch on the code; the message is for humans.
enum class Errc {
  // trace / catalog ingestion
  EmptyTrace,
  UnknownVariable,
  DomainViolation,
  NonMonotonicStep,
  MissingVariable,
  StepOutOfRange,
  MalformedLog,
  InvalidCatalog,
  // program text
  SyntaxError,
  TypeError,
  EnvWriteError,
  UnboundedLoopError,
  // execution
  BudgetExhausted,
  LoopBoundExceeded,
  ArithmeticFault,
  UnboundVariable,
  // formulas / scenarios
  NotARelaxation,
  WrongClass,
  FactualOutsideRelaxation,
  NotTight,
  KeyframeMismatch,
  InvalidQuery,
  // solving
  UnsupportedOperation,
  SolverUnavailable,
  SolverCrash,
  DomainTooLarge,
  WitnessReplayFailed,
  // session
  NoWitness,
  SchemaVersionMismatch,
  CorruptFile,
  UnknownId,
  Busy,
  // files
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace clear
