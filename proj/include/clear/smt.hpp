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

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "clear/term.hpp"

namespace clear::smt {

inline constexpr std::string_view kDefaultLogic = "QF_FPBV";
inline constexpr std::string_view kFallbackLogic = "ALL";

/// A complete one-shot SMT-LIB v2 script.
struct SmtScript {
  std::string logic = std::string(kDefaultLogic);
  std::vector<std::string> declarations;  // declare-const / define-fun lines
  std::vector<std::string> assertions;    // (assert ...) lines
  std::vector<std::string> value_symbols;  // queried with get-value on sat

  [[nodiscard]] std::string text() const;
  /// Same script under another logic tag.
  [[nodiscard]] std::string text_with_logic(std::string_view logic) const;
};

/// Build a script asserting every term in `assertions`. Only the symbols the
/// assertions depend on are declared, in table order. Throws
/// UnsupportedOperation on sort errors and UnboundVariable on unknown symbols.
SmtScript emit_smt(const SymbolTable& symbols, const std::vector<TermPtr>& assertions,
                   const std::vector<std::string>& value_symbols, std::string_view logic = kDefaultLogic);

enum class SatResult : std::uint8_t { Sat, Unsat, Unknown };
std::string_view sat_result_name(SatResult r) noexcept;

/// Model values as constant terms, keyed by symbol name.
using Model = std::map<std::string, TermPtr, std::less<>>;

/// A parsed s-expression.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
};

/// Parse a sequence of s-expressions. Throws SolverCrash on malformed text.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// Parse a model value of the given sort (bit-vector literals, fp triples,
/// and the special float constants).
TermPtr parse_model_value(const SExpr& e, const Sort& sort);

/// Bounds the number of solver processes running at once.
class SolverPool {
 public:
  explicit SolverPool(std::size_t size);
  void acquire();
  void release();
  [[nodiscard]] std::size_t size() const noexcept { return size_; }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t size_;
  std::size_t in_use_ = 0;
};

struct SolverConfig {
  std::string path = "z3";
  std::vector<std::string> args = {"-in", "-smt2"};
  std::chrono::milliseconds timeout{30'000};
  std::string logic = std::string(kDefaultLogic);
  std::filesystem::path transcript_dir;  // empty disables transcripts
  std::shared_ptr<SolverPool> pool;

  /// Reads CLEAR_SOLVER, CLEAR_SOLVER_ARGS, CLEAR_SOLVER_TIMEOUT_MS,
  /// CLEAR_SOLVER_LOGIC, and CLEAR_TRANSCRIPT_DIR.
  static SolverConfig from_env();
};

struct CheckResult {
  SatResult verdict = SatResult::Unknown;
  Model model;
  std::string transcript;  // transcript file name, when transcripts are enabled
  double seconds = 0;
  bool cached = false;
};

/// Runs scripts through an external solver. Results are cached by script
/// text; the cache is shared by every caller of one Solver.
class Solver {
 public:
  explicit Solver(SolverConfig config);

  /// Throws SolverUnavailable or SolverCrash. A timeout yields Unknown.
  CheckResult check_sat(const SmtScript& script, const SymbolTable& symbols);

  [[nodiscard]] const SolverConfig& config() const noexcept { return config_; }
  /// Resolved executable path, or empty when the solver is missing.
  [[nodiscard]] const std::string& executable() const noexcept { return executable_; }
  [[nodiscard]] bool available() const noexcept { return !executable_.empty(); }

  struct Stats {
    std::size_t calls = 0;
    std::size_t cache_hits = 0;
  };
  [[nodiscard]] Stats stats() const;

 private:
  CheckResult run(const SmtScript& script, const SymbolTable& symbols);

  SolverConfig config_;
  std::string executable_;
  mutable std::mutex mu_;
  std::map<std::string, CheckResult, std::less<>> cache_;
  Stats stats_;
};

enum class Validity : std::uint8_t { Valid, Invalid, Unknown };
std::string_view validity_name(Validity v) noexcept;

struct ValidityResult {
  Validity verdict = Validity::Unknown;
  Model counterexample;
  std::string transcript;
  double seconds = 0;
};

/// Validity of `formula` as satisfiability of its negation; on Invalid the
/// model is a counterexample.
ValidityResult check_valid(Solver& solver, const SymbolTable& symbols, const TermPtr& formula,
                           const std::vector<std::string>& value_symbols);

}  // namespace clear::smt
