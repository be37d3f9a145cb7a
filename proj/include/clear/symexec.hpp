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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "clear/declang.hpp"
#include "clear/formula.hpp"
#include "clear/smt.hpp"

namespace clear {

/// Symbolic machine state: one term per catalog variable plus the path
/// constraint as a list of conjuncts.
struct SymState {
  std::vector<smt::TermPtr> bindings;
  std::vector<smt::TermPtr> path;
  std::uint64_t steps = 0;
};

struct PathResult {
  std::size_t id = 0;
  smt::TermPtr pi;  // path constraint, including the precondition
  SymState final_state;
  /// True when feasibility was proven; false when the solver answered unknown
  /// and the path was kept to stay sound.
  bool proven_feasible = true;
};

enum class ExploreMode : std::uint8_t {
  Eager,     // check each branch when it forks
  Deferred,  // fork unconditionally, prune infeasible leaves at the end
};

struct SymexecStats {
  std::size_t forks = 0;
  std::size_t feasibility_checks = 0;
  std::size_t pruned = 0;
  double seconds = 0;
};

/// Paths of one program under one precondition. Each path's decision
/// variables are bound to fresh output symbols `o_<name>` in pi_term().
class DecisionLogic {
 public:
  std::vector<PathResult> paths;
  smt::SymbolTable symbols;
  std::map<std::string, smt::TermPtr, std::less<>> inputs;   // input variable -> its symbol
  std::map<std::string, smt::TermPtr, std::less<>> outputs;  // decision variable -> its output symbol
  smt::TermPtr precondition;
  SymexecStats stats;

  [[nodiscard]] std::size_t ct() const noexcept { return paths.size(); }

  /// The path disjunction with output bindings for `behavior_vars`
  /// (all decision variables when empty).
  [[nodiscard]] smt::TermPtr pi_term(const std::vector<std::string>& behavior_vars = {}) const;
  /// pi_i conjoined with the output bindings for path i.
  [[nodiscard]] smt::TermPtr path_term(std::size_t i, const std::vector<std::string>& behavior_vars = {}) const;

 private:
  friend DecisionLogic sym_execute(const declang::Program&, const Relaxation&, declang::StepBudget, smt::Solver&,
                                   ExploreMode);
  const declang::Program* program_ = nullptr;
};

/// Explore every feasible path of `program` from inputs satisfying `pre`.
/// Throws BudgetExhausted, LoopBoundExceeded, or ArithmeticFault when a
/// feasible path ends in that failure, and SolverUnavailable.
DecisionLogic sym_execute(const declang::Program& program, const Relaxation& pre, declang::StepBudget budget,
                          smt::Solver& solver, ExploreMode mode = ExploreMode::Eager);

/// Satisfiability of a path constraint.
smt::SatResult feasibility(smt::Solver& solver, const smt::SymbolTable& symbols, const smt::TermPtr& pi);

/// Symbols the binding of `var` depends on, transitively through
/// definitions, in creation order. Throws UnboundVariable.
std::vector<std::string> ref_closure(const DecisionLogic& logic, const declang::Program& program, const SymState& state,
                                     std::string_view var);

/// Term for a relaxation atom over the given input symbol.
smt::TermPtr atom_term(const declang::Program& program, const AtomicConstraint& atom, const smt::TermPtr& symbol);

/// Compile an expression with variables bound to `env` (catalog-indexed).
/// Integer division uses the solver's total semantics; no fault checks.
smt::TermPtr compile_expr(const declang::Expr& expr, const std::vector<smt::TermPtr>& env);

/// One SMT-LIB script per path plus an index.json, as (file name, text).
std::vector<std::pair<std::string, std::string>> decision_logic_files(const DecisionLogic& logic);

/// Write decision_logic_files() into `dir`.
void dump_decision_logic(const DecisionLogic& logic, const std::filesystem::path& dir);

}  // namespace clear
