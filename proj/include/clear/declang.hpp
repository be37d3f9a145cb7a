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

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "clear/model.hpp"

// The decision language: a small deterministic imperative language whose
// programs read environment and state variables and write decision (and
// state) variables. Environment variables are read-only, loops carry explicit
// iteration bounds, and every decision variable starts from a declared value.
//
//   type Signal = enum { STRAIGHT, LEFT, RIGHT };
//   const NEAR: float64 = 1.45;
//   env agent1_signal: Signal;
//   env agent1_pos_x: float64;
//   decision move: uint<1> = 0;
//
//   if (agent1_signal == RIGHT || agent1_pos_x >= NEAR) { move := 1; }
//
namespace clear::declang {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

std::string to_string(SourceLoc loc);

enum class UnaryOp : std::uint8_t { Neg, Not };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Rem, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

std::string_view op_text(BinaryOp op) noexcept;

enum class ExprKind : std::uint8_t { Literal, Var, Unary, Binary, Cast, Abs };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// A typechecked expression. `type` is the expression's domain; for casts it
/// is the target type and the operand is args[0].
struct Expr {
  ExprKind kind = ExprKind::Literal;
  Domain type;
  SourceLoc loc;
  Value value;                  // Literal
  std::string name;             // Var
  std::size_t var_index = 0;    // Var: index into the catalog
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  std::vector<ExprPtr> args;
};

enum class StmtKind : std::uint8_t { Assign, If, While, Return };

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

struct Stmt {
  StmtKind kind = StmtKind::Return;
  SourceLoc loc;
  std::size_t target = 0;  // Assign: catalog index
  ExprPtr expr;            // Assign value, If/While condition
  Block then_body;         // If then-branch, While body
  Block else_body;
  std::uint32_t bound = 0;  // While
};

struct Constant {
  Domain type;
  Value value;
};

/// Number of statement executions a run may take before it is declared
/// untimely. Must be at least one.
class StepBudget {
 public:
  explicit StepBudget(std::uint64_t max_steps);
  [[nodiscard]] std::uint64_t max_steps() const noexcept { return max_steps_; }
  friend bool operator==(const StepBudget&, const StepBudget&) = default;

 private:
  std::uint64_t max_steps_;
};

inline constexpr std::uint64_t kDefaultMaxSteps = 10'000;

struct Program {
  std::string source;
  VarCatalog catalog;
  std::vector<Domain> enums;
  std::map<std::string, Constant, std::less<>> constants;
  /// Initial value for each catalog index; only decision entries are meaningful.
  std::vector<Value> initial;
  Block body;

  [[nodiscard]] const Domain* find_enum(std::string_view name) const;
};

/// Parse and typecheck program text. Throws SyntaxError, TypeError,
/// EnvWriteError, or UnboundedLoopError; messages carry line:column.
Program parse_program(std::string_view text);

/// Parse a standalone boolean expression in the scope of `program`. Variable
/// references outside `scope` are rejected with WrongClass.
ExprPtr parse_expression(const Program& program, std::string_view text, Projection scope);

/// Constructs used by tests and generators.
std::size_t count_leaves(const Block& block);

struct RunResult {
  ConcreteState final_state;
  std::uint64_t steps = 0;
};

/// Execute the program on concrete inputs (a state over E and S). Throws
/// BudgetExhausted, LoopBoundExceeded, or ArithmeticFault.
RunResult interpret(const Program& program, const ConcreteState& inputs, StepBudget budget);

/// Concrete evaluation of an expression where variables take their values
/// from `env`, indexed by catalog position.
Value evaluate(const Expr& expr, const std::vector<Value>& env);

/// Names of catalog variables an expression reads, in catalog order.
std::vector<std::string> referenced_vars(const Program& program, const Expr& expr);

/// Render an expression back to source form.
std::string to_source(const Program& program, const Expr& expr);

}  // namespace clear::declang
