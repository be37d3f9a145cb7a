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

#include <bit>
#include <cmath>

#include "clear/declang.hpp"
#include "clear/error.hpp"
#include "clear/numeric.hpp"

namespace clear::declang {

namespace {

Value float_result(double d) {
  if (std::isnan(d)) return Value::float_bits(kCanonicalNaN);
  return Value::float64(d);
}

Value int_arith(BinaryOp op, const Domain& t, std::uint64_t a, std::uint64_t b, SourceLoc loc) {
  const int w = t.width();
  switch (op) {
    case BinaryOp::Add: return Value::int_bits(a + b, w);
    case BinaryOp::Sub: return Value::int_bits(a - b, w);
    case BinaryOp::Mul: return Value::int_bits(a * b, w);
    case BinaryOp::Div:
    case BinaryOp::Rem: {
      if ((b & low_mask(w)) == 0) throw Error(Errc::ArithmeticFault, to_string(loc) + ": integer division by zero");
      if (!t.is_signed()) return Value::int_bits(op == BinaryOp::Div ? a / b : a % b, w);
      const auto sa = sign_extend(a, w);
      const auto sb = sign_extend(b, w);
      // Only the 64-bit INT_MIN / -1 overflows in host arithmetic; narrower widths wrap when masked.
      if (sb == -1) return Value::int_bits(op == BinaryOp::Div ? (~a + 1) : 0, w);
      return Value::int_bits(static_cast<std::uint64_t>(op == BinaryOp::Div ? sa / sb : sa % sb), w);
    }
    default: break;
  }
  throw Error(Errc::TypeError, to_string(loc) + ": bad integer operator");
}

Value float_arith(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add: return float_result(a + b);
    case BinaryOp::Sub: return float_result(a - b);
    case BinaryOp::Mul: return float_result(a * b);
    case BinaryOp::Div: return float_result(a / b);
    default: break;
  }
  throw Error(Errc::TypeError, "bad float operator");
}

bool compare(BinaryOp op, const Domain& t, const Value& a, const Value& b) {
  if (t.is_float()) {
    const double x = a.as_double();
    const double y = b.as_double();
    switch (op) {
      case BinaryOp::Lt: return x < y;
      case BinaryOp::Le: return x <= y;
      case BinaryOp::Gt: return x > y;
      case BinaryOp::Ge: return x >= y;
      case BinaryOp::Eq: return x == y;
      case BinaryOp::Ne: return x != y;
      default: break;
    }
  } else if (t.is_int()) {
    const int w = t.width();
    const auto ord = t.is_signed() ? sign_extend(a.bits(), w) <=> sign_extend(b.bits(), w) : a.bits() <=> b.bits();
    switch (op) {
      case BinaryOp::Lt: return ord < 0;
      case BinaryOp::Le: return ord <= 0;
      case BinaryOp::Gt: return ord > 0;
      case BinaryOp::Ge: return ord >= 0;
      case BinaryOp::Eq: return ord == 0;
      case BinaryOp::Ne: return ord != 0;
      default: break;
    }
  } else {
    if (op == BinaryOp::Eq) return a.bits() == b.bits();
    if (op == BinaryOp::Ne) return a.bits() != b.bits();
  }
  throw Error(Errc::TypeError, "bad comparison");
}

Value cast(const Domain& to, const Domain& from, const Value& v) {
  if (to.is_float()) {
    if (from.is_float()) return v;
    return Value::float64(from.is_signed() ? static_cast<double>(v.as_signed(from.width()))
                                           : static_cast<double>(v.bits()));
  }
  const int w = to.width();
  if (from.is_float()) {
    const double d = v.as_double();
    if (!float_fits_int(d, w, to.is_signed())) return Value::int_bits(0, w);
    const double t = std::trunc(d);
    if (to.is_signed()) return Value::int_bits(static_cast<std::uint64_t>(static_cast<std::int64_t>(t)), w);
    return Value::int_bits(static_cast<std::uint64_t>(t), w);
  }
  const auto widened = from.is_signed() ? static_cast<std::uint64_t>(v.as_signed(from.width())) : v.bits();
  return Value::int_bits(widened, w);
}

}  // namespace

Value evaluate(const Expr& e, const std::vector<Value>& env) {
  switch (e.kind) {
    case ExprKind::Literal: return e.value;
    case ExprKind::Var: return env.at(e.var_index);
    case ExprKind::Unary: {
      const auto v = evaluate(*e.args[0], env);
      if (e.unary == UnaryOp::Not) return Value::boolean(!v.as_bool());
      if (e.type.is_float()) return Value::float_bits(v.bits() ^ kFloatSignBit);
      return Value::int_bits(~v.bits() + 1, e.type.width());
    }
    case ExprKind::Abs: {
      const auto v = evaluate(*e.args[0], env);
      if (e.type.is_float()) return Value::float_bits(v.bits() & ~kFloatSignBit);
      if (e.type.is_signed() && v.as_signed(e.type.width()) < 0) return Value::int_bits(~v.bits() + 1, e.type.width());
      return v;
    }
    case ExprKind::Cast: return cast(e.type, e.args[0]->type, evaluate(*e.args[0], env));
    case ExprKind::Binary: {
      if (e.binary == BinaryOp::And) {
        return Value::boolean(evaluate(*e.args[0], env).as_bool() && evaluate(*e.args[1], env).as_bool());
      }
      if (e.binary == BinaryOp::Or) {
        return Value::boolean(evaluate(*e.args[0], env).as_bool() || evaluate(*e.args[1], env).as_bool());
      }
      const auto a = evaluate(*e.args[0], env);
      const auto b = evaluate(*e.args[1], env);
      const auto& t = e.args[0]->type;
      switch (e.binary) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Rem:
          if (t.is_float()) return float_arith(e.binary, a.as_double(), b.as_double());
          return int_arith(e.binary, t, a.bits(), b.bits(), e.loc);
        default: return Value::boolean(compare(e.binary, t, a, b));
      }
    }
  }
  throw Error(Errc::TypeError, "bad expression");
}

namespace {

enum class Flow : std::uint8_t { Next, Returned };

class Machine {
 public:
  Machine(std::vector<Value>& env, std::uint64_t max_steps) : env_(env), max_steps_(max_steps) {}

  void tick(SourceLoc loc) {
    if (++steps_ > max_steps_) {
      throw Error(Errc::BudgetExhausted, to_string(loc) + ": step budget of " + std::to_string(max_steps_) + " exhausted");
    }
  }

  Flow run(const Block& block) {
    for (const auto& s : block) {
      if (exec(*s) == Flow::Returned) return Flow::Returned;
    }
    return Flow::Next;
  }

  Flow exec(const Stmt& s) {
    tick(s.loc);
    switch (s.kind) {
      case StmtKind::Assign: env_[s.target] = evaluate(*s.expr, env_); return Flow::Next;
      case StmtKind::Return: return Flow::Returned;
      case StmtKind::If:
        return run(evaluate(*s.expr, env_).as_bool() ? s.then_body : s.else_body);
      case StmtKind::While: {
        std::uint32_t done = 0;
        while (evaluate(*s.expr, env_).as_bool()) {
          if (done == s.bound) {
            throw Error(Errc::LoopBoundExceeded,
                        to_string(s.loc) + ": loop still running after " + std::to_string(s.bound) + " iterations");
          }
          ++done;
          if (run(s.then_body) == Flow::Returned) return Flow::Returned;
          tick(s.loc);
        }
        return Flow::Next;
      }
    }
    return Flow::Next;
  }

  [[nodiscard]] std::uint64_t steps() const noexcept { return steps_; }

 private:
  std::vector<Value>& env_;
  std::uint64_t max_steps_;
  std::uint64_t steps_ = 0;
};

}  // namespace

RunResult interpret(const Program& program, const ConcreteState& inputs, StepBudget budget) {
  check_state(program.catalog, inputs, Projection::Inputs);
  const auto& decls = program.catalog.decls();
  std::vector<Value> env(decls.size());
  for (std::size_t i = 0; i < decls.size(); ++i) {
    env[i] = decls[i].var_class == VarClass::Decision ? program.initial[i] : inputs.at(decls[i].name);
  }
  Machine m(env, budget.max_steps());
  m.run(program.body);
  RunResult out;
  for (std::size_t i = 0; i < decls.size(); ++i) out.final_state.set(decls[i].name, env[i]);
  out.steps = m.steps();
  return out;
}

}  // namespace clear::declang
