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

#include "clear/symexec.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <fstream>
#include <functional>
#include <unordered_set>

#include "clear/error.hpp"
#include "clear/numeric.hpp"

namespace clear {

using smt::Op;
using smt::TermPtr;
using declang::BinaryOp;
using declang::Expr;
using declang::ExprKind;
using declang::Stmt;
using declang::StmtKind;
using declang::UnaryOp;

namespace {

/// Receives the condition under which an integer division would divide by zero.
using FaultHook = std::function<void(const TermPtr& condition, declang::SourceLoc loc)>;

TermPtr zero_of(const Domain& t) { return smt::mk_bv(0, t.width()); }

TermPtr cast_term(const Domain& to, const Domain& from, TermPtr x) {
  if (to.is_float()) {
    if (from.is_float()) return x;
    return smt::mk_app(from.is_signed() ? Op::ToFpSigned : Op::ToFpUnsigned, {std::move(x)});
  }
  const int w = to.width();
  if (from.is_float()) {
    const auto r = float_int_range(w, to.is_signed());
    const auto lo = smt::mk_fp(std::bit_cast<std::uint64_t>(r.lower));
    const auto hi = smt::mk_fp(std::bit_cast<std::uint64_t>(r.upper));
    auto in_range = smt::mk_and({smt::mk_app(r.lower_strict ? Op::FpLt : Op::FpLeq, {lo, x}), smt::mk_app(Op::FpLt, {x, hi})});
    auto converted = smt::mk_app(to.is_signed() ? Op::ToSbv : Op::ToUbv, {x}, w);
    return smt::mk_ite(std::move(in_range), std::move(converted), smt::mk_bv(0, w));
  }
  const int fw = from.width();
  if (w == fw) return x;
  if (w < fw) return smt::mk_app(Op::Extract, {std::move(x)}, w - 1);
  return smt::mk_app(from.is_signed() ? Op::SignExt : Op::ZeroExt, {std::move(x)}, w - fw);
}

TermPtr sym_eval(const Expr& e, const std::vector<TermPtr>& env, const FaultHook* hook, const TermPtr& guard) {
  switch (e.kind) {
    case ExprKind::Literal: return smt::mk_const(e.value, e.type);
    case ExprKind::Var: {
      const auto& t = env.at(e.var_index);
      if (!t) throw Error(Errc::UnboundVariable, "variable '" + e.name + "' has no symbolic value");
      return t;
    }
    case ExprKind::Unary: {
      auto a = sym_eval(*e.args[0], env, hook, guard);
      if (e.unary == UnaryOp::Not) return smt::mk_not(std::move(a));
      return smt::mk_app(e.type.is_float() ? Op::FpNeg : Op::BvNeg, {std::move(a)});
    }
    case ExprKind::Abs: {
      auto a = sym_eval(*e.args[0], env, hook, guard);
      if (e.type.is_float()) return smt::mk_app(Op::FpAbs, {std::move(a)});
      if (!e.type.is_signed()) return a;
      auto negative = smt::mk_app(Op::BvSlt, {a, zero_of(e.type)});
      return smt::mk_ite(std::move(negative), smt::mk_app(Op::BvNeg, {a}), a);
    }
    case ExprKind::Cast: return cast_term(e.type, e.args[0]->type, sym_eval(*e.args[0], env, hook, guard));
    case ExprKind::Binary: break;
  }

  if (e.binary == BinaryOp::And || e.binary == BinaryOp::Or) {
    auto l = sym_eval(*e.args[0], env, hook, guard);
    // The right operand only runs when the left does not decide the result.
    auto runs_right = e.binary == BinaryOp::And ? l : smt::mk_not(l);
    auto r = sym_eval(*e.args[1], env, hook, smt::mk_and({guard, runs_right}));
    return e.binary == BinaryOp::And ? smt::mk_and({l, r}) : smt::mk_or({l, r});
  }
  auto a = sym_eval(*e.args[0], env, hook, guard);
  auto b = sym_eval(*e.args[1], env, hook, guard);
  const auto& t = e.args[0]->type;
  const bool fp = t.is_float();
  const bool sg = t.is_signed();
  switch (e.binary) {
    case BinaryOp::Add: return smt::mk_app(fp ? Op::FpAdd : Op::BvAdd, {a, b});
    case BinaryOp::Sub: return smt::mk_app(fp ? Op::FpSub : Op::BvSub, {a, b});
    case BinaryOp::Mul: return smt::mk_app(fp ? Op::FpMul : Op::BvMul, {a, b});
    case BinaryOp::Div:
    case BinaryOp::Rem: {
      if (fp) return smt::mk_app(Op::FpDiv, {a, b});
      if (hook != nullptr) (*hook)(smt::mk_and({guard, smt::mk_eq(b, zero_of(t))}), e.loc);
      if (e.binary == BinaryOp::Div) return smt::mk_app(sg ? Op::BvSdiv : Op::BvUdiv, {a, b});
      return smt::mk_app(sg ? Op::BvSrem : Op::BvUrem, {a, b});
    }
    case BinaryOp::Lt:
      return smt::mk_app(fp ? Op::FpLt : sg ? Op::BvSlt : Op::BvUlt, {a, b});
    case BinaryOp::Le:
      return smt::mk_app(fp ? Op::FpLeq : sg ? Op::BvSle : Op::BvUle, {a, b});
    case BinaryOp::Gt:
      return smt::mk_app(fp ? Op::FpLt : sg ? Op::BvSlt : Op::BvUlt, {b, a});
    case BinaryOp::Ge:
      return smt::mk_app(fp ? Op::FpLeq : sg ? Op::BvSle : Op::BvUle, {b, a});
    case BinaryOp::Eq: return fp ? smt::mk_app(Op::FpEq, {a, b}) : smt::mk_eq(a, b);
    case BinaryOp::Ne: return smt::mk_not(fp ? smt::mk_app(Op::FpEq, {a, b}) : smt::mk_eq(a, b));
    default: break;
  }
  throw Error(Errc::UnsupportedOperation, "cannot compile operator " + std::string(declang::op_text(e.binary)));
}

std::string input_symbol_name(const std::string& var) { return "v_" + var; }
std::string output_symbol_name(const std::string& var) { return "o_" + var; }

class Engine {
 public:
  Engine(const declang::Program& program, smt::Solver& solver, ExploreMode mode, std::uint64_t max_steps,
         DecisionLogic& out)
      : program_(program), solver_(solver), mode_(mode), max_steps_(max_steps), out_(out) {}

  void explore(SymState initial) {
    Work start;
    start.st = std::move(initial);
    start.frames.push_back({&program_.body, 0, nullptr, 0});
    work_.push_back(std::move(start));
    while (!work_.empty()) {
      auto w = std::move(work_.back());
      work_.pop_back();
      run(w);
    }
    if (mode_ == ExploreMode::Deferred) settle_deferred();
  }

 private:
  struct Frame {
    const declang::Block* block;
    std::size_t next;
    const Stmt* loop;  // set for loop bodies
    std::uint32_t iteration;
  };

  struct Work {
    SymState st;
    std::vector<Frame> frames;
    bool proven = true;
  };

  struct Leaf {
    Work w;
    bool error = false;
    Errc code = Errc::BudgetExhausted;
    std::string message;
    TermPtr condition;
  };

  smt::SatResult check(const std::vector<TermPtr>& path, const TermPtr& extra) {
    ++out_.stats.feasibility_checks;
    std::vector<TermPtr> conj = path;
    if (extra) conj.push_back(extra);
    return feasibility(solver_, out_.symbols, smt::mk_and(std::move(conj)));
  }

  /// A failure that happens when `condition` holds on this path. Returns
  /// normally when the failure is unreachable.
  void fault(const Work& w, const TermPtr& condition, Errc code, const std::string& message) {
    std::vector<TermPtr> conj = w.st.path;
    conj.push_back(condition);
    auto full = smt::mk_and(std::move(conj));
    if (full->is_false()) return;
    if (mode_ == ExploreMode::Deferred) {
      deferred_.push_back({w, true, code, message, condition});
      return;
    }
    if (check(w.st.path, condition) != smt::SatResult::Unsat) raise(code, message);
  }

  [[noreturn]] void raise(Errc code, const std::string& message) {
    throw Error(code, message + " (path " + std::to_string(out_.paths.size() + 1) + ")");
  }

  bool tick(Work& w, declang::SourceLoc loc) {
    if (++w.st.steps <= max_steps_) return true;
    fault(w, smt::mk_bool(true), Errc::BudgetExhausted,
          declang::to_string(loc) + ": step budget of " + std::to_string(max_steps_) + " exhausted");
    return false;
  }

  TermPtr eval(const Expr& e, Work& w) {
    FaultHook hook = [&](const TermPtr& cond, declang::SourceLoc loc) {
      fault(w, cond, Errc::ArithmeticFault, declang::to_string(loc) + ": integer division by zero");
    };
    return sym_eval(e, w.st.bindings, &hook, smt::mk_bool(true));
  }

  void finish(Work& w) {
    if (mode_ == ExploreMode::Deferred) {
      deferred_.push_back({std::move(w), false, Errc::BudgetExhausted, "", nullptr});
      return;
    }
    add_path(w);
  }

  void add_path(Work& w) {
    PathResult p;
    p.id = out_.paths.size() + 1;
    p.pi = smt::mk_and(w.st.path);
    p.proven_feasible = w.proven;
    p.final_state = std::move(w.st);
    out_.paths.push_back(std::move(p));
  }

  void settle_deferred() {
    for (auto& leaf : deferred_) {
      const auto r = check(leaf.w.st.path, leaf.condition);
      if (r == smt::SatResult::Unsat) {
        ++out_.stats.pruned;
        continue;
      }
      if (leaf.error) raise(leaf.code, leaf.message);
      leaf.w.proven = r == smt::SatResult::Sat;
      add_path(leaf.w);
    }
  }

  using Action = std::function<bool(Work&)>;

  /// Continue `w` along both outcomes of `cond`. Returns true when `w`
  /// itself continues (constant condition), false when it was forked or ended.
  bool branch(Work& w, const TermPtr& cond, const Action& on_true, const Action& on_false) {
    if (cond->is_const()) return cond->is_true() ? on_true(w) : on_false(w);
    ++out_.stats.forks;
    Work t = w;
    Work f = std::move(w);
    t.st.path.push_back(cond);
    f.st.path.push_back(smt::mk_not(cond));
    bool keep_t = true;
    bool keep_f = true;
    if (mode_ == ExploreMode::Eager) {
      const auto rt = check(t.st.path, nullptr);
      keep_t = rt != smt::SatResult::Unsat;
      t.proven = t.proven && rt == smt::SatResult::Sat;
      if (keep_t) {
        const auto rf = check(f.st.path, nullptr);
        keep_f = rf != smt::SatResult::Unsat;
        f.proven = f.proven && rf == smt::SatResult::Sat;
      }
      out_.stats.pruned += static_cast<std::size_t>(!keep_t) + static_cast<std::size_t>(!keep_f);
    }
    // Depth first, then-branch first: the then-branch is pushed last.
    if (keep_f && on_false(f)) work_.push_back(std::move(f));
    if (keep_t && on_true(t)) work_.push_back(std::move(t));
    return false;
  }

  bool loop_test(Work& w, const Stmt& loop, std::uint32_t done) {
    const auto cond = eval(*loop.expr, w);
    return branch(
        w, cond,
        [&, done](Work& x) {
          if (done == loop.bound) {
            fault(x, smt::mk_bool(true), Errc::LoopBoundExceeded,
                  declang::to_string(loop.loc) + ": loop still running after " + std::to_string(loop.bound) +
                      " iterations");
            return false;
          }
          x.frames.push_back({&loop.then_body, 0, &loop, done + 1});
          return true;
        },
        [](Work&) { return true; });
  }

  void run(Work& w) {
    while (true) {
      if (w.frames.empty()) {
        finish(w);
        return;
      }
      auto& f = w.frames.back();
      if (f.next == f.block->size()) {
        const Stmt* loop = f.loop;
        const auto done = f.iteration;
        w.frames.pop_back();
        if (loop != nullptr) {
          if (!tick(w, loop->loc)) return;
          if (!loop_test(w, *loop, done)) return;
        }
        continue;
      }
      const Stmt& s = *(*f.block)[f.next++];
      if (!tick(w, s.loc)) return;
      switch (s.kind) {
        case StmtKind::Assign: {
          auto v = eval(*s.expr, w);
          if (v->op != Op::Const && v->op != Op::Sym) v = out_.symbols.define("t", std::move(v));
          w.st.bindings[s.target] = std::move(v);
          break;
        }
        case StmtKind::Return:
          w.frames.clear();
          finish(w);
          return;
        case StmtKind::If: {
          const auto cond = eval(*s.expr, w);
          const bool go_on = branch(
              w, cond,
              [&s](Work& x) {
                x.frames.push_back({&s.then_body, 0, nullptr, 0});
                return true;
              },
              [&s](Work& x) {
                x.frames.push_back({&s.else_body, 0, nullptr, 0});
                return true;
              });
          if (!go_on) return;
          break;
        }
        case StmtKind::While:
          if (!loop_test(w, s, 0)) return;
          break;
      }
    }
  }

  const declang::Program& program_;
  smt::Solver& solver_;
  ExploreMode mode_;
  std::uint64_t max_steps_;
  DecisionLogic& out_;
  std::vector<Work> work_;
  std::vector<Leaf> deferred_;
};

std::size_t dag_size(const TermPtr& t) {
  std::unordered_set<const smt::Term*> seen;
  std::vector<const smt::Term*> stack{t.get()};
  while (!stack.empty()) {
    const auto* x = stack.back();
    stack.pop_back();
    if (!seen.insert(x).second) continue;
    for (const auto& a : x->args) stack.push_back(a.get());
  }
  return seen.size();
}

}  // namespace

TermPtr compile_expr(const Expr& expr, const std::vector<TermPtr>& env) {
  return sym_eval(expr, env, nullptr, smt::mk_bool(true));
}

TermPtr atom_term(const declang::Program& program, const AtomicConstraint& atom, const TermPtr& symbol) {
  const auto& d = program.catalog.at(atom.var).domain;
  switch (atom.kind) {
    case AtomKind::Eq: return smt::mk_eq(symbol, smt::mk_const(atom.value, d));
    case AtomKind::Range: {
      const auto lo = smt::mk_const(atom.lo, d);
      const auto hi = smt::mk_const(atom.hi, d);
      Op lt = Op::FpLt;
      Op le = Op::FpLeq;
      if (d.is_int()) {
        lt = d.is_signed() ? Op::BvSlt : Op::BvUlt;
        le = d.is_signed() ? Op::BvSle : Op::BvUle;
      }
      return smt::mk_and({smt::mk_app(atom.lo_open ? lt : le, {lo, symbol}), smt::mk_app(atom.hi_open ? lt : le, {symbol, hi})});
    }
    case AtomKind::Member: {
      std::vector<TermPtr> alts;
      for (const auto& v : atom.members) alts.push_back(smt::mk_eq(symbol, smt::mk_const(v, d)));
      return smt::mk_or(std::move(alts));
    }
    case AtomKind::Free: return smt::mk_bool(true);
    case AtomKind::Raw: {
      std::vector<TermPtr> env(program.catalog.size());
      env[*program.catalog.index_of(atom.var)] = symbol;
      return compile_expr(*atom.raw, env);
    }
  }
  return smt::mk_bool(true);
}

smt::SatResult feasibility(smt::Solver& solver, const smt::SymbolTable& symbols, const TermPtr& pi) {
  if (pi->is_true()) return smt::SatResult::Sat;
  if (pi->is_false()) return smt::SatResult::Unsat;
  const auto script = smt::emit_smt(symbols, {pi}, {}, solver.config().logic);
  return solver.check_sat(script, symbols).verdict;
}

DecisionLogic sym_execute(const declang::Program& program, const Relaxation& pre, declang::StepBudget budget,
                          smt::Solver& solver, ExploreMode mode) {
  const auto start = std::chrono::steady_clock::now();
  DecisionLogic out;
  out.program_ = &program;
  const auto& decls = program.catalog.decls();

  SymState initial;
  initial.bindings.resize(decls.size());
  std::vector<TermPtr> pre_terms;
  for (std::size_t i = 0; i < decls.size(); ++i) {
    const auto& d = decls[i];
    if (d.var_class == VarClass::Decision) {
      initial.bindings[i] = smt::mk_const(program.initial[i], d.domain);
      continue;
    }
    const auto* atom = pre.find(d.name);
    if (atom == nullptr) throw Error(Errc::NotARelaxation, "precondition lacks '" + d.name + "'");
    auto sym = out.symbols.declare(input_symbol_name(d.name), smt::sort_of(d.domain));
    out.inputs.emplace(d.name, sym);
    if (d.domain.is_enum() && d.domain.members().size() < (std::uint64_t{1} << d.domain.width())) {
      pre_terms.push_back(smt::mk_app(Op::BvUlt, {sym, smt::mk_bv(d.domain.members().size(), d.domain.width())}));
    }
    pre_terms.push_back(atom_term(program, *atom, sym));
    initial.bindings[i] = atom->kind == AtomKind::Eq ? smt::mk_const(atom->value, d.domain) : sym;
  }
  for (const auto& d : decls) {
    if (d.var_class == VarClass::Decision) {
      out.outputs.emplace(d.name, out.symbols.declare(output_symbol_name(d.name), smt::sort_of(d.domain)));
    }
  }
  out.precondition = smt::mk_and(pre_terms);
  initial.path = {out.precondition};

  bool feasible = true;
  if (mode == ExploreMode::Eager) {
    ++out.stats.feasibility_checks;
    feasible = feasibility(solver, out.symbols, out.precondition) != smt::SatResult::Unsat;
  }
  if (feasible) {
    Engine engine(program, solver, mode, budget.max_steps(), out);
    engine.explore(std::move(initial));
  }
  out.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

TermPtr DecisionLogic::path_term(std::size_t i, const std::vector<std::string>& behavior_vars) const {
  const auto& p = paths.at(i);
  std::vector<TermPtr> conj{p.pi};
  const auto& decls = program_->catalog.decls();
  for (std::size_t k = 0; k < decls.size(); ++k) {
    if (decls[k].var_class != VarClass::Decision) continue;
    if (!behavior_vars.empty() &&
        std::find(behavior_vars.begin(), behavior_vars.end(), decls[k].name) == behavior_vars.end()) {
      continue;
    }
    conj.push_back(smt::mk_eq(outputs.at(decls[k].name), p.final_state.bindings[k]));
  }
  return smt::mk_and(std::move(conj));
}

TermPtr DecisionLogic::pi_term(const std::vector<std::string>& behavior_vars) const {
  std::vector<TermPtr> alts;
  for (std::size_t i = 0; i < paths.size(); ++i) alts.push_back(path_term(i, behavior_vars));
  return smt::mk_or(std::move(alts));
}

std::vector<std::string> ref_closure(const DecisionLogic& logic, const declang::Program& program, const SymState& state,
                                     std::string_view var) {
  const auto idx = program.catalog.index_of(var);
  if (!idx || *idx >= state.bindings.size() || !state.bindings[*idx]) {
    throw Error(Errc::UnboundVariable, "'" + std::string(var) + "' is not bound in this state");
  }
  std::vector<std::string> out;
  for (const auto* s : logic.symbols.closure({state.bindings[*idx]})) out.push_back(s->name);
  return out;
}

std::vector<std::pair<std::string, std::string>> decision_logic_files(const DecisionLogic& logic) {
  std::vector<std::pair<std::string, std::string>> files;
  Json index = Json::array();
  for (std::size_t i = 0; i < logic.paths.size(); ++i) {
    const auto& p = logic.paths[i];
    const auto script = smt::emit_smt(logic.symbols, {logic.path_term(i)}, {});
    auto file = "path_" + std::to_string(p.id) + ".smt2";
    index.push_back({{"id", p.id},
                     {"file", file},
                     {"pi_size", dag_size(p.pi)},
                     {"steps", p.final_state.steps},
                     {"feasible", p.proven_feasible ? "sat" : "unknown"}});
    files.emplace_back(std::move(file), script.text());
  }
  files.emplace_back("index.json", index.dump(2) + "\n");
  return files;
}

void dump_decision_logic(const DecisionLogic& logic, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : decision_logic_files(logic)) {
    std::ofstream out(dir / name, std::ios::binary);
    out << text;
    if (!out) throw Error(Errc::IoError, "cannot write " + (dir / name).string());
  }
}

}  // namespace clear
