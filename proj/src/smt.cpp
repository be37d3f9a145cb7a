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

#include "clear/smt.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "clear/error.hpp"
#include "clear/numeric.hpp"
#include "clear/subprocess.hpp"

namespace clear::smt {

std::string_view sat_result_name(SatResult r) noexcept {
  switch (r) {
    case SatResult::Sat: return "sat";
    case SatResult::Unsat: return "unsat";
    case SatResult::Unknown: return "unknown";
  }
  return "?";
}

std::string_view validity_name(Validity v) noexcept {
  switch (v) {
    case Validity::Valid: return "valid";
    case Validity::Invalid: return "invalid";
    case Validity::Unknown: return "unknown";
  }
  return "?";
}

std::string SmtScript::text() const { return text_with_logic(logic); }

std::string SmtScript::text_with_logic(std::string_view tag) const {
  std::string s = "(set-option :produce-models true)\n(set-logic ";
  s += tag;
  s += ")\n";
  for (const auto& d : declarations) s += d + "\n";
  for (const auto& a : assertions) s += a + "\n";
  s += "(check-sat)\n";
  if (!value_symbols.empty()) {
    s += "(get-value (";
    for (std::size_t i = 0; i < value_symbols.size(); ++i) {
      if (i > 0) s += ' ';
      s += value_symbols[i];
    }
    s += "))\n";
  }
  s += "(exit)\n";
  return s;
}

namespace {

void check_sorts(const TermPtr& t) {
  auto fail = [&](const std::string& why) { throw Error(Errc::UnsupportedOperation, why + " in " + to_smtlib(t)); };
  for (const auto& a : t->args) check_sorts(a);
  const auto& a = t->args;
  switch (t->op) {
    case Op::Not:
    case Op::And:
    case Op::Or:
    case Op::Implies:
      for (const auto& x : a) {
        if (x->sort.kind != Sort::Kind::Bool) fail("boolean connective over non-boolean");
      }
      break;
    case Op::Ite:
      if (a[0]->sort.kind != Sort::Kind::Bool || !(a[1]->sort == a[2]->sort)) fail("ill-sorted ite");
      break;
    case Op::Eq:
    case Op::BvAdd:
    case Op::BvSub:
    case Op::BvMul:
    case Op::BvSdiv:
    case Op::BvUdiv:
    case Op::BvSrem:
    case Op::BvUrem:
    case Op::BvSlt:
    case Op::BvSle:
    case Op::BvUlt:
    case Op::BvUle:
    case Op::FpAdd:
    case Op::FpSub:
    case Op::FpMul:
    case Op::FpDiv:
    case Op::FpLt:
    case Op::FpLeq:
    case Op::FpEq:
      if (!(a[0]->sort == a[1]->sort)) fail("operands of different sorts");
      break;
    default: break;
  }
}

}  // namespace

SmtScript emit_smt(const SymbolTable& symbols, const std::vector<TermPtr>& assertions,
                   const std::vector<std::string>& value_symbols, std::string_view logic) {
  SmtScript script;
  script.logic = std::string(logic);
  std::vector<TermPtr> roots = assertions;
  for (const auto& name : value_symbols) {
    const auto* s = symbols.find(name);
    if (s == nullptr) throw Error(Errc::UnboundVariable, "value query for unknown symbol '" + name + "'");
    roots.push_back(mk_sym(name, s->sort));
  }
  for (const auto& a : assertions) {
    check_sorts(a);
    if (a->sort.kind != Sort::Kind::Bool) throw Error(Errc::UnsupportedOperation, "assertion is not boolean");
  }
  for (const auto* s : symbols.closure(roots)) {
    if (s->definition) {
      check_sorts(s->definition);
      script.declarations.push_back("(define-fun " + s->name + " () " + sort_text(s->sort) + " " +
                                    to_smtlib(s->definition) + ")");
    } else {
      script.declarations.push_back("(declare-const " + s->name + " " + sort_text(s->sort) + ")");
    }
  }
  for (const auto& a : assertions) script.assertions.push_back("(assert " + to_smtlib(a) + ")");
  script.value_symbols = value_symbols;
  return script;
}

// ---------------------------------------------------------------- s-expressions

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::vector<std::vector<SExpr>> stack;
  stack.emplace_back();
  std::size_t i = 0;
  auto malformed = [&](const std::string& why) { return Error(Errc::SolverCrash, "malformed solver output: " + why); };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      stack.emplace_back();
      ++i;
    } else if (c == ')') {
      if (stack.size() < 2) throw malformed("unbalanced ')'");
      SExpr list;
      list.is_list = true;
      list.items = std::move(stack.back());
      stack.pop_back();
      stack.back().push_back(std::move(list));
      ++i;
    } else if (c == '"') {
      std::string s = "\"";
      ++i;
      while (true) {
        if (i >= text.size()) throw malformed("unterminated string");
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            s += "\"\"";
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        s += text[i++];
      }
      s += '"';
      stack.back().push_back(SExpr{false, std::move(s), {}});
    } else if (c == '|') {
      const auto close = text.find('|', i + 1);
      if (close == std::string_view::npos) throw malformed("unterminated quoted symbol");
      stack.back().push_back(SExpr{false, std::string(text.substr(i + 1, close - i - 1)), {}});
      i = close + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' && text[j] != ')') ++j;
      stack.back().push_back(SExpr{false, std::string(text.substr(i, j - i)), {}});
      i = j;
    }
  }
  if (stack.size() != 1) throw malformed("unbalanced '('");
  return std::move(stack.back());
}

namespace {

struct Bits {
  std::uint64_t value = 0;
  int width = 0;
};

Bits parse_bits(const std::string& lit) {
  Bits b;
  if (lit.size() > 2 && lit[0] == '#' && lit[1] == 'b') {
    for (std::size_t i = 2; i < lit.size(); ++i) {
      if (lit[i] != '0' && lit[i] != '1') throw Error(Errc::SolverCrash, "bad binary literal " + lit);
      b.value = (b.value << 1) | static_cast<std::uint64_t>(lit[i] - '0');
      ++b.width;
    }
  } else if (lit.size() > 2 && lit[0] == '#' && lit[1] == 'x') {
    for (std::size_t i = 2; i < lit.size(); ++i) {
      const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(lit[i])));
      int d = 0;
      if (c >= '0' && c <= '9') {
        d = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        d = c - 'a' + 10;
      } else {
        throw Error(Errc::SolverCrash, "bad hex literal " + lit);
      }
      b.value = (b.value << 4) | static_cast<std::uint64_t>(d);
      b.width += 4;
    }
  } else {
    throw Error(Errc::SolverCrash, "expected a bit-vector literal, found " + lit);
  }
  if (b.width > 64) throw Error(Errc::SolverCrash, "bit-vector literal wider than 64 bits");
  return b;
}

bool is_indexed(const SExpr& e, std::string_view head) {
  return e.is_list && e.items.size() >= 2 && !e.items[0].is_list && e.items[0].atom == "_" && !e.items[1].is_list &&
         e.items[1].atom == head;
}

}  // namespace

TermPtr parse_model_value(const SExpr& e, const Sort& sort) {
  switch (sort.kind) {
    case Sort::Kind::Bool:
      if (!e.is_list && (e.atom == "true" || e.atom == "false")) return mk_bool(e.atom == "true");
      break;
    case Sort::Kind::BV:
      if (!e.is_list) {
        const auto b = parse_bits(e.atom);
        if (b.width != sort.width) throw Error(Errc::SolverCrash, "bit-vector literal of the wrong width");
        return mk_bv(b.value, sort.width);
      }
      if (e.items.size() == 3 && !e.items[1].is_list && e.items[1].atom.starts_with("bv")) {
        return mk_bv(std::stoull(e.items[1].atom.substr(2)), sort.width);
      }
      break;
    case Sort::Kind::FP:
      if (e.is_list && e.items.size() == 4 && !e.items[0].is_list && e.items[0].atom == "fp") {
        const auto s = parse_bits(e.items[1].atom);
        const auto x = parse_bits(e.items[2].atom);
        const auto m = parse_bits(e.items[3].atom);
        if (s.width != 1 || x.width != 11 || m.width != 52) throw Error(Errc::SolverCrash, "fp literal of the wrong shape");
        return mk_fp((s.value << 63) | (x.value << 52) | m.value);
      }
      if (is_indexed(e, "+zero")) return mk_fp(0);
      if (is_indexed(e, "-zero")) return mk_fp(kFloatSignBit);
      if (is_indexed(e, "+oo")) return mk_fp(std::bit_cast<std::uint64_t>(std::numeric_limits<double>::infinity()));
      if (is_indexed(e, "-oo")) return mk_fp(std::bit_cast<std::uint64_t>(-std::numeric_limits<double>::infinity()));
      if (is_indexed(e, "NaN")) return mk_fp(kCanonicalNaN);
      break;
  }
  throw Error(Errc::SolverCrash, "cannot read model value of sort " + sort_text(sort));
}

// ---------------------------------------------------------------- solver process

SolverPool::SolverPool(std::size_t size) : size_(std::max<std::size_t>(size, 1)) {}

void SolverPool::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_use_ < size_; });
  ++in_use_;
}

void SolverPool::release() {
  {
    std::lock_guard lock(mu_);
    --in_use_;
  }
  cv_.notify_one();
}

SolverConfig SolverConfig::from_env() {
  SolverConfig c;
  if (const char* p = std::getenv("CLEAR_SOLVER"); p != nullptr && *p != '\0') c.path = p;
  if (const char* a = std::getenv("CLEAR_SOLVER_ARGS"); a != nullptr) {
    c.args.clear();
    std::istringstream in(a);
    for (std::string w; in >> w;) c.args.push_back(w);
  }
  if (const char* t = std::getenv("CLEAR_SOLVER_TIMEOUT_MS"); t != nullptr && *t != '\0') {
    c.timeout = std::chrono::milliseconds(std::stoll(t));
  }
  if (const char* l = std::getenv("CLEAR_SOLVER_LOGIC"); l != nullptr && *l != '\0') c.logic = l;
  if (const char* d = std::getenv("CLEAR_TRANSCRIPT_DIR"); d != nullptr && *d != '\0') c.transcript_dir = d;
  return c;
}

Solver::Solver(SolverConfig config) : config_(std::move(config)), executable_(find_executable(config_.path)) {}

Solver::Stats Solver::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

namespace {

struct PoolGuard {
  explicit PoolGuard(SolverPool* p) : pool(p) {
    if (pool != nullptr) pool->acquire();
  }
  ~PoolGuard() {
    if (pool != nullptr) pool->release();
  }
  PoolGuard(const PoolGuard&) = delete;
  PoolGuard& operator=(const PoolGuard&) = delete;
  SolverPool* pool;
};

bool logic_rejected(const std::string& out) {
  const auto pos = out.find("(error");
  if (pos == std::string::npos) return false;
  const auto line = out.substr(pos, out.find('\n', pos) - pos);
  return line.find("logic") != std::string::npos;
}

}  // namespace

CheckResult Solver::check_sat(const SmtScript& script, const SymbolTable& symbols) {
  const auto key = script.text();
  {
    std::lock_guard lock(mu_);
    ++stats_.calls;
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++stats_.cache_hits;
      auto hit = it->second;
      hit.cached = true;
      hit.seconds = 0;
      return hit;
    }
  }
  auto result = run(script, symbols);
  if (result.verdict != SatResult::Unknown) {
    std::lock_guard lock(mu_);
    cache_.emplace(key, result);
  }
  return result;
}

CheckResult Solver::run(const SmtScript& script, const SymbolTable& symbols) {
  if (executable_.empty()) {
    throw Error(Errc::SolverUnavailable, "solver '" + config_.path + "' not found (set CLEAR_SOLVER or --solver)");
  }
  std::vector<std::string> argv{executable_};
  argv.insert(argv.end(), config_.args.begin(), config_.args.end());

  const auto start = std::chrono::steady_clock::now();
  std::string text = script.text_with_logic(config_.logic);
  ProcessResult proc;
  {
    PoolGuard guard(config_.pool.get());
    proc = run_process(argv, text, config_.timeout);
    if (!proc.timed_out && logic_rejected(proc.out) && config_.logic != kFallbackLogic) {
      text = script.text_with_logic(kFallbackLogic);
      proc = run_process(argv, text, config_.timeout);
    }
  }
  CheckResult result;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config_.transcript_dir.empty()) {
    std::filesystem::create_directories(config_.transcript_dir);
    const auto stem = sha256_hex(text).substr(0, 16);
    result.transcript = stem + ".smt2";
    std::ofstream(config_.transcript_dir / result.transcript) << text;
    std::ofstream(config_.transcript_dir / (stem + ".out")) << proc.out << proc.err;
  }
  if (proc.timed_out) return result;

  std::vector<SExpr> out;
  try {
    out = parse_sexprs(proc.out);
  } catch (const Error& e) {
    throw Error(Errc::SolverCrash, std::string(e.what()) + "\n--- solver output ---\n" + proc.out + proc.err);
  }
  const std::size_t at = 0;
  if (!out.empty() && out[at].is_list) {
    // Errors before the verdict mean the script was rejected.
    throw Error(Errc::SolverCrash, "solver reported an error (exit " + std::to_string(proc.exit_code) +
                                       ")\n--- script ---\n" + text + "--- solver output ---\n" + proc.out + proc.err);
  }
  if (at == out.size()) {
    throw Error(Errc::SolverCrash, "no verdict from solver (exit " + std::to_string(proc.exit_code) + ")\n" + proc.out + proc.err);
  }
  const auto& verdict = out[at].atom;
  if (verdict == "unsat") {
    result.verdict = SatResult::Unsat;
  } else if (verdict == "unknown" || verdict == "timeout") {
    result.verdict = SatResult::Unknown;
  } else if (verdict == "sat") {
    result.verdict = SatResult::Sat;
    if (!script.value_symbols.empty()) {
      if (at + 1 >= out.size() || !out[at + 1].is_list) {
        throw Error(Errc::SolverCrash, "missing model after sat\n" + proc.out + proc.err);
      }
      for (const auto& pair : out[at + 1].items) {
        if (!pair.is_list || pair.items.size() != 2 || pair.items[0].is_list) {
          throw Error(Errc::SolverCrash, "malformed get-value entry\n" + proc.out);
        }
        const auto* sym = symbols.find(pair.items[0].atom);
        if (sym == nullptr) throw Error(Errc::SolverCrash, "model names unknown symbol " + pair.items[0].atom);
        result.model.emplace(sym->name, parse_model_value(pair.items[1], sym->sort));
      }
    }
  } else {
    throw Error(Errc::SolverCrash, "unexpected solver verdict '" + verdict + "'\n" + proc.out + proc.err);
  }
  return result;
}

ValidityResult check_valid(Solver& solver, const SymbolTable& symbols, const TermPtr& formula,
                           const std::vector<std::string>& value_symbols) {
  const auto script = emit_smt(symbols, {mk_not(formula)}, value_symbols, solver.config().logic);
  const auto r = solver.check_sat(script, symbols);
  ValidityResult v;
  v.seconds = r.seconds;
  v.transcript = r.transcript;
  switch (r.verdict) {
    case SatResult::Unsat: v.verdict = Validity::Valid; break;
    case SatResult::Sat:
      v.verdict = Validity::Invalid;
      v.counterexample = r.model;
      break;
    case SatResult::Unknown: v.verdict = Validity::Unknown; break;
  }
  return v;
}

}  // namespace clear::smt
