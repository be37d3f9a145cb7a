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

#include "clear/term.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <unordered_set>

#include "clear/error.hpp"
#include "clear/numeric.hpp"

namespace clear::smt {

Sort sort_of(const Domain& d) {
  switch (d.kind()) {
    case Domain::Kind::Bool: return Sort::boolean();
    case Domain::Kind::Float64: return Sort::fp();
    case Domain::Kind::Int:
    case Domain::Kind::Enum: return Sort::bv(d.width());
  }
  return Sort::boolean();
}

std::string sort_text(const Sort& s) {
  switch (s.kind) {
    case Sort::Kind::Bool: return "Bool";
    case Sort::Kind::BV: return "(_ BitVec " + std::to_string(s.width) + ")";
    case Sort::Kind::FP: return "(_ FloatingPoint 11 53)";
  }
  return "?";
}

namespace {

TermPtr make(Op op, Sort sort, std::vector<TermPtr> args, int param = 0) {
  auto t = std::make_shared<Term>();
  t->op = op;
  t->sort = sort;
  t->args = std::move(args);
  t->param = param;
  return t;
}

double dbl(const TermPtr& t) { return std::bit_cast<double>(t->bits); }

TermPtr fp_result(double d) { return mk_fp(std::isnan(d) ? kCanonicalNaN : std::bit_cast<std::uint64_t>(d)); }

bool is_nan_bits(std::uint64_t b) { return std::isnan(std::bit_cast<double>(b)); }

std::uint64_t neg_bits(std::uint64_t x, int w) { return (~x + 1) & low_mask(w); }
bool msb(std::uint64_t x, int w) { return ((x >> (w - 1)) & 1) != 0; }

std::uint64_t udiv(std::uint64_t s, std::uint64_t t, int w) { return t == 0 ? low_mask(w) : s / t; }
std::uint64_t urem(std::uint64_t s, std::uint64_t t) { return t == 0 ? s : s % t; }

// Signed division and remainder defined through their unsigned counterparts,
// which also fixes the results for a zero divisor.
std::uint64_t sdiv(std::uint64_t s, std::uint64_t t, int w) {
  const bool ns = msb(s, w);
  const bool nt = msb(t, w);
  const auto as = ns ? neg_bits(s, w) : s;
  const auto at = nt ? neg_bits(t, w) : t;
  const auto q = udiv(as, at, w);
  return ns != nt ? neg_bits(q, w) : q;
}

std::uint64_t srem(std::uint64_t s, std::uint64_t t, int w) {
  const bool ns = msb(s, w);
  const auto as = ns ? neg_bits(s, w) : s;
  const auto at = msb(t, w) ? neg_bits(t, w) : t;
  const auto r = urem(as, at);
  return ns ? neg_bits(r, w) : r;
}

Sort result_sort(Op op, const std::vector<TermPtr>& args, int param) {
  switch (op) {
    case Op::Not:
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Eq:
    case Op::BvSlt:
    case Op::BvSle:
    case Op::BvUlt:
    case Op::BvUle:
    case Op::FpLt:
    case Op::FpLeq:
    case Op::FpEq:
    case Op::FpIsNaN: return Sort::boolean();
    case Op::Ite: return args.at(1)->sort;
    case Op::SignExt:
    case Op::ZeroExt: return Sort::bv(args.at(0)->sort.width + param);
    case Op::Extract: return Sort::bv(param + 1);
    case Op::ToSbv:
    case Op::ToUbv: return Sort::bv(param);
    case Op::FpAdd:
    case Op::FpSub:
    case Op::FpMul:
    case Op::FpDiv:
    case Op::FpNeg:
    case Op::FpAbs:
    case Op::ToFpSigned:
    case Op::ToFpUnsigned: return Sort::fp();
    default: return args.at(0)->sort;
  }
}

/// Evaluate an operator whose operands are all constants.
TermPtr eval_const(Op op, const std::vector<TermPtr>& a, int param) {
  const int w = a.empty() ? 0 : a[0]->sort.width;
  switch (op) {
    case Op::Not: return mk_bool(a[0]->bits == 0);
    case Op::Implies: return mk_bool(a[0]->bits == 0 || a[1]->bits != 0);
    case Op::Ite: return a[0]->bits != 0 ? a[1] : a[2];
    case Op::Eq:
      if (a[0]->sort.kind == Sort::Kind::FP && is_nan_bits(a[0]->bits) && is_nan_bits(a[1]->bits)) return mk_bool(true);
      return mk_bool(a[0]->bits == a[1]->bits);
    case Op::BvAdd: return mk_bv(a[0]->bits + a[1]->bits, w);
    case Op::BvSub: return mk_bv(a[0]->bits - a[1]->bits, w);
    case Op::BvMul: return mk_bv(a[0]->bits * a[1]->bits, w);
    case Op::BvUdiv: return mk_bv(udiv(a[0]->bits, a[1]->bits, w), w);
    case Op::BvUrem: return mk_bv(urem(a[0]->bits, a[1]->bits), w);
    case Op::BvSdiv: return mk_bv(sdiv(a[0]->bits, a[1]->bits, w), w);
    case Op::BvSrem: return mk_bv(srem(a[0]->bits, a[1]->bits, w), w);
    case Op::BvNeg: return mk_bv(neg_bits(a[0]->bits, w), w);
    case Op::BvSlt: return mk_bool(sign_extend(a[0]->bits, w) < sign_extend(a[1]->bits, w));
    case Op::BvSle: return mk_bool(sign_extend(a[0]->bits, w) <= sign_extend(a[1]->bits, w));
    case Op::BvUlt: return mk_bool(a[0]->bits < a[1]->bits);
    case Op::BvUle: return mk_bool(a[0]->bits <= a[1]->bits);
    case Op::SignExt: return mk_bv(static_cast<std::uint64_t>(sign_extend(a[0]->bits, w)), w + param);
    case Op::ZeroExt: return mk_bv(a[0]->bits, w + param);
    case Op::Extract: return mk_bv(a[0]->bits, param + 1);
    case Op::FpAdd: return fp_result(dbl(a[0]) + dbl(a[1]));
    case Op::FpSub: return fp_result(dbl(a[0]) - dbl(a[1]));
    case Op::FpMul: return fp_result(dbl(a[0]) * dbl(a[1]));
    case Op::FpDiv: return fp_result(dbl(a[0]) / dbl(a[1]));
    case Op::FpNeg: return is_nan_bits(a[0]->bits) ? mk_fp(kCanonicalNaN) : mk_fp(a[0]->bits ^ kFloatSignBit);
    case Op::FpAbs: return is_nan_bits(a[0]->bits) ? mk_fp(kCanonicalNaN) : mk_fp(a[0]->bits & ~kFloatSignBit);
    case Op::FpLt: return mk_bool(dbl(a[0]) < dbl(a[1]));
    case Op::FpLeq: return mk_bool(dbl(a[0]) <= dbl(a[1]));
    case Op::FpEq: return mk_bool(dbl(a[0]) == dbl(a[1]));
    case Op::FpIsNaN: return mk_bool(std::isnan(dbl(a[0])));
    case Op::ToFpSigned: return fp_result(static_cast<double>(sign_extend(a[0]->bits, w)));
    case Op::ToFpUnsigned: return fp_result(static_cast<double>(a[0]->bits));
    case Op::ToSbv:
    case Op::ToUbv: {
      // Out-of-range conversions are unspecified; callers guard them.
      const double d = dbl(a[0]);
      if (!float_fits_int(d, param, op == Op::ToSbv)) return mk_bv(0, param);
      const double t = std::trunc(d);
      if (op == Op::ToSbv) return mk_bv(static_cast<std::uint64_t>(static_cast<std::int64_t>(t)), param);
      return mk_bv(static_cast<std::uint64_t>(t), param);
    }
    default: break;
  }
  throw Error(Errc::UnsupportedOperation, "cannot fold operator");
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Ite: return "ite";
    case Op::Eq: return "=";
    case Op::BvAdd: return "bvadd";
    case Op::BvSub: return "bvsub";
    case Op::BvMul: return "bvmul";
    case Op::BvSdiv: return "bvsdiv";
    case Op::BvUdiv: return "bvudiv";
    case Op::BvSrem: return "bvsrem";
    case Op::BvUrem: return "bvurem";
    case Op::BvNeg: return "bvneg";
    case Op::BvSlt: return "bvslt";
    case Op::BvSle: return "bvsle";
    case Op::BvUlt: return "bvult";
    case Op::BvUle: return "bvule";
    case Op::FpAdd: return "fp.add RNE";
    case Op::FpSub: return "fp.sub RNE";
    case Op::FpMul: return "fp.mul RNE";
    case Op::FpDiv: return "fp.div RNE";
    case Op::FpNeg: return "fp.neg";
    case Op::FpAbs: return "fp.abs";
    case Op::FpLt: return "fp.lt";
    case Op::FpLeq: return "fp.leq";
    case Op::FpEq: return "fp.eq";
    case Op::FpIsNaN: return "fp.isNaN";
    default: return "";
  }
}

}  // namespace

TermPtr mk_bool(bool b) {
  static const TermPtr t = [] {
    auto x = std::make_shared<Term>();
    x->bits = 1;
    return TermPtr(x);
  }();
  static const TermPtr f = make(Op::Const, Sort::boolean(), {});
  return b ? t : f;
}

TermPtr mk_bv(std::uint64_t bits, int width) {
  auto t = std::make_shared<Term>();
  t->op = Op::Const;
  t->sort = Sort::bv(width);
  t->bits = bits & low_mask(width);
  return t;
}

TermPtr mk_fp(std::uint64_t bits) {
  auto t = std::make_shared<Term>();
  t->op = Op::Const;
  t->sort = Sort::fp();
  t->bits = bits;
  return t;
}

TermPtr mk_const(const Value& v, const Domain& d) {
  switch (d.kind()) {
    case Domain::Kind::Bool: return mk_bool(v.as_bool());
    case Domain::Kind::Float64: return mk_fp(v.bits());
    default: return mk_bv(v.bits(), d.width());
  }
}

TermPtr mk_sym(std::string name, Sort sort) {
  auto t = std::make_shared<Term>();
  t->op = Op::Sym;
  t->sort = sort;
  t->name = std::move(name);
  return t;
}

TermPtr mk_not(TermPtr a) {
  if (a->is_const()) return mk_bool(a->bits == 0);
  if (a->op == Op::Not) return a->args[0];
  return make(Op::Not, Sort::boolean(), {std::move(a)});
}

TermPtr mk_and(std::vector<TermPtr> args) {
  std::vector<TermPtr> kept;
  std::unordered_set<const Term*> seen;
  for (auto& a : args) {
    if (a->is_false()) return mk_bool(false);
    if (a->is_true()) continue;
    if (a->op == Op::And) {
      for (const auto& b : a->args) {
        if (seen.insert(b.get()).second) kept.push_back(b);
      }
      continue;
    }
    if (seen.insert(a.get()).second) kept.push_back(std::move(a));
  }
  if (kept.empty()) return mk_bool(true);
  if (kept.size() == 1) return kept[0];
  return make(Op::And, Sort::boolean(), std::move(kept));
}

TermPtr mk_or(std::vector<TermPtr> args) {
  std::vector<TermPtr> kept;
  std::unordered_set<const Term*> seen;
  for (auto& a : args) {
    if (a->is_true()) return mk_bool(true);
    if (a->is_false()) continue;
    if (seen.insert(a.get()).second) kept.push_back(std::move(a));
  }
  if (kept.empty()) return mk_bool(false);
  if (kept.size() == 1) return kept[0];
  return make(Op::Or, Sort::boolean(), std::move(kept));
}

TermPtr mk_implies(TermPtr a, TermPtr b) {
  if (a->is_false() || b->is_true()) return mk_bool(true);
  if (a->is_true()) return b;
  return make(Op::Implies, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr mk_ite(TermPtr c, TermPtr t, TermPtr e) {
  if (c->is_const()) return c->bits != 0 ? t : e;
  if (t == e) return t;
  auto sort = t->sort;
  return make(Op::Ite, sort, {std::move(c), std::move(t), std::move(e)});
}

TermPtr mk_eq(TermPtr a, TermPtr b) { return mk_app(Op::Eq, {std::move(a), std::move(b)}); }

TermPtr mk_app(Op op, std::vector<TermPtr> args, int param) {
  switch (op) {
    case Op::Not: return mk_not(args.at(0));
    case Op::And: return mk_and(std::move(args));
    case Op::Or: return mk_or(std::move(args));
    case Op::Implies: return mk_implies(args.at(0), args.at(1));
    case Op::Ite: return mk_ite(args.at(0), args.at(1), args.at(2));
    case Op::Const:
    case Op::Sym: throw Error(Errc::UnsupportedOperation, "mk_app on a leaf");
    default: break;
  }
  const bool all_const = std::all_of(args.begin(), args.end(), [](const TermPtr& a) { return a->is_const(); });
  if (all_const) return eval_const(op, args, param);
  if (op == Op::Eq && args[0] == args[1]) return mk_bool(true);
  const auto sort = result_sort(op, args, param);
  return make(op, sort, std::move(args), param);
}

Value const_value(const Term& t, const Domain& d) {
  switch (d.kind()) {
    case Domain::Kind::Bool: return Value::boolean(t.bits != 0);
    case Domain::Kind::Float64: return Value::float_bits(t.bits);
    case Domain::Kind::Int: return Value::int_bits(t.bits, d.width());
    case Domain::Kind::Enum: return Value::enum_code(static_cast<std::uint32_t>(t.bits));
  }
  return {};
}

std::optional<TermPtr> fold(const TermPtr& t, const SymbolLookup& symbols) {
  std::map<const Term*, TermPtr> memo;
  bool missing = false;
  std::function<TermPtr(const TermPtr&)> go = [&](const TermPtr& x) -> TermPtr {
    if (x->is_const()) return x;
    if (auto it = memo.find(x.get()); it != memo.end()) return it->second;
    TermPtr out;
    if (x->op == Op::Sym) {
      auto it = symbols.find(x->name);
      if (it == symbols.end()) {
        missing = true;
        out = x;
      } else {
        out = it->second;
      }
    } else {
      std::vector<TermPtr> args;
      args.reserve(x->args.size());
      for (const auto& a : x->args) args.push_back(go(a));
      out = mk_app(x->op, std::move(args), x->param);
    }
    memo.emplace(x.get(), out);
    return out;
  };
  auto r = go(t);
  if (missing || !r->is_const()) return std::nullopt;
  return r;
}

std::vector<std::string> free_symbols(const TermPtr& t) {
  std::vector<std::string> out;
  std::unordered_set<const Term*> seen;
  std::set<std::string, std::less<>> names;
  std::vector<const Term*> stack{t.get()};
  // Preorder, left to right, so the result order is stable.
  while (!stack.empty()) {
    const Term* x = stack.back();
    stack.pop_back();
    if (!seen.insert(x).second) continue;
    if (x->op == Op::Sym) {
      if (names.insert(x->name).second) out.push_back(x->name);
      continue;
    }
    for (auto it = x->args.rbegin(); it != x->args.rend(); ++it) stack.push_back(it->get());
  }
  return out;
}

std::string bv_literal(std::uint64_t bits, int width) {
  std::string s;
  if (width % 4 == 0) {
    static const char* const kHex = "0123456789abcdef";
    s = "#x";
    for (int i = width / 4 - 1; i >= 0; --i) s += kHex[(bits >> (4 * i)) & 0xF];
  } else {
    s = "#b";
    for (int i = width - 1; i >= 0; --i) s += ((bits >> i) & 1) != 0 ? '1' : '0';
  }
  return s;
}

std::string fp_literal(std::uint64_t bits) {
  return "(fp " + bv_literal(bits >> 63, 1) + " " + bv_literal((bits >> 52) & 0x7FF, 11) + " " +
         bv_literal(bits & ((std::uint64_t{1} << 52) - 1), 52) + ")";
}

std::string to_smtlib(const TermPtr& t) {
  std::string out;
  std::function<void(const Term&)> go = [&](const Term& x) {
    switch (x.op) {
      case Op::Const:
        if (x.sort.kind == Sort::Kind::Bool) {
          out += x.bits != 0 ? "true" : "false";
        } else if (x.sort.kind == Sort::Kind::BV) {
          out += bv_literal(x.bits, x.sort.width);
        } else {
          out += fp_literal(x.bits);
        }
        return;
      case Op::Sym: out += x.name; return;
      case Op::SignExt: out += "((_ sign_extend " + std::to_string(x.param) + ")"; break;
      case Op::ZeroExt: out += "((_ zero_extend " + std::to_string(x.param) + ")"; break;
      case Op::Extract: out += "((_ extract " + std::to_string(x.param) + " 0)"; break;
      case Op::ToFpSigned: out += "((_ to_fp 11 53) RNE"; break;
      case Op::ToFpUnsigned: out += "((_ to_fp_unsigned 11 53) RNE"; break;
      case Op::ToSbv: out += "((_ fp.to_sbv " + std::to_string(x.param) + ") RTZ"; break;
      case Op::ToUbv: out += "((_ fp.to_ubv " + std::to_string(x.param) + ") RTZ"; break;
      default:
        out += "(";
        out += op_name(x.op);
        break;
    }
    for (const auto& a : x.args) {
      out += ' ';
      go(*a);
    }
    out += ')';
  };
  go(*t);
  return out;
}

TermPtr SymbolTable::declare(const std::string& name, Sort sort) {
  if (index_.contains(name)) throw Error(Errc::UnsupportedOperation, "symbol '" + name + "' declared twice");
  index_.emplace(name, symbols_.size());
  symbols_.push_back({name, sort, nullptr});
  return mk_sym(name, sort);
}

TermPtr SymbolTable::define(const std::string& prefix, TermPtr definition) {
  const auto name = prefix + std::to_string(next_def_++);
  const auto sort = definition->sort;
  index_.emplace(name, symbols_.size());
  symbols_.push_back({name, sort, std::move(definition)});
  return mk_sym(name, sort);
}

const Symbol* SymbolTable::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &symbols_[it->second];
}

std::vector<const Symbol*> SymbolTable::closure(const std::vector<TermPtr>& roots) const {
  std::vector<bool> used(symbols_.size(), false);
  std::vector<std::string> work;
  for (const auto& r : roots) {
    for (auto& n : free_symbols(r)) work.push_back(std::move(n));
  }
  while (!work.empty()) {
    const auto name = std::move(work.back());
    work.pop_back();
    auto it = index_.find(name);
    if (it == index_.end()) throw Error(Errc::UnboundVariable, "undeclared symbol '" + name + "'");
    if (used[it->second]) continue;
    used[it->second] = true;
    if (const auto& def = symbols_[it->second].definition) {
      for (auto& n : free_symbols(def)) work.push_back(std::move(n));
    }
  }
  std::vector<const Symbol*> out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (used[i]) out.push_back(&symbols_[i]);
  }
  return out;
}

}  // namespace clear::smt
