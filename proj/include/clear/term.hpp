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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clear/model.hpp"

namespace clear::smt {

struct Sort {
  enum class Kind : std::uint8_t { Bool, BV, FP } kind = Kind::Bool;
  int width = 0;  // BV only

  static Sort boolean() { return {Kind::Bool, 0}; }
  static Sort bv(int w) { return {Kind::BV, w}; }
  static Sort fp() { return {Kind::FP, 0}; }

  friend bool operator==(const Sort&, const Sort&) = default;
};

/// Sort used to encode values of a domain.
Sort sort_of(const Domain& d);
std::string sort_text(const Sort& s);

enum class Op : std::uint8_t {
  Const,
  Sym,
  Not,
  And,
  Or,
  Implies,
  Ite,
  Eq,
  BvAdd,
  BvSub,
  BvMul,
  BvSdiv,
  BvUdiv,
  BvSrem,
  BvUrem,
  BvNeg,
  BvSlt,
  BvSle,
  BvUlt,
  BvUle,
  SignExt,
  ZeroExt,
  Extract,
  FpAdd,
  FpSub,
  FpMul,
  FpDiv,
  FpNeg,
  FpAbs,
  FpLt,
  FpLeq,
  FpEq,
  FpIsNaN,
  ToFpSigned,
  ToFpUnsigned,
  ToSbv,
  ToUbv,
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  Op op = Op::Const;
  Sort sort;
  std::uint64_t bits = 0;  // Const: bool 0/1, bv masked, fp IEEE pattern
  std::string name;        // Sym
  int param = 0;           // extension amount, extract high bit, conversion width
  std::vector<TermPtr> args;

  [[nodiscard]] bool is_const() const noexcept { return op == Op::Const; }
  [[nodiscard]] bool is_true() const noexcept { return op == Op::Const && sort.kind == Sort::Kind::Bool && bits != 0; }
  [[nodiscard]] bool is_false() const noexcept { return op == Op::Const && sort.kind == Sort::Kind::Bool && bits == 0; }
};

// Constructors. Each folds when its operands are constant.
TermPtr mk_bool(bool b);
TermPtr mk_bv(std::uint64_t bits, int width);
TermPtr mk_fp(std::uint64_t bits);
TermPtr mk_const(const Value& v, const Domain& d);
TermPtr mk_sym(std::string name, Sort sort);
TermPtr mk_not(TermPtr a);
TermPtr mk_and(std::vector<TermPtr> args);
TermPtr mk_or(std::vector<TermPtr> args);
TermPtr mk_implies(TermPtr a, TermPtr b);
TermPtr mk_ite(TermPtr c, TermPtr t, TermPtr e);
TermPtr mk_eq(TermPtr a, TermPtr b);
TermPtr mk_app(Op op, std::vector<TermPtr> args, int param = 0);

/// Read a constant term back as a value of `d`.
Value const_value(const Term& t, const Domain& d);

/// Concrete evaluation with SMT semantics. `lookup` supplies symbol values as
/// constant terms; returns nullopt when a symbol is unknown.
using SymbolLookup = std::map<std::string, TermPtr, std::less<>>;
std::optional<TermPtr> fold(const TermPtr& t, const SymbolLookup& symbols);

/// Symbols a term reads directly, in first-occurrence order.
std::vector<std::string> free_symbols(const TermPtr& t);

/// SMT-LIB rendering. Constants are bit patterns; floats use RNE for every
/// rounding operation.
std::string to_smtlib(const TermPtr& t);
std::string bv_literal(std::uint64_t bits, int width);
std::string fp_literal(std::uint64_t bits);

/// A symbol introduced during an analysis: declared (inputs, outputs) or
/// defined as an abbreviation of a term.
struct Symbol {
  std::string name;
  Sort sort;
  TermPtr definition;  // null for declared symbols
};

/// Symbols in creation order, which is also a valid definition order.
class SymbolTable {
 public:
  TermPtr declare(const std::string& name, Sort sort);
  TermPtr define(const std::string& prefix, TermPtr definition);

  [[nodiscard]] const Symbol* find(std::string_view name) const;
  [[nodiscard]] const std::vector<Symbol>& symbols() const noexcept { return symbols_; }

  /// Every symbol the given terms depend on through definitions, in table order.
  [[nodiscard]] std::vector<const Symbol*> closure(const std::vector<TermPtr>& roots) const;

 private:
  std::vector<Symbol> symbols_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t next_def_ = 1;
};

}  // namespace clear::smt
