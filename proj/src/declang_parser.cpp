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

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "clear/declang.hpp"
#include "clear/error.hpp"

namespace clear::declang {

std::string to_string(SourceLoc loc) { return std::to_string(loc.line) + ":" + std::to_string(loc.column); }

std::string_view op_text(BinaryOp op) noexcept {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Rem: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

StepBudget::StepBudget(std::uint64_t max_steps) : max_steps_(max_steps) {
  if (max_steps == 0) throw Error(Errc::InvalidQuery, "step budget must be at least 1");
}

const Domain* Program::find_enum(std::string_view name) const {
  for (const auto& e : enums) {
    if (e.enum_name() == name) return &e;
  }
  return nullptr;
}

namespace {

// ---------------------------------------------------------------- lexing

enum class Tok : std::uint8_t { Ident, Int, Float, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

const std::set<std::string, std::less<>> kKeywords = {
    "type", "enum", "const", "env", "state", "decision", "if", "else", "while", "bound",
    "return", "true", "false", "bool", "float64", "int", "uint", "pow", "abs"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      const SourceLoc start{line, col};
      const auto close = src.find("*/", i + 2);
      if (close == std::string_view::npos) throw Error(Errc::SyntaxError, to_string(start) + ": unterminated comment");
      advance(close + 2 - i);
      continue;
    }
    Token tok;
    tok.loc = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      tok.kind = Tok::Ident;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool is_float = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.' && j + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        is_float = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_float = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      tok.kind = is_float ? Tok::Float : Tok::Int;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      static const char* const kTwo[] = {":=", "<=", ">=", "==", "!=", "&&", "||"};
      tok.kind = Tok::Punct;
      for (const char* two : kTwo) {
        if (src.substr(i, 2) == two) tok.text = two;
      }
      if (tok.text.empty()) {
        if (std::string_view("(){};:,=+-*/%<>!").find(c) == std::string_view::npos) {
          throw Error(Errc::SyntaxError, to_string(tok.loc) + ": unexpected character '" + std::string(1, c) + "'");
        }
        tok.text = std::string(1, c);
      }
      advance(tok.text.size());
    }
    out.push_back(std::move(tok));
  }
  out.push_back(Token{Tok::End, "", {line, col}});
  return out;
}

// ---------------------------------------------------------------- raw syntax

struct Raw;
using RawPtr = std::unique_ptr<Raw>;

struct Raw {
  enum class Kind : std::uint8_t { IntLit, FloatLit, BoolLit, Ident, Unary, Binary, Pow, Abs, Cast };
  Kind kind = Kind::IntLit;
  SourceLoc loc;
  std::string text;
  std::uint64_t magnitude = 0;  // IntLit
  double fvalue = 0;            // FloatLit
  bool bvalue = false;          // BoolLit
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  std::uint32_t exponent = 0;  // Pow
  Domain cast_type;            // Cast
  std::vector<RawPtr> args;
};

struct RawStmt;
using RawBlock = std::vector<std::unique_ptr<RawStmt>>;

struct RawStmt {
  StmtKind kind = StmtKind::Return;
  SourceLoc loc;
  std::string target;
  RawPtr expr;
  RawBlock then_body;
  RawBlock else_body;
  std::optional<std::uint32_t> bound;
};

struct RawVarDecl {
  VarClass cls;
  std::string name;
  std::string type_name;  // scalar spelling or enum name
  std::optional<Domain> scalar;
  RawPtr init;
  SourceLoc loc;
};

struct RawConst {
  std::string name;
  std::string type_name;
  std::optional<Domain> scalar;
  RawPtr init;
  SourceLoc loc;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  [[nodiscard]] const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  [[nodiscard]] bool at_punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
  [[nodiscard]] bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
  [[nodiscard]] bool at_end() const { return peek().kind == Tok::End; }

  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(std::string_view expected) const {
    const auto& t = peek();
    const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Error(Errc::SyntaxError, to_string(t.loc) + ": expected " + std::string(expected) + ", found " + found);
  }

  void expect_punct(std::string_view p) {
    if (!at_punct(p)) fail("'" + std::string(p) + "'");
    take();
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("'" + std::string(w) + "'");
    take();
  }
  std::string expect_ident() {
    if (peek().kind != Tok::Ident || kKeywords.contains(peek().text)) fail("identifier");
    return take().text;
  }
  std::uint64_t expect_uint() {
    if (peek().kind != Tok::Int) fail("integer literal");
    const auto& t = take();
    std::uint64_t v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc{}) throw Error(Errc::SyntaxError, to_string(t.loc) + ": integer literal out of range");
    return v;
  }

  /// `bool | float64 | int<N> | uint<N> | EnumName`. Returns the scalar
  /// domain, or nullopt with `name` set for an enum reference.
  std::optional<Domain> parse_type(std::string& name) {
    const auto loc = peek().loc;
    if (at_word("bool")) {
      take();
      name = "bool";
      return Domain::boolean();
    }
    if (at_word("float64")) {
      take();
      name = "float64";
      return Domain::float64();
    }
    if (at_word("int") || at_word("uint")) {
      const bool is_signed = take().text == "int";
      expect_punct("<");
      const auto w = expect_uint();
      expect_punct(">");
      if (w < 1 || w > 64) throw Error(Errc::TypeError, to_string(loc) + ": integer width must be in [1, 64]");
      name = (is_signed ? "int<" : "uint<") + std::to_string(w) + ">";
      return Domain::integer(static_cast<int>(w), is_signed);
    }
    name = expect_ident();
    return std::nullopt;
  }

  // expression grammar, lowest precedence first
  RawPtr parse_expr() { return parse_or(); }

  RawPtr binary(BinaryOp op, RawPtr l, RawPtr r, SourceLoc loc) {
    auto n = std::make_unique<Raw>();
    n->kind = Raw::Kind::Binary;
    n->binary = op;
    n->loc = loc;
    n->args.push_back(std::move(l));
    n->args.push_back(std::move(r));
    return n;
  }

  RawPtr parse_or() {
    auto l = parse_and();
    while (at_punct("||")) {
      const auto loc = take().loc;
      l = binary(BinaryOp::Or, std::move(l), parse_and(), loc);
    }
    return l;
  }
  RawPtr parse_and() {
    auto l = parse_equality();
    while (at_punct("&&")) {
      const auto loc = take().loc;
      l = binary(BinaryOp::And, std::move(l), parse_equality(), loc);
    }
    return l;
  }
  RawPtr parse_equality() {
    auto l = parse_relational();
    while (at_punct("==") || at_punct("!=")) {
      const auto& t = take();
      const auto op = t.text == "==" ? BinaryOp::Eq : BinaryOp::Ne;
      l = binary(op, std::move(l), parse_relational(), t.loc);
    }
    return l;
  }
  RawPtr parse_relational() {
    auto l = parse_additive();
    while (at_punct("<") || at_punct("<=") || at_punct(">") || at_punct(">=")) {
      const auto& t = take();
      const auto op = t.text == "<"    ? BinaryOp::Lt
                      : t.text == "<=" ? BinaryOp::Le
                      : t.text == ">"  ? BinaryOp::Gt
                                       : BinaryOp::Ge;
      l = binary(op, std::move(l), parse_additive(), t.loc);
    }
    return l;
  }
  RawPtr parse_additive() {
    auto l = parse_multiplicative();
    while (at_punct("+") || at_punct("-")) {
      const auto& t = take();
      l = binary(t.text == "+" ? BinaryOp::Add : BinaryOp::Sub, std::move(l), parse_multiplicative(), t.loc);
    }
    return l;
  }
  RawPtr parse_multiplicative() {
    auto l = parse_unary();
    while (at_punct("*") || at_punct("/") || at_punct("%")) {
      const auto& t = take();
      const auto op = t.text == "*" ? BinaryOp::Mul : t.text == "/" ? BinaryOp::Div : BinaryOp::Rem;
      l = binary(op, std::move(l), parse_unary(), t.loc);
    }
    return l;
  }
  RawPtr parse_unary() {
    if (at_punct("-") || at_punct("!")) {
      const auto& t = take();
      auto n = std::make_unique<Raw>();
      n->kind = Raw::Kind::Unary;
      n->unary = t.text == "-" ? UnaryOp::Neg : UnaryOp::Not;
      n->loc = t.loc;
      n->args.push_back(parse_unary());
      return n;
    }
    return parse_primary();
  }
  RawPtr parse_primary() {
    auto n = std::make_unique<Raw>();
    n->loc = peek().loc;
    if (at_punct("(")) {
      take();
      auto inner = parse_expr();
      expect_punct(")");
      return inner;
    }
    if (peek().kind == Tok::Int) {
      n->kind = Raw::Kind::IntLit;
      n->text = peek().text;
      n->magnitude = expect_uint();
      return n;
    }
    if (peek().kind == Tok::Float) {
      n->kind = Raw::Kind::FloatLit;
      n->text = take().text;
      n->fvalue = std::strtod(n->text.c_str(), nullptr);
      return n;
    }
    if (at_word("true") || at_word("false")) {
      n->kind = Raw::Kind::BoolLit;
      n->bvalue = take().text == "true";
      return n;
    }
    if (at_word("pow")) {
      take();
      expect_punct("(");
      n->kind = Raw::Kind::Pow;
      n->args.push_back(parse_expr());
      expect_punct(",");
      const auto eloc = peek().loc;
      if (peek().kind != Tok::Int) {
        throw Error(Errc::TypeError, to_string(eloc) + ": pow exponent must be a non-negative integer literal");
      }
      const auto e = expect_uint();
      if (e > 64) throw Error(Errc::TypeError, to_string(eloc) + ": pow exponent larger than 64");
      n->exponent = static_cast<std::uint32_t>(e);
      expect_punct(")");
      return n;
    }
    if (at_word("abs")) {
      take();
      expect_punct("(");
      n->kind = Raw::Kind::Abs;
      n->args.push_back(parse_expr());
      expect_punct(")");
      return n;
    }
    if (at_word("float64") || at_word("int") || at_word("uint")) {
      std::string spelled;
      n->kind = Raw::Kind::Cast;
      n->cast_type = *parse_type(spelled);
      expect_punct("(");
      n->args.push_back(parse_expr());
      expect_punct(")");
      return n;
    }
    n->kind = Raw::Kind::Ident;
    n->text = expect_ident();
    return n;
  }

  RawBlock parse_block() {
    expect_punct("{");
    RawBlock out;
    while (!at_punct("}")) {
      if (at_end()) fail("'}'");
      out.push_back(parse_stmt());
    }
    take();
    return out;
  }

  std::unique_ptr<RawStmt> parse_stmt() {
    auto s = std::make_unique<RawStmt>();
    s->loc = peek().loc;
    if (at_word("if")) {
      take();
      s->kind = StmtKind::If;
      expect_punct("(");
      s->expr = parse_expr();
      expect_punct(")");
      s->then_body = parse_block();
      if (at_word("else")) {
        take();
        if (at_word("if")) {
          s->else_body.push_back(parse_stmt());
        } else {
          s->else_body = parse_block();
        }
      }
      return s;
    }
    if (at_word("while")) {
      take();
      s->kind = StmtKind::While;
      expect_punct("(");
      s->expr = parse_expr();
      expect_punct(")");
      if (at_word("bound")) {
        take();
        const auto b = expect_uint();
        if (b > std::numeric_limits<std::uint32_t>::max()) fail("loop bound below 2^32");
        s->bound = static_cast<std::uint32_t>(b);
      } else if (!at_punct("{")) {
        fail("'bound' or '{'");
      }
      s->then_body = parse_block();
      return s;
    }
    if (at_word("return")) {
      take();
      expect_punct(";");
      s->kind = StmtKind::Return;
      return s;
    }
    s->kind = StmtKind::Assign;
    s->target = expect_ident();
    expect_punct(":=");
    s->expr = parse_expr();
    expect_punct(";");
    return s;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- typing

bool float_literal_inside(const Raw& r) {
  if (r.kind == Raw::Kind::FloatLit) return true;
  if (r.kind == Raw::Kind::Unary) return float_literal_inside(*r.args[0]);
  return false;
}

class Checker {
 public:
  Checker(const Program& program, Projection scope) : program_(program), scope_(scope) {}

  [[noreturn]] static void type_error(SourceLoc loc, const std::string& msg) {
    throw Error(Errc::TypeError, to_string(loc) + ": " + msg);
  }

  /// Literals and bare enum members take their type from context.
  [[nodiscard]] bool flexible(const Raw& r) const {
    switch (r.kind) {
      case Raw::Kind::IntLit:
      case Raw::Kind::FloatLit: return true;
      case Raw::Kind::Unary: return r.unary == UnaryOp::Neg && flexible(*r.args[0]);
      case Raw::Kind::Ident:
        return program_.catalog.find(r.text) == nullptr && !program_.constants.contains(r.text);
      default: return false;
    }
  }

  static ExprPtr literal(Value v, Domain t, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Literal;
    e->value = v;
    e->type = std::move(t);
    e->loc = loc;
    return e;
  }

  static Value int_literal(const Raw& r, bool negative, const Domain& t) {
    const int w = t.width();
    const std::uint64_t m = r.magnitude;
    bool fits = false;
    if (t.is_signed()) {
      const std::uint64_t limit = w == 64 ? (std::uint64_t{1} << 63) : (std::uint64_t{1} << (w - 1));
      fits = negative ? m <= limit : m < limit;
    } else {
      fits = negative ? m == 0 : (m & ~low_mask(w)) == 0;
    }
    if (!fits) {
      type_error(r.loc, "literal " + std::string(negative ? "-" : "") + r.text + " does not fit " + t.to_string());
    }
    return Value::int_bits(negative ? (~m + 1) : m, w);
  }

  ExprPtr check_numeric_literal(const Raw& r, bool negative, const Domain* expected) {
    if (r.kind == Raw::Kind::Unary) return check_numeric_literal(*r.args[0], !negative, expected);
    if (r.kind == Raw::Kind::FloatLit) {
      if (expected != nullptr && !expected->is_float()) {
        type_error(r.loc, "float literal " + r.text + " used where " + expected->to_string() + " is expected");
      }
      return literal(Value::float64(negative ? -r.fvalue : r.fvalue), Domain::float64(), r.loc);
    }
    // IntLit
    if (expected == nullptr) {
      const auto t = Domain::integer(64, true);
      return literal(int_literal(r, negative, t), t, r.loc);
    }
    if (expected->is_int()) return literal(int_literal(r, negative, *expected), *expected, r.loc);
    if (expected->is_float()) {
      const double d = static_cast<double>(r.magnitude);
      return literal(Value::float64(negative ? -d : d), Domain::float64(), r.loc);
    }
    type_error(r.loc, "integer literal used where " + expected->to_string() + " is expected");
  }

  ExprPtr check_ident(const Raw& r, const Domain* expected) {
    if (const auto* decl = program_.catalog.find(r.text)) {
      if (!in_projection(decl->var_class, scope_)) {
        throw Error(Errc::WrongClass, to_string(r.loc) + ": variable '" + r.text + "' (" +
                                          std::string(var_class_name(decl->var_class)) + ") is not allowed here");
      }
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Var;
      e->name = r.text;
      e->var_index = *program_.catalog.index_of(r.text);
      e->type = decl->domain;
      e->loc = r.loc;
      return e;
    }
    if (auto it = program_.constants.find(r.text); it != program_.constants.end()) {
      return literal(it->second.value, it->second.type, r.loc);
    }
    if (expected != nullptr && expected->is_enum()) {
      if (auto code = expected->member_code(r.text)) return literal(Value::enum_code(*code), *expected, r.loc);
    }
    const Domain* found = nullptr;
    for (const auto& en : program_.enums) {
      if (en.member_code(r.text)) {
        if (found != nullptr) type_error(r.loc, "enum member '" + r.text + "' is ambiguous");
        found = &en;
      }
    }
    if (found == nullptr) {
      throw Error(Errc::UnknownVariable, to_string(r.loc) + ": unknown identifier '" + r.text + "'");
    }
    return literal(Value::enum_code(*found->member_code(r.text)), *found, r.loc);
  }

  ExprPtr check(const Raw& r, const Domain* expected) {
    switch (r.kind) {
      case Raw::Kind::IntLit:
      case Raw::Kind::FloatLit: return check_numeric_literal(r, false, expected);
      case Raw::Kind::BoolLit:
        if (expected != nullptr && !expected->is_bool()) type_error(r.loc, "boolean used where " + expected->to_string() + " is expected");
        return literal(Value::boolean(r.bvalue), Domain::boolean(), r.loc);
      case Raw::Kind::Ident: return check_ident(r, expected);
      case Raw::Kind::Unary: return check_unary(r, expected);
      case Raw::Kind::Binary: return check_binary(r, expected);
      case Raw::Kind::Pow: return check_pow(r, expected);
      case Raw::Kind::Abs: {
        auto arg = check(*r.args[0], expected);
        if (!arg->type.is_int() && !arg->type.is_float()) type_error(r.loc, "abs needs a numeric operand");
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Abs;
        e->type = arg->type;
        e->loc = r.loc;
        e->args.push_back(std::move(arg));
        return e;
      }
      case Raw::Kind::Cast: {
        auto arg = check(*r.args[0], nullptr);
        if (!arg->type.is_int() && !arg->type.is_float()) type_error(r.loc, "casts apply to numeric operands only");
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Cast;
        e->type = r.cast_type;
        e->loc = r.loc;
        e->args.push_back(std::move(arg));
        return e;
      }
    }
    type_error(r.loc, "unsupported expression");
  }

  ExprPtr check_unary(const Raw& r, const Domain* expected) {
    if (r.unary == UnaryOp::Neg && flexible(*r.args[0]) && r.args[0]->kind != Raw::Kind::Ident) {
      return check_numeric_literal(r, false, expected);
    }
    auto arg = check(*r.args[0], r.unary == UnaryOp::Not ? nullptr : expected);
    if (r.unary == UnaryOp::Not && !arg->type.is_bool()) type_error(r.loc, "'!' needs a bool operand");
    if (r.unary == UnaryOp::Neg && !arg->type.is_int() && !arg->type.is_float()) {
      type_error(r.loc, "'-' needs a numeric operand");
    }
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Unary;
    e->unary = r.unary;
    e->type = arg->type;
    e->loc = r.loc;
    e->args.push_back(std::move(arg));
    return e;
  }

  ExprPtr check_pow(const Raw& r, const Domain* expected) {
    auto base = check(*r.args[0], expected);
    if (!base->type.is_int() && !base->type.is_float()) type_error(r.loc, "pow needs a numeric base");
    if (r.exponent == 0) {
      const Value one = base->type.is_float() ? Value::float64(1.0) : Value::int_bits(1, base->type.width());
      return literal(one, base->type, r.loc);
    }
    ExprPtr acc = base;
    for (std::uint32_t i = 1; i < r.exponent; ++i) {
      auto m = std::make_shared<Expr>();
      m->kind = ExprKind::Binary;
      m->binary = BinaryOp::Mul;
      m->type = base->type;
      m->loc = r.loc;
      m->args = {acc, base};
      acc = m;
    }
    return acc;
  }

  ExprPtr check_binary(const Raw& r, const Domain* expected) {
    const auto op = r.binary;
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->binary = op;
    e->loc = r.loc;

    if (op == BinaryOp::And || op == BinaryOp::Or) {
      const auto b = Domain::boolean();
      auto l = check(*r.args[0], &b);
      auto rr = check(*r.args[1], &b);
      if (!l->type.is_bool() || !rr->type.is_bool()) type_error(r.loc, "'" + std::string(op_text(op)) + "' needs bool operands");
      e->type = b;
      e->args = {l, rr};
      return e;
    }

    const bool arithmetic = op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul ||
                            op == BinaryOp::Div || op == BinaryOp::Rem;
    const Domain* hint = arithmetic ? expected : nullptr;
    std::optional<Domain> float_hint;
    if (hint == nullptr && flexible(*r.args[0]) && flexible(*r.args[1]) &&
        (float_literal_inside(*r.args[0]) || float_literal_inside(*r.args[1]))) {
      float_hint = Domain::float64();
      hint = &*float_hint;
    }
    ExprPtr l;
    ExprPtr rr;
    if (flexible(*r.args[0]) && !flexible(*r.args[1])) {
      rr = check(*r.args[1], hint);
      l = check(*r.args[0], &rr->type);
    } else {
      l = check(*r.args[0], hint);
      rr = check(*r.args[1], &l->type);
    }
    if (!(l->type == rr->type)) {
      type_error(r.loc, "operands of '" + std::string(op_text(op)) + "' have different types " + l->type.to_string() +
                            " and " + rr->type.to_string());
    }
    const auto& t = l->type;
    if (arithmetic) {
      if (!t.is_int() && !t.is_float()) type_error(r.loc, "arithmetic on " + t.to_string());
      if (op == BinaryOp::Rem && !t.is_int()) type_error(r.loc, "'%' applies to integers only");
      e->type = t;
    } else {
      const bool ordering = op == BinaryOp::Lt || op == BinaryOp::Le || op == BinaryOp::Gt || op == BinaryOp::Ge;
      if (ordering && !t.ordered()) type_error(r.loc, "ordering comparison on " + t.to_string());
      e->type = Domain::boolean();
    }
    e->args = {l, rr};
    return e;
  }

 private:
  const Program& program_;
  Projection scope_;
};

Block lower_block(const Program& program, Checker& checker, const RawBlock& raw);

StmtPtr lower_stmt(const Program& program, Checker& checker, const RawStmt& raw) {
  auto s = std::make_shared<Stmt>();
  s->kind = raw.kind;
  s->loc = raw.loc;
  const auto boolean = Domain::boolean();
  switch (raw.kind) {
    case StmtKind::Assign: {
      const auto* decl = program.catalog.find(raw.target);
      if (decl == nullptr) {
        if (program.constants.contains(raw.target)) {
          Checker::type_error(raw.loc, "cannot assign to constant '" + raw.target + "'");
        }
        throw Error(Errc::UnknownVariable, to_string(raw.loc) + ": unknown variable '" + raw.target + "'");
      }
      if (decl->var_class == VarClass::Environment) {
        throw Error(Errc::EnvWriteError,
                    to_string(raw.loc) + ": environment variable '" + raw.target + "' is read-only");
      }
      s->target = *program.catalog.index_of(raw.target);
      s->expr = checker.check(*raw.expr, &decl->domain);
      if (!(s->expr->type == decl->domain)) {
        Checker::type_error(raw.loc, "cannot assign " + s->expr->type.to_string() + " to '" + raw.target + "' of type " +
                                         decl->domain.to_string());
      }
      break;
    }
    case StmtKind::If:
    case StmtKind::While:
      s->expr = checker.check(*raw.expr, &boolean);
      if (!s->expr->type.is_bool()) Checker::type_error(raw.expr->loc, "condition must be bool");
      if (raw.kind == StmtKind::While) {
        if (!raw.bound) {
          throw Error(Errc::UnboundedLoopError, to_string(raw.loc) + ": while loop needs a 'bound N' annotation");
        }
        s->bound = *raw.bound;
      }
      s->then_body = lower_block(program, checker, raw.then_body);
      s->else_body = lower_block(program, checker, raw.else_body);
      break;
    case StmtKind::Return: break;
  }
  return s;
}

Block lower_block(const Program& program, Checker& checker, const RawBlock& raw) {
  Block out;
  out.reserve(raw.size());
  for (const auto& s : raw) out.push_back(lower_stmt(program, checker, *s));
  return out;
}

Value evaluate_constant(const Program& program, const Raw& raw, const Domain& type) {
  Checker checker(program, Projection::Decision);
  ExprPtr e;
  try {
    e = checker.check(raw, &type);
  } catch (const Error& err) {
    if (err.code() == Errc::WrongClass || err.code() == Errc::UnknownVariable) {
      Checker::type_error(raw.loc, "initializers must be constant expressions");
    }
    throw;
  }
  if (!(e->type == type)) Checker::type_error(raw.loc, "initializer has type " + e->type.to_string() + ", expected " + type.to_string());
  if (!referenced_vars(program, *e).empty()) Checker::type_error(raw.loc, "initializers must be constant expressions");
  return evaluate(*e, {});
}

}  // namespace

Program parse_program(std::string_view text) {
  Parser p(lex(text));
  Program program;
  program.source = std::string(text);

  std::vector<RawVarDecl> var_decls;
  std::vector<RawConst> consts;
  var_decls.reserve(256);
  consts.reserve(256);
  std::set<std::string, std::less<>> names;
  auto claim = [&](const std::string& name, SourceLoc loc) {
    if (!names.insert(name).second) Checker::type_error(loc, "'" + name + "' is declared twice");
  };

  while (!p.at_end()) {
    const auto loc = p.peek().loc;
    if (p.at_word("type")) {
      p.take();
      auto name = p.expect_ident();
      claim(name, loc);
      p.expect_punct("=");
      p.expect_word("enum");
      p.expect_punct("{");
      std::vector<std::string> members;
      do {
        if (!members.empty()) p.take();
        const auto mloc = p.peek().loc;
        auto m = p.expect_ident();
        claim(m, mloc);
        members.push_back(std::move(m));
      } while (p.at_punct(","));
      p.expect_punct("}");
      p.expect_punct(";");
      program.enums.push_back(Domain::enumeration(std::move(name), std::move(members)));
    } else if (p.at_word("env") || p.at_word("state") || p.at_word("decision")) {
      RawVarDecl d;
      d.loc = loc;
      const auto kw = p.take().text;
      d.cls = kw == "env" ? VarClass::Environment : kw == "state" ? VarClass::State : VarClass::Decision;
      d.name = p.expect_ident();
      claim(d.name, loc);
      p.expect_punct(":");
      d.scalar = p.parse_type(d.type_name);
      if (p.at_punct("=")) {
        p.take();
        d.init = p.parse_expr();
      }
      p.expect_punct(";");
      if (d.cls == VarClass::Decision && !d.init) {
        Checker::type_error(loc, "decision variable '" + d.name + "' needs an initial value");
      }
      if (d.cls != VarClass::Decision && d.init) {
        Checker::type_error(loc, "input variable '" + d.name + "' takes its value from the log and cannot be initialized");
      }
      var_decls.push_back(std::move(d));
    } else if (p.at_word("const")) {
      p.take();
      RawConst c;
      c.loc = loc;
      c.name = p.expect_ident();
      claim(c.name, loc);
      p.expect_punct(":");
      c.scalar = p.parse_type(c.type_name);
      p.expect_punct("=");
      c.init = p.parse_expr();
      p.expect_punct(";");
      consts.push_back(std::move(c));
    } else {
      break;
    }
  }

  auto resolve = [&](const std::optional<Domain>& scalar, const std::string& name, SourceLoc loc) -> Domain {
    if (scalar) return *scalar;
    if (const auto* e = program.find_enum(name)) return *e;
    Checker::type_error(loc, "unknown type '" + name + "'");
  };

  std::vector<VarDecl> decls;
  for (const auto& d : var_decls) decls.push_back({d.name, d.cls, resolve(d.scalar, d.type_name, d.loc)});
  try {
    program.catalog = VarCatalog(std::move(decls));
  } catch (const Error& e) {
    throw Error(Errc::TypeError, e.what());
  }

  // Constants may refer to earlier constants.
  for (const auto& c : consts) {
    const auto type = resolve(c.scalar, c.type_name, c.loc);
    const auto value = evaluate_constant(program, *c.init, type);
    program.constants.emplace(c.name, Constant{type, value});
  }

  program.initial.resize(program.catalog.size());
  for (std::size_t i = 0; i < var_decls.size(); ++i) {
    if (var_decls[i].init) {
      program.initial[i] = evaluate_constant(program, *var_decls[i].init, program.catalog.decls()[i].domain);
    }
  }

  RawBlock body;
  while (!p.at_end()) {
    if (p.at_word("type") || p.at_word("env") || p.at_word("state") || p.at_word("decision") || p.at_word("const")) {
      throw Error(Errc::SyntaxError, to_string(p.peek().loc) + ": declarations must precede statements");
    }
    body.push_back(p.parse_stmt());
  }
  Checker checker(program, Projection::All);
  program.body = lower_block(program, checker, body);
  return program;
}

ExprPtr parse_expression(const Program& program, std::string_view text, Projection scope) {
  Parser p(lex(text));
  auto raw = p.parse_expr();
  if (!p.at_end()) p.fail("end of expression");
  Checker checker(program, scope);
  const auto boolean = Domain::boolean();
  auto e = checker.check(*raw, &boolean);
  if (!e->type.is_bool()) Checker::type_error(raw->loc, "expression must be bool");
  return e;
}

namespace {

struct PathCount {
  std::size_t returned = 0;
  std::size_t fallthrough = 1;
};

PathCount count_paths(const Block& block) {
  PathCount acc;
  for (const auto& s : block) {
    PathCount here;
    switch (s->kind) {
      case StmtKind::Assign: break;
      case StmtKind::Return: here = {1, 0}; break;
      case StmtKind::If: {
        const auto t = count_paths(s->then_body);
        const auto e = count_paths(s->else_body);
        here = {t.returned + e.returned, t.fallthrough + e.fallthrough};
        break;
      }
      case StmtKind::While: here = {count_paths(s->then_body).returned, 1}; break;
    }
    acc = {acc.returned + acc.fallthrough * here.returned, acc.fallthrough * here.fallthrough};
  }
  return acc;
}

void collect_vars(const Expr& e, std::vector<bool>& seen) {
  if (e.kind == ExprKind::Var) seen[e.var_index] = true;
  for (const auto& a : e.args) collect_vars(*a, seen);
}

}  // namespace

std::size_t count_leaves(const Block& block) {
  const auto c = count_paths(block);
  return c.returned + c.fallthrough;
}

std::vector<std::string> referenced_vars(const Program& program, const Expr& expr) {
  std::vector<bool> seen(program.catalog.size(), false);
  collect_vars(expr, seen);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) out.push_back(program.catalog.decls()[i].name);
  }
  return out;
}

std::string to_source(const Program& program, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Literal: {
      auto s = format_value(e.value, e.type);
      if (e.type.is_float() && s.find_first_of(".en") == std::string::npos) s += ".0";
      return s;
    }
    case ExprKind::Var: return e.name;
    case ExprKind::Unary:
      return std::string(e.unary == UnaryOp::Neg ? "-" : "!") + "(" + to_source(program, *e.args[0]) + ")";
    case ExprKind::Binary:
      return "(" + to_source(program, *e.args[0]) + " " + std::string(op_text(e.binary)) + " " +
             to_source(program, *e.args[1]) + ")";
    case ExprKind::Cast: return e.type.to_string() + "(" + to_source(program, *e.args[0]) + ")";
    case ExprKind::Abs: return "abs(" + to_source(program, *e.args[0]) + ")";
  }
  return "?";
}

}  // namespace clear::declang
