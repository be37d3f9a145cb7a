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

// Random decision programs with small input families, for differential
// testing of the oracle against exhaustive enumeration.

#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clear/declang.hpp"
#include "clear/numeric.hpp"
#include "clear/trace.hpp"

namespace clear::test {

enum class GenType { Bool, Enum, I3, U3, I4, F64 };

struct GenVar {
  std::string name;
  GenType type;
};

struct Generated {
  std::string source;
  declang::Program program;
  Trace trace;
  ConcreteState factual;  // inputs at the keyframe
  Json constraints;       // one entry per input
  std::string behavior;
  std::uint64_t budget = declang::kDefaultMaxSteps;
  std::size_t enum_size = 3;

  [[nodiscard]] Json query(const std::string& mode, const std::string& b) const {
    Json q{{"mode", mode}, {"constraints", mode == "factual" ? Json::object() : constraints}, {"behavior", b}, {"keyframe", 0}};
    if (budget != declang::kDefaultMaxSteps) q["budget"] = budget;
    return q;
  }
};

/// Floats the generator feeds as inputs: signed zeros, a subnormal, huge and
/// infinite values, and the canonical NaN.
inline const std::vector<std::uint64_t>& float_pool() {
  static const std::vector<std::uint64_t> pool = {
      std::bit_cast<std::uint64_t>(-0.0), std::bit_cast<std::uint64_t>(0.0),   std::bit_cast<std::uint64_t>(1.5),
      std::bit_cast<std::uint64_t>(-2.25), std::bit_cast<std::uint64_t>(1e308), std::bit_cast<std::uint64_t>(std::numeric_limits<double>::infinity()),
      kCanonicalNaN,                      std::bit_cast<std::uint64_t>(5e-324)};
  return pool;
}

class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  /// Draw until the program parses and the factual run terminates normally.
  Generated next() {
    for (;;) {
      auto g = attempt();
      if (g) return std::move(*g);
    }
  }

  /// A random boolean expression over the variables of the last program.
  std::string condition() { return bool_expr(3); }

 private:
  std::mt19937_64 rng_;
  std::vector<GenVar> inputs_;
  std::vector<GenVar> decisions_;
  std::size_t enum_size_ = 3;
  bool loop_used_ = false;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <typename T>
  const T& choose(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
  }

  static std::string type_text(GenType t) {
    switch (t) {
      case GenType::Bool: return "bool";
      case GenType::Enum: return "E";
      case GenType::I3: return "int<3>";
      case GenType::U3: return "uint<3>";
      case GenType::I4: return "int<4>";
      case GenType::F64: return "float64";
    }
    return "?";
  }

  std::vector<const GenVar*> vars_of(GenType t, bool with_decisions) const {
    std::vector<const GenVar*> out;
    for (const auto& v : inputs_) {
      if (v.type == t) out.push_back(&v);
    }
    if (with_decisions) {
      for (const auto& v : decisions_) {
        if (v.type == t) out.push_back(&v);
      }
    }
    return out;
  }

  std::string int_lit(GenType t) {
    int lo = t == GenType::I3 ? -4 : t == GenType::U3 ? 0 : -8;
    int hi = t == GenType::I3 ? 3 : 7;
    const int v = pick(lo, hi);
    return v < 0 ? "(" + std::to_string(v) + ")" : std::to_string(v);
  }

  std::string float_lit() {
    static const char* const lits[] = {"0.0", "1.5", "-2.25", "0.5", "3.0", "1e308"};
    const std::string s = lits[pick(0, 5)];
    return s[0] == '-' ? "(" + s + ")" : s;
  }

  std::string int_expr(int depth) {
    const int k = depth <= 0 ? pick(0, 3) : pick(0, 7);
    switch (k) {
      case 0:
      case 1: {
        const auto vs = vars_of(GenType::I4, true);
        if (!vs.empty()) return vs[static_cast<std::size_t>(pick(0, static_cast<int>(vs.size()) - 1))]->name;
        return int_lit(GenType::I4);
      }
      case 2: return int_lit(GenType::I4);
      case 3: {
        std::vector<const GenVar*> vs = vars_of(GenType::I3, false);
        for (const auto* v : vars_of(GenType::U3, true)) vs.push_back(v);
        for (const auto* v : vars_of(GenType::F64, true)) vs.push_back(v);
        if (vs.empty()) return int_lit(GenType::I4);
        return "int<4>(" + vs[static_cast<std::size_t>(pick(0, static_cast<int>(vs.size()) - 1))]->name + ")";
      }
      default: {
        static const char* const ops[] = {"+", "-", "*", "/", "%"};
        return "(" + int_expr(depth - 1) + " " + ops[pick(0, 4)] + " " + int_expr(depth - 1) + ")";
      }
    }
  }

  std::string float_expr(int depth) {
    const int k = depth <= 0 ? pick(0, 2) : pick(0, 6);
    switch (k) {
      case 0: {
        const auto vs = vars_of(GenType::F64, true);
        if (!vs.empty()) return vs[static_cast<std::size_t>(pick(0, static_cast<int>(vs.size()) - 1))]->name;
        return float_lit();
      }
      case 1: return float_lit();
      case 2: {
        const auto vs = vars_of(GenType::I4, true);
        if (vs.empty()) return float_lit();
        return "float64(" + vs[static_cast<std::size_t>(pick(0, static_cast<int>(vs.size()) - 1))]->name + ")";
      }
      case 3: return "abs(" + float_expr(depth - 1) + ")";
      default: {
        static const char* const ops[] = {"+", "-", "*", "/"};
        return "(" + float_expr(depth - 1) + " " + ops[pick(0, 3)] + " " + float_expr(depth - 1) + ")";
      }
    }
  }

  std::string bool_expr(int depth) {
    const int k = depth <= 0 ? pick(0, 3) : pick(0, 7);
    static const char* const cmp[] = {"<", "<=", ">", ">=", "==", "!="};
    switch (k) {
      case 0: {
        const auto vs = vars_of(GenType::Bool, true);
        if (!vs.empty()) return vs[static_cast<std::size_t>(pick(0, static_cast<int>(vs.size()) - 1))]->name;
        return int_expr(0) + " < " + int_expr(0);
      }
      case 1: {
        std::vector<const GenVar*> small = vars_of(GenType::I3, false);
        for (const auto* v : vars_of(GenType::U3, true)) small.push_back(v);
        const auto en = vars_of(GenType::Enum, false);
        if (!en.empty() && (small.empty() || chance(0.5))) {
          const auto* v = en[static_cast<std::size_t>(pick(0, static_cast<int>(en.size()) - 1))];
          return v->name + (chance(0.5) ? " == " : " != ") + "M" + std::to_string(pick(0, static_cast<int>(enum_size_) - 1));
        }
        if (small.empty()) return int_expr(1) + " " + cmp[pick(0, 5)] + " " + int_expr(1);
        const auto* v = small[static_cast<std::size_t>(pick(0, static_cast<int>(small.size()) - 1))];
        return v->name + " " + cmp[pick(0, 5)] + " " + int_lit(v->type);
      }
      case 2: return int_expr(1) + " " + cmp[pick(0, 5)] + " " + int_expr(1);
      case 3: return float_expr(1) + " " + cmp[pick(0, 5)] + " " + float_expr(1);
      case 4: return "!(" + bool_expr(depth - 1) + ")";
      case 5: return "(" + bool_expr(depth - 1) + " && " + bool_expr(depth - 1) + ")";
      default: return "(" + bool_expr(depth - 1) + " || " + bool_expr(depth - 1) + ")";
    }
  }

  std::string assignment(const std::string& indent) {
    std::vector<const GenVar*> targets;
    for (const auto& d : decisions_) {
      if (d.name != "c") targets.push_back(&d);
    }
    const auto* t = targets[static_cast<std::size_t>(pick(0, static_cast<int>(targets.size()) - 1))];
    std::string rhs;
    switch (t->type) {
      case GenType::I4: rhs = int_expr(2); break;
      case GenType::Bool: rhs = bool_expr(2); break;
      case GenType::F64: rhs = float_expr(2); break;
      default: rhs = "0"; break;
    }
    return indent + t->name + " := " + rhs + ";\n";
  }

  std::string block(int depth, const std::string& indent, bool top) {
    std::string out;
    const int n = pick(1, 3);
    for (int i = 0; i < n; ++i) {
      const int k = pick(0, 19);
      if (k < 9 || depth <= 0) {
        out += assignment(indent);
      } else if (k < 16) {
        out += indent + "if (" + bool_expr(2) + ") {\n" + block(depth - 1, indent + "  ", false) + indent + "}";
        if (chance(0.6)) out += " else {\n" + block(depth - 1, indent + "  ", false) + indent + "}";
        out += "\n";
      } else if (k < 18 && top && !loop_used_) {
        loop_used_ = true;
        decisions_.push_back({"c", GenType::U3});
        std::string limit = int_lit(GenType::U3);
        const auto u3 = vars_of(GenType::U3, false);
        if (!u3.empty() && chance(0.7)) limit = u3[static_cast<std::size_t>(pick(0, static_cast<int>(u3.size()) - 1))]->name;
        out += indent + "while (c < " + limit + ") bound " + std::to_string(pick(2, 7)) + " {\n" + indent + "  c := c + 1;\n" +
               assignment(indent + "  ") + indent + "}\n";
      } else if (k == 19 && !top) {
        out += indent + "return;\n";
      } else {
        out += assignment(indent);
      }
    }
    return out;
  }

  Value random_value(GenType t) {
    switch (t) {
      case GenType::Bool: return Value::boolean(chance(0.5));
      case GenType::Enum: return Value::enum_code(static_cast<std::uint32_t>(pick(0, static_cast<int>(enum_size_) - 1)));
      case GenType::I3: return Value::int_bits(static_cast<std::uint64_t>(pick(-4, 3)), 3);
      case GenType::U3: return Value::int_bits(static_cast<std::uint64_t>(pick(0, 7)), 3);
      case GenType::I4: return Value::int_bits(static_cast<std::uint64_t>(pick(-8, 7)), 4);
      case GenType::F64: return Value::float_bits(choose(float_pool()));
    }
    return {};
  }

  std::vector<Value> all_values(const Domain& d, GenType t) {
    std::vector<Value> out;
    if (t == GenType::F64) {
      for (auto b : float_pool()) out.push_back(Value::float_bits(b));
      return out;
    }
    for (std::uint64_t i = 0; i < *d.cardinality(); ++i) out.push_back(d.nth(i));
    return out;
  }

  Json constraint(const declang::Program& p, const GenVar& v, const Value& factual) {
    const auto& d = p.catalog.at(v.name).domain;
    auto values = all_values(d, v.type);
    std::shuffle(values.begin(), values.end(), rng_);
    const int k = pick(0, 9);
    if (k == 0) return Json{{"eq", value_to_json(factual, d)}};
    if (v.type == GenType::F64 || (k < 5 && v.type != GenType::Bool)) {
      // member set containing the factual value
      Json members = Json::array({value_to_json(factual, d)});
      const int extra = pick(1, std::min<int>(3, static_cast<int>(values.size()) - 1));
      for (const auto& x : values) {
        if (static_cast<int>(members.size()) > extra) break;
        if (!(x == factual)) members.push_back(value_to_json(x, d));
      }
      return Json{{"in", members}};
    }
    if (k < 8 && (v.type == GenType::I3 || v.type == GenType::U3 || v.type == GenType::I4)) {
      const auto f = v.type == GenType::U3 ? static_cast<std::int64_t>(factual.bits()) : factual.as_signed(d.width());
      const std::int64_t lo_min = v.type == GenType::U3 ? 0 : -(std::int64_t{1} << (d.width() - 1));
      const std::int64_t hi_max = v.type == GenType::U3 ? 7 : (std::int64_t{1} << (d.width() - 1)) - 1;
      const auto lo = std::uniform_int_distribution<std::int64_t>(lo_min, f)(rng_);
      const auto hi = std::uniform_int_distribution<std::int64_t>(f, hi_max)(rng_);
      if (k == 7) return Json{{"raw", v.name + " >= " + (lo < 0 ? "(" + std::to_string(lo) + ")" : std::to_string(lo))}};
      return Json{{"range", Json::array({lo, hi})}};
    }
    return "free";
  }

  std::string behavior_text() {
    std::vector<std::string> atoms;
    for (const auto& d : decisions_) {
      switch (d.type) {
        case GenType::I4: atoms.push_back(d.name + (chance(0.5) ? " == " : " < ") + int_lit(GenType::I4)); break;
        case GenType::Bool: atoms.push_back(chance(0.5) ? d.name : "!" + d.name); break;
        case GenType::F64: atoms.push_back(d.name + (chance(0.5) ? " > " : " == ") + float_lit()); break;
        case GenType::U3: atoms.push_back(d.name + " >= " + int_lit(GenType::U3)); break;
        default: break;
      }
    }
    std::string b = atoms[static_cast<std::size_t>(pick(0, static_cast<int>(atoms.size()) - 1))];
    if (atoms.size() > 1 && chance(0.3)) b = "(" + b + (chance(0.5) ? " && " : " || ") + choose(atoms) + ")";
    return b;
  }

  std::optional<Generated> attempt() {
    inputs_.clear();
    decisions_.clear();
    loop_used_ = false;
    enum_size_ = static_cast<std::size_t>(pick(2, 3));
    const GenType kinds[] = {GenType::Bool, GenType::Enum, GenType::I3, GenType::U3, GenType::I4, GenType::F64};
    const int n_in = pick(1, 3);
    for (int i = 0; i < n_in; ++i) inputs_.push_back({"x" + std::to_string(i), kinds[pick(0, 5)]});
    const GenType dkinds[] = {GenType::I4, GenType::Bool, GenType::F64};
    const int n_dec = pick(1, 2);
    for (int i = 0; i < n_dec; ++i) decisions_.push_back({"d" + std::to_string(i), dkinds[pick(0, 2)]});

    const auto body = block(3, "", true);
    std::ostringstream src;
    bool has_enum = false;
    for (const auto& v : inputs_) has_enum = has_enum || v.type == GenType::Enum;
    if (has_enum) {
      src << "type E = enum { ";
      for (std::size_t i = 0; i < enum_size_; ++i) src << (i ? ", " : "") << "M" << i;
      src << " };\n";
    }
    for (const auto& v : inputs_) src << "env " << v.name << ": " << type_text(v.type) << ";\n";
    for (const auto& d : decisions_) {
      src << "decision " << d.name << ": " << type_text(d.type) << " = "
          << (d.type == GenType::Bool ? "false" : d.type == GenType::F64 ? "0.0" : "0") << ";\n";
    }
    src << body;

    Generated g;
    g.source = src.str();
    try {
      g.program = declang::parse_program(g.source);
    } catch (const Error&) {
      return std::nullopt;
    }
    g.enum_size = enum_size_;
    g.budget = chance(0.15) ? static_cast<std::uint64_t>(pick(3, 12)) : declang::kDefaultMaxSteps;

    for (int tries = 0; tries < 8; ++tries) {
      ConcreteState in;
      for (const auto& v : inputs_) in.set(v.name, random_value(v.type));
      try {
        const auto run = declang::interpret(g.program, in, declang::StepBudget(g.budget));
        g.factual = in;
        g.trace = Trace({run.final_state});
        break;
      } catch (const Error&) {
      }
    }
    if (g.factual.empty()) return std::nullopt;

    g.constraints = Json::object();
    for (const auto& v : inputs_) g.constraints[v.name] = constraint(g.program, v, g.factual.at(v.name));
    g.behavior = behavior_text();
    return g;
  }
};

}  // namespace clear::test
