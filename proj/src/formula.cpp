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

#include "clear/formula.hpp"

#include <algorithm>
#include <set>

#include "clear/error.hpp"

namespace clear {

std::string_view atom_kind_name(AtomKind k) noexcept {
  switch (k) {
    case AtomKind::Eq: return "eq";
    case AtomKind::Range: return "range";
    case AtomKind::Member: return "in";
    case AtomKind::Free: return "free";
    case AtomKind::Raw: return "raw";
  }
  return "?";
}

AtomicConstraint AtomicConstraint::eq(std::string var, Value v) {
  AtomicConstraint a;
  a.var = std::move(var);
  a.kind = AtomKind::Eq;
  a.value = v;
  return a;
}

AtomicConstraint AtomicConstraint::range(std::string var, Value lo, Value hi, bool lo_open, bool hi_open) {
  AtomicConstraint a;
  a.var = std::move(var);
  a.kind = AtomKind::Range;
  a.lo = lo;
  a.hi = hi;
  a.lo_open = lo_open;
  a.hi_open = hi_open;
  return a;
}

AtomicConstraint AtomicConstraint::member(std::string var, std::vector<Value> values) {
  AtomicConstraint a;
  a.var = std::move(var);
  a.kind = AtomKind::Member;
  a.members = std::move(values);
  return a;
}

AtomicConstraint AtomicConstraint::free(std::string var) {
  AtomicConstraint a;
  a.var = std::move(var);
  a.kind = AtomKind::Free;
  return a;
}

bool operator==(const AtomicConstraint& a, const AtomicConstraint& b) {
  if (a.var != b.var || a.kind != b.kind) return false;
  switch (a.kind) {
    case AtomKind::Eq: return a.value == b.value;
    case AtomKind::Range: return a.lo == b.lo && a.hi == b.hi && a.lo_open == b.lo_open && a.hi_open == b.hi_open;
    case AtomKind::Member: return a.members == b.members;
    case AtomKind::Free: return true;
    case AtomKind::Raw: return a.raw_text == b.raw_text;
  }
  return false;
}

const AtomicConstraint* Relaxation::find(std::string_view var) const {
  for (const auto& a : atoms_) {
    if (a.var == var) return &a;
  }
  return nullptr;
}

bool Relaxation::tight() const {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const auto& a) { return a.kind == AtomKind::Eq; });
}

namespace {

void collect_var_indices(const declang::Expr& e, std::set<std::size_t>& out) {
  if (e.kind == declang::ExprKind::Var) out.insert(e.var_index);
  for (const auto& a : e.args) collect_var_indices(*a, out);
}

void check_value(const VarDecl& d, const Value& v) {
  if (!d.domain.contains(v)) {
    throw Error(Errc::DomainViolation, "constraint value outside the domain of '" + d.name + "'");
  }
}

void validate_atom(const VarCatalog& catalog, const VarDecl& d, AtomicConstraint& a) {
  switch (a.kind) {
    case AtomKind::Eq: check_value(d, a.value); break;
    case AtomKind::Range: {
      check_value(d, a.lo);
      check_value(d, a.hi);
      if (!d.domain.ordered()) {
        throw Error(Errc::InvalidQuery, "range constraint on unordered variable '" + d.name + "'");
      }
      const auto ord = d.domain.compare(a.lo, a.hi);
      if (ord == std::partial_ordering::unordered) {
        throw Error(Errc::InvalidQuery, "range bounds of '" + d.name + "' must not be NaN");
      }
      if (ord == std::partial_ordering::greater) {
        throw Error(Errc::InvalidQuery, "range of '" + d.name + "' has lo > hi");
      }
      break;
    }
    case AtomKind::Member: {
      if (a.members.empty()) throw Error(Errc::InvalidQuery, "empty member set for '" + d.name + "'");
      std::vector<Value> unique;
      for (const auto& v : a.members) {
        check_value(d, v);
        if (std::find(unique.begin(), unique.end(), v) == unique.end()) unique.push_back(v);
      }
      a.members = std::move(unique);
      break;
    }
    case AtomKind::Free: break;
    case AtomKind::Raw: {
      if (!a.raw || !a.raw->type.is_bool()) throw Error(Errc::InvalidQuery, "raw constraint must be a boolean expression");
      std::set<std::size_t> vars;
      collect_var_indices(*a.raw, vars);
      const auto self = *catalog.index_of(d.name);
      if (vars.size() > 1 || (vars.size() == 1 && *vars.begin() != self)) {
        throw Error(Errc::NotARelaxation, "constraint '" + a.raw_text + "' must reference exactly '" + d.name + "'");
      }
      break;
    }
  }
}

std::vector<Value> env_from_state(const VarCatalog& catalog, const ConcreteState& state) {
  std::vector<Value> env(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (const auto* v = state.find(catalog.decls()[i].name)) env[i] = *v;
  }
  return env;
}

void require_vars(const VarCatalog& catalog, const declang::Expr& e, const ConcreteState& state) {
  std::set<std::size_t> vars;
  collect_var_indices(e, vars);
  for (auto i : vars) {
    const auto& name = catalog.decls()[i].name;
    if (!state.contains(name)) throw Error(Errc::MissingVariable, "state lacks variable '" + name + "'");
  }
}

}  // namespace

Relaxation mk_relaxation(const VarCatalog& catalog, std::vector<AtomicConstraint> atoms) {
  std::map<std::string, AtomicConstraint, std::less<>> by_var;
  for (auto& a : atoms) {
    const auto* d = catalog.find(a.var);
    if (d == nullptr) throw Error(Errc::UnknownVariable, "constraint on unknown variable '" + a.var + "'");
    if (d->var_class == VarClass::Decision) {
      throw Error(Errc::WrongClass, "constraint on decision variable '" + a.var + "'");
    }
    validate_atom(catalog, *d, a);
    const auto name = a.var;
    if (!by_var.emplace(name, std::move(a)).second) {
      throw Error(Errc::NotARelaxation, "variable '" + name + "' is constrained twice");
    }
  }
  Relaxation r;
  for (const auto* d : catalog.select(Projection::Inputs)) {
    auto it = by_var.find(d->name);
    if (it == by_var.end()) throw Error(Errc::NotARelaxation, "no constraint for input variable '" + d->name + "'");
    r.atoms_.push_back(std::move(it->second));
  }
  return r;
}

PuncturedRelaxation puncture(const VarCatalog& catalog, const Relaxation& base, const ConcreteState& factual_inputs) {
  check_state(catalog, factual_inputs, Projection::Inputs);
  if (!eval_formula(catalog, base, factual_inputs)) {
    throw Error(Errc::FactualOutsideRelaxation, "factual inputs do not satisfy the relaxation");
  }
  return {base, factual_inputs};
}

Behavior make_behavior(const declang::Program& program, std::string_view text) {
  return {std::string(text), declang::parse_expression(program, text, Projection::Decision)};
}

bool eval_atom(const VarCatalog& catalog, const AtomicConstraint& atom, const ConcreteState& state) {
  const auto& d = catalog.at(atom.var);
  const auto& v = state.at(atom.var);
  switch (atom.kind) {
    case AtomKind::Eq: return v == atom.value;
    case AtomKind::Range: {
      const auto lo = d.domain.compare(atom.lo, v);
      const auto hi = d.domain.compare(v, atom.hi);
      const bool lo_ok = atom.lo_open ? lo == std::partial_ordering::less : (lo == std::partial_ordering::less || lo == std::partial_ordering::equivalent);
      const bool hi_ok = atom.hi_open ? hi == std::partial_ordering::less : (hi == std::partial_ordering::less || hi == std::partial_ordering::equivalent);
      return lo_ok && hi_ok;
    }
    case AtomKind::Member: return std::find(atom.members.begin(), atom.members.end(), v) != atom.members.end();
    case AtomKind::Free: return true;
    case AtomKind::Raw: return declang::evaluate(*atom.raw, env_from_state(catalog, state)).as_bool();
  }
  return false;
}

bool eval_formula(const VarCatalog& catalog, const Relaxation& r, const ConcreteState& state) {
  bool all = true;
  for (const auto& a : r.atoms()) all = eval_atom(catalog, a, state) && all;
  return all;
}

bool eval_formula(const VarCatalog& catalog, const PuncturedRelaxation& p, const ConcreteState& state) {
  if (!eval_formula(catalog, p.base, state)) return false;
  for (const auto& [name, v] : p.puncture) {
    if (!(state.at(name) == v)) return true;
  }
  return false;
}

bool eval_formula(const VarCatalog& catalog, const Behavior& b, const ConcreteState& state) {
  require_vars(catalog, *b.expr, state);
  return declang::evaluate(*b.expr, env_from_state(catalog, state)).as_bool();
}

void validate_factual_scenario(const VarCatalog& catalog, const Relaxation& r, const Trace& trace, std::size_t t) {
  const auto& state = state_at(trace, t);
  for (const auto& a : r.atoms()) {
    if (a.kind != AtomKind::Eq) {
      throw Error(Errc::NotTight, "factual scenario has a non-equality constraint on '" + a.var + "'");
    }
  }
  for (const auto& a : r.atoms()) {
    if (!(state.at(a.var) == a.value)) {
      throw Error(Errc::KeyframeMismatch, "'" + a.var + "' is " + format_value(state.at(a.var), catalog.at(a.var).domain) +
                                              " at step " + std::to_string(t) + ", not " +
                                              format_value(a.value, catalog.at(a.var).domain));
    }
  }
}

Relaxation tight_relaxation(const VarCatalog& catalog, const ConcreteState& inputs) {
  std::vector<AtomicConstraint> atoms;
  for (const auto* d : catalog.select(Projection::Inputs)) atoms.push_back(AtomicConstraint::eq(d->name, inputs.at(d->name)));
  return mk_relaxation(catalog, std::move(atoms));
}

Json atom_to_json(const VarCatalog& catalog, const AtomicConstraint& atom) {
  const auto& d = catalog.at(atom.var).domain;
  switch (atom.kind) {
    case AtomKind::Eq: return Json{{"eq", value_to_json(atom.value, d)}};
    case AtomKind::Range: {
      Json j{{"range", Json::array({value_to_json(atom.lo, d), value_to_json(atom.hi, d)})}};
      if (atom.lo_open) j["lo_open"] = true;
      if (atom.hi_open) j["hi_open"] = true;
      return j;
    }
    case AtomKind::Member: {
      Json arr = Json::array();
      for (const auto& v : atom.members) arr.push_back(value_to_json(v, d));
      return Json{{"in", arr}};
    }
    case AtomKind::Free: return "free";
    case AtomKind::Raw: return Json{{"raw", atom.raw_text}};
  }
  return nullptr;
}

AtomicConstraint atom_from_json(const declang::Program& program, const std::string& var, const Json& j) {
  const auto& d = program.catalog.at(var).domain;
  auto bad = [&](const std::string& why) { return Error(Errc::InvalidQuery, "constraint on '" + var + "': " + why); };
  if (j.is_string()) {
    if (j.get<std::string>() == "free") return AtomicConstraint::free(var);
    throw bad("unknown constraint \"" + j.get<std::string>() + "\"");
  }
  if (!j.is_object() || j.empty()) throw bad("expected an object or \"free\"");
  if (j.contains("eq")) {
    if (j.size() != 1) throw bad("\"eq\" takes no options");
    return AtomicConstraint::eq(var, value_from_json(j["eq"], d));
  }
  if (j.contains("range")) {
    for (const auto& [k, _] : j.items()) {
      if (k != "range" && k != "lo_open" && k != "hi_open") throw bad("unexpected key '" + k + "'");
    }
    const auto& r = j["range"];
    if (!r.is_array() || r.size() != 2) throw bad("\"range\" needs [lo, hi]");
    return AtomicConstraint::range(var, value_from_json(r[0], d), value_from_json(r[1], d), j.value("lo_open", false),
                                   j.value("hi_open", false));
  }
  if (j.contains("in")) {
    if (j.size() != 1 || !j["in"].is_array()) throw bad("\"in\" needs an array");
    std::vector<Value> vals;
    for (const auto& v : j["in"]) vals.push_back(value_from_json(v, d));
    return AtomicConstraint::member(var, std::move(vals));
  }
  if (j.contains("raw")) {
    if (j.size() != 1 || !j["raw"].is_string()) throw bad("\"raw\" needs an expression string");
    AtomicConstraint a;
    a.var = var;
    a.kind = AtomKind::Raw;
    a.raw_text = j["raw"].get<std::string>();
    a.raw = declang::parse_expression(program, a.raw_text, Projection::Inputs);
    return a;
  }
  throw bad("expected one of eq, range, in, raw, free");
}

Json relaxation_to_json(const VarCatalog& catalog, const Relaxation& r) {
  Json j = Json::object();
  for (const auto& a : r.atoms()) j[a.var] = atom_to_json(catalog, a);
  return j;
}

Relaxation relaxation_from_json(const declang::Program& program, const Json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidQuery, "relaxation must be a JSON object");
  std::vector<AtomicConstraint> atoms;
  for (const auto& [var, c] : j.items()) {
    if (program.catalog.find(var) == nullptr) throw Error(Errc::UnknownVariable, "unknown variable '" + var + "'");
    atoms.push_back(atom_from_json(program, var, c));
  }
  return mk_relaxation(program.catalog, std::move(atoms));
}

std::string describe(const VarCatalog& catalog, const AtomicConstraint& atom) {
  const auto& d = catalog.at(atom.var).domain;
  switch (atom.kind) {
    case AtomKind::Eq: return atom.var + " = " + format_value(atom.value, d);
    case AtomKind::Range:
      return format_value(atom.lo, d) + (atom.lo_open ? " < " : " <= ") + atom.var + (atom.hi_open ? " < " : " <= ") +
             format_value(atom.hi, d);
    case AtomKind::Member: {
      std::string s = atom.var + " in {";
      for (std::size_t i = 0; i < atom.members.size(); ++i) {
        if (i > 0) s += ", ";
        s += format_value(atom.members[i], d);
      }
      return s + "}";
    }
    case AtomKind::Free: return atom.var + " free";
    case AtomKind::Raw: return atom.raw_text;
  }
  return "?";
}

std::string describe(const VarCatalog& catalog, const Relaxation& r) {
  std::string s;
  for (const auto& a : r.atoms()) {
    if (!s.empty()) s += " && ";
    s += describe(catalog, a);
  }
  return s;
}

}  // namespace clear
