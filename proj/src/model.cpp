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

#include "clear/model.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "clear/error.hpp"

namespace clear {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::UnknownVariable: return "UnknownVariable";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::NonMonotonicStep: return "NonMonotonicStep";
    case Errc::MissingVariable: return "MissingVariable";
    case Errc::StepOutOfRange: return "StepOutOfRange";
    case Errc::MalformedLog: return "MalformedLog";
    case Errc::InvalidCatalog: return "InvalidCatalog";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::TypeError: return "TypeError";
    case Errc::EnvWriteError: return "EnvWriteError";
    case Errc::UnboundedLoopError: return "UnboundedLoopError";
    case Errc::BudgetExhausted: return "BudgetExhausted";
    case Errc::LoopBoundExceeded: return "LoopBoundExceeded";
    case Errc::ArithmeticFault: return "ArithmeticFault";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::NotARelaxation: return "NotARelaxation";
    case Errc::WrongClass: return "WrongClass";
    case Errc::FactualOutsideRelaxation: return "FactualOutsideRelaxation";
    case Errc::NotTight: return "NotTight";
    case Errc::KeyframeMismatch: return "KeyframeMismatch";
    case Errc::InvalidQuery: return "InvalidQuery";
    case Errc::UnsupportedOperation: return "UnsupportedOperation";
    case Errc::SolverUnavailable: return "SolverUnavailable";
    case Errc::SolverCrash: return "SolverCrash";
    case Errc::DomainTooLarge: return "DomainTooLarge";
    case Errc::WitnessReplayFailed: return "WitnessReplayFailed";
    case Errc::NoWitness: return "NoWitness";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::CorruptFile: return "CorruptFile";
    case Errc::UnknownId: return "UnknownId";
    case Errc::Busy: return "Busy";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Value Value::float64(double d) { return float_bits(std::bit_cast<std::uint64_t>(d)); }

double Value::as_double() const noexcept { return std::bit_cast<double>(bits_); }

int enum_code_width(std::size_t n) noexcept {
  int w = 1;
  while ((std::size_t{1} << w) < n) ++w;
  return w;
}

Domain Domain::integer(int width, bool is_signed) {
  if (width < 1 || width > 64) throw Error(Errc::InvalidCatalog, "integer width must be in [1, 64]");
  Domain d(Kind::Int);
  d.int_width_ = width;
  d.signed_ = is_signed;
  return d;
}

Domain Domain::enumeration(std::string name, std::vector<std::string> members) {
  if (members.empty()) throw Error(Errc::InvalidCatalog, "enum " + name + " has no members");
  std::set<std::string> seen;
  for (const auto& m : members) {
    if (!seen.insert(m).second) throw Error(Errc::InvalidCatalog, "enum " + name + " repeats member " + m);
  }
  Domain d(Kind::Enum);
  d.enum_name_ = std::move(name);
  d.members_ = std::move(members);
  return d;
}

int Domain::width() const noexcept {
  switch (kind_) {
    case Kind::Bool: return 1;
    case Kind::Int: return int_width_;
    case Kind::Float64: return 64;
    case Kind::Enum: return enum_code_width(members_.size());
  }
  return 0;
}

std::optional<std::uint32_t> Domain::member_code(std::string_view name) const {
  auto it = std::find(members_.begin(), members_.end(), name);
  if (it == members_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - members_.begin());
}

Value::Kind Domain::value_kind() const noexcept {
  switch (kind_) {
    case Kind::Bool: return Value::Kind::Bool;
    case Kind::Int: return Value::Kind::Int;
    case Kind::Float64: return Value::Kind::Float64;
    case Kind::Enum: return Value::Kind::Enum;
  }
  return Value::Kind::Bool;
}

bool Domain::contains(const Value& v) const noexcept {
  if (v.kind() != value_kind()) return false;
  switch (kind_) {
    case Kind::Bool: return v.bits() <= 1;
    case Kind::Int: return (v.bits() & ~low_mask(int_width_)) == 0;
    case Kind::Float64: return true;
    case Kind::Enum: return v.bits() < members_.size();
  }
  return false;
}

std::optional<std::uint64_t> Domain::cardinality() const noexcept {
  switch (kind_) {
    case Kind::Bool: return 2;
    case Kind::Int:
      if (int_width_ >= 64) return std::nullopt;
      return std::uint64_t{1} << int_width_;
    case Kind::Float64: return std::nullopt;
    case Kind::Enum: return members_.size();
  }
  return std::nullopt;
}

Value Domain::nth(std::uint64_t i) const {
  switch (kind_) {
    case Kind::Bool: return Value::boolean(i != 0);
    case Kind::Int:
      if (signed_) {
        // ascending from the most negative value
        std::uint64_t min_bits = std::uint64_t{1} << (int_width_ - 1);
        return Value::int_bits(min_bits + i, int_width_);
      }
      return Value::int_bits(i, int_width_);
    case Kind::Enum: return Value::enum_code(static_cast<std::uint32_t>(i));
    case Kind::Float64: break;
  }
  throw Error(Errc::DomainTooLarge, "float64 domain is not enumerable");
}

std::partial_ordering Domain::compare(const Value& a, const Value& b) const {
  switch (kind_) {
    case Kind::Int:
      if (signed_) return a.as_signed(int_width_) <=> b.as_signed(int_width_);
      return a.bits() <=> b.bits();
    case Kind::Float64: return a.as_double() <=> b.as_double();
    case Kind::Bool:
    case Kind::Enum: return a.bits() <=> b.bits();
  }
  return std::partial_ordering::unordered;
}

std::string Domain::to_string() const {
  switch (kind_) {
    case Kind::Bool: return "bool";
    case Kind::Int: return (signed_ ? "int<" : "uint<") + std::to_string(int_width_) + ">";
    case Kind::Float64: return "float64";
    case Kind::Enum: return enum_name_;
  }
  return "?";
}

std::string_view var_class_name(VarClass c) noexcept {
  switch (c) {
    case VarClass::Environment: return "env";
    case VarClass::State: return "state";
    case VarClass::Decision: return "decision";
  }
  return "?";
}

bool in_projection(VarClass c, Projection p) noexcept {
  switch (p) {
    case Projection::Environment: return c == VarClass::Environment;
    case Projection::State: return c == VarClass::State;
    case Projection::Inputs: return c != VarClass::Decision;
    case Projection::Decision: return c == VarClass::Decision;
    case Projection::All: return true;
  }
  return false;
}

VarCatalog::VarCatalog(std::vector<VarDecl> decls) : decls_(std::move(decls)) {
  bool has_decision = false;
  for (std::size_t i = 0; i < decls_.size(); ++i) {
    const auto& d = decls_[i];
    if (d.name.empty()) throw Error(Errc::InvalidCatalog, "empty variable name");
    if (!index_.emplace(d.name, i).second) throw Error(Errc::InvalidCatalog, "duplicate variable " + d.name);
    has_decision = has_decision || d.var_class == VarClass::Decision;
  }
  if (!has_decision) throw Error(Errc::InvalidCatalog, "catalog declares no decision variable");
}

const VarDecl* VarCatalog::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &decls_[it->second];
}

const VarDecl& VarCatalog::at(std::string_view name) const {
  if (const auto* d = find(name)) return *d;
  throw Error(Errc::UnknownVariable, "variable '" + std::string(name) + "' is not in the catalog");
}

std::optional<std::size_t> VarCatalog::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<const VarDecl*> VarCatalog::select(Projection p) const {
  std::vector<const VarDecl*> out;
  for (const auto& d : decls_) {
    if (in_projection(d.var_class, p)) out.push_back(&d);
  }
  return out;
}

bool operator==(const VarCatalog& a, const VarCatalog& b) {
  if (a.decls_.size() != b.decls_.size()) return false;
  for (std::size_t i = 0; i < a.decls_.size(); ++i) {
    const auto& x = a.decls_[i];
    const auto& y = b.decls_[i];
    if (x.name != y.name || x.var_class != y.var_class || !(x.domain == y.domain)) return false;
  }
  return true;
}

const Value* ConcreteState::find(std::string_view name) const {
  auto it = values_.find(name);
  return it == values_.end() ? nullptr : &it->second;
}

const Value& ConcreteState::at(std::string_view name) const {
  if (const auto* v = find(name)) return *v;
  throw Error(Errc::MissingVariable, "state has no value for '" + std::string(name) + "'");
}

ConcreteState restrict(const VarCatalog& catalog, const ConcreteState& state, Projection p) {
  ConcreteState out;
  for (const auto* d : catalog.select(p)) out.set(d->name, state.at(d->name));
  return out;
}

void check_state(const VarCatalog& catalog, const ConcreteState& state, Projection p) {
  for (const auto& [name, value] : state) {
    const auto& decl = catalog.at(name);
    if (!in_projection(decl.var_class, p)) {
      throw Error(Errc::WrongClass, "variable '" + name + "' is outside the expected projection");
    }
    if (!decl.domain.contains(value)) {
      throw Error(Errc::DomainViolation, "value for '" + name + "' lies outside " + decl.domain.to_string());
    }
  }
  for (const auto* d : catalog.select(p)) {
    if (!state.contains(d->name)) throw Error(Errc::MissingVariable, "state has no value for '" + d->name + "'");
  }
}

namespace {

std::string hex16(std::uint64_t bits) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
  return buf;
}

std::string decimal(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_value(const Json& j, const Domain& d) {
  throw Error(Errc::DomainViolation, "'" + j.dump() + "' is not a value of " + d.to_string());
}

Value float_from_json(const Json& j, const Domain& d) {
  if (j.is_number()) return Value::float64(j.get<double>());
  if (j.is_object()) {
    if (auto it = j.find("bits"); it != j.end()) {
      if (!it->is_string() || it->get<std::string>().size() != 16) bad_value(j, d);
      const auto s = it->get<std::string>();
      std::uint64_t bits = 0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), bits, 16);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) bad_value(j, d);
      return Value::float_bits(bits);
    }
    if (auto it = j.find("dec"); it != j.end()) return float_from_json(*it, d);
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return Value::float64(std::numeric_limits<double>::quiet_NaN());
    if (s == "inf") return Value::float64(std::numeric_limits<double>::infinity());
    if (s == "-inf") return Value::float64(-std::numeric_limits<double>::infinity());
  }
  bad_value(j, d);
}

}  // namespace

Json value_to_json(const Value& v, const Domain& d) {
  switch (d.kind()) {
    case Domain::Kind::Bool: return v.as_bool();
    case Domain::Kind::Int:
      if (d.is_signed()) return v.as_signed(d.width());
      return v.bits();
    case Domain::Kind::Float64: {
      const double x = v.as_double();
      Json dec = std::isfinite(x) ? Json(x) : Json(decimal(x));
      return Json{{"dec", dec}, {"bits", hex16(v.bits())}};
    }
    case Domain::Kind::Enum:
      if (v.as_enum() < d.members().size()) return d.members()[v.as_enum()];
      return v.bits();
  }
  return nullptr;
}

Value value_from_json(const Json& j, const Domain& d) {
  switch (d.kind()) {
    case Domain::Kind::Bool:
      if (!j.is_boolean()) bad_value(j, d);
      return Value::boolean(j.get<bool>());
    case Domain::Kind::Int: {
      const int w = d.width();
      if (j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        const auto u = j.get<std::uint64_t>();
        const bool fits = d.is_signed() ? (w == 64 ? u <= static_cast<std::uint64_t>(INT64_MAX)
                                                   : u < (std::uint64_t{1} << (w - 1)))
                                        : (u & ~low_mask(w)) == 0;
        if (!fits) bad_value(j, d);
        return Value::int_bits(u, w);
      }
      if (j.is_number_integer()) {
        const auto s = j.get<std::int64_t>();
        if (!d.is_signed()) bad_value(j, d);
        if (w < 64 && (s < -(std::int64_t{1} << (w - 1)) || s >= (std::int64_t{1} << (w - 1)))) bad_value(j, d);
        return Value::int_bits(static_cast<std::uint64_t>(s), w);
      }
      bad_value(j, d);
    }
    case Domain::Kind::Float64: return float_from_json(j, d);
    case Domain::Kind::Enum:
      if (j.is_string()) {
        if (auto code = d.member_code(j.get<std::string>())) return Value::enum_code(*code);
      } else if (j.is_number_integer() && j.get<std::int64_t>() >= 0 && j.get<std::uint64_t>() < d.members().size()) {
        return Value::enum_code(static_cast<std::uint32_t>(j.get<std::uint64_t>()));
      }
      bad_value(j, d);
  }
  bad_value(j, d);
}

Json state_to_json(const VarCatalog& catalog, const ConcreteState& s) {
  Json out = Json::object();
  for (const auto& d : catalog.decls()) {
    if (const auto* v = s.find(d.name)) out[d.name] = value_to_json(*v, d.domain);
  }
  return out;
}

ConcreteState state_from_json(const VarCatalog& catalog, const Json& j) {
  if (!j.is_object()) throw Error(Errc::MalformedLog, "state must be a JSON object");
  ConcreteState s;
  for (const auto& [name, value] : j.items()) {
    const auto& decl = catalog.at(name);
    s.set(name, value_from_json(value, decl.domain));
  }
  return s;
}

std::string format_value(const Value& v, const Domain& d) {
  switch (d.kind()) {
    case Domain::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Domain::Kind::Int:
      return d.is_signed() ? std::to_string(v.as_signed(d.width())) : std::to_string(v.bits());
    case Domain::Kind::Float64: return decimal(v.as_double());
    case Domain::Kind::Enum:
      return v.as_enum() < d.members().size() ? d.members()[v.as_enum()] : "#" + std::to_string(v.bits());
  }
  return "?";
}

std::optional<Domain> parse_scalar_type(std::string_view text) {
  if (text == "bool") return Domain::boolean();
  if (text == "float64") return Domain::float64();
  bool is_signed = false;
  std::string_view rest;
  if (text.starts_with("int<")) {
    is_signed = true;
    rest = text.substr(4);
  } else if (text.starts_with("uint<")) {
    rest = text.substr(5);
  } else {
    return std::nullopt;
  }
  if (rest.empty() || rest.back() != '>') return std::nullopt;
  rest.remove_suffix(1);
  int width = 0;
  auto res = std::from_chars(rest.data(), rest.data() + rest.size(), width);
  if (res.ec != std::errc{} || res.ptr != rest.data() + rest.size() || width < 1 || width > 64) return std::nullopt;
  return Domain::integer(width, is_signed);
}

Json catalog_to_json(const VarCatalog& catalog) {
  Json vars = Json::array();
  for (const auto& d : catalog.decls()) {
    Json type = d.domain.is_enum() ? Json{{"enum", d.domain.enum_name()}, {"members", d.domain.members()}}
                                   : Json(d.domain.to_string());
    vars.push_back({{"name", d.name}, {"class", std::string(var_class_name(d.var_class))}, {"type", type}});
  }
  return Json{{"vars", vars}};
}

VarCatalog catalog_from_json(const Json& j) {
  try {
    std::vector<VarDecl> decls;
    for (const auto& v : j.at("vars")) {
      VarDecl d;
      d.name = v.at("name").get<std::string>();
      const auto cls = v.at("class").get<std::string>();
      if (cls == "env") d.var_class = VarClass::Environment;
      else if (cls == "state") d.var_class = VarClass::State;
      else if (cls == "decision") d.var_class = VarClass::Decision;
      else throw Error(Errc::InvalidCatalog, "unknown variable class '" + cls + "'");
      const auto& type = v.at("type");
      if (type.is_object()) {
        d.domain = Domain::enumeration(type.at("enum").get<std::string>(),
                                       type.at("members").get<std::vector<std::string>>());
      } else {
        auto dom = parse_scalar_type(type.get<std::string>());
        if (!dom) throw Error(Errc::InvalidCatalog, "unknown type '" + type.get<std::string>() + "'");
        d.domain = *dom;
      }
      decls.push_back(std::move(d));
    }
    return VarCatalog(std::move(decls));
  } catch (const Json::exception& e) {
    throw Error(Errc::InvalidCatalog, e.what());
  }
}

}  // namespace clear
