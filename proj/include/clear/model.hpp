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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace clear {

using Json = nlohmann::json;

/// Mask with the low `width` bits set; width in [1, 64].
constexpr std::uint64_t low_mask(int width) noexcept {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

/// Two's complement reading of the low `width` bits.
constexpr std::int64_t sign_extend(std::uint64_t bits, int width) noexcept {
  bits &= low_mask(width);
  if (width < 64 && (bits >> (width - 1)) != 0) bits |= ~low_mask(width);
  return static_cast<std::int64_t>(bits);
}

/// A concrete value. Everything is stored as a raw bit pattern so equality is
/// bit-exact: integers are two's complement masked to their width, floats are
/// IEEE-754 binary64 patterns (-0.0 != +0.0, NaN payloads distinguish), enums
/// are member codes.
class Value {
 public:
  enum class Kind : std::uint8_t { Bool, Int, Float64, Enum };

  Value() = default;

  static Value boolean(bool b) { return {Kind::Bool, b ? 1u : 0u}; }
  static Value int_bits(std::uint64_t bits, int width) { return {Kind::Int, bits & low_mask(width)}; }
  static Value float64(double d);
  static Value float_bits(std::uint64_t bits) { return {Kind::Float64, bits}; }
  static Value enum_code(std::uint32_t code) { return {Kind::Enum, code}; }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::uint64_t bits() const noexcept { return bits_; }
  [[nodiscard]] bool as_bool() const noexcept { return bits_ != 0; }
  [[nodiscard]] double as_double() const noexcept;
  [[nodiscard]] std::int64_t as_signed(int width) const noexcept { return sign_extend(bits_, width); }
  [[nodiscard]] std::uint32_t as_enum() const noexcept { return static_cast<std::uint32_t>(bits_); }

  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value&, const Value&) = default;

 private:
  Value(Kind k, std::uint64_t b) : kind_(k), bits_(b) {}

  Kind kind_ = Kind::Bool;
  std::uint64_t bits_ = 0;
};

class Domain {
 public:
  enum class Kind : std::uint8_t { Bool, Int, Float64, Enum };

  Domain() = default;

  static Domain boolean() { return Domain(Kind::Bool); }
  static Domain integer(int width, bool is_signed);
  static Domain float64() { return Domain(Kind::Float64); }
  static Domain enumeration(std::string name, std::vector<std::string> members);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_bool() const noexcept { return kind_ == Kind::Bool; }
  [[nodiscard]] bool is_int() const noexcept { return kind_ == Kind::Int; }
  [[nodiscard]] bool is_float() const noexcept { return kind_ == Kind::Float64; }
  [[nodiscard]] bool is_enum() const noexcept { return kind_ == Kind::Enum; }
  [[nodiscard]] bool ordered() const noexcept { return is_int() || is_float(); }

  /// Bit width of the SMT encoding: Int width, minimal code width for enums.
  [[nodiscard]] int width() const noexcept;
  [[nodiscard]] bool is_signed() const noexcept { return signed_; }
  [[nodiscard]] const std::string& enum_name() const noexcept { return enum_name_; }
  [[nodiscard]] const std::vector<std::string>& members() const noexcept { return members_; }
  [[nodiscard]] std::optional<std::uint32_t> member_code(std::string_view name) const;

  [[nodiscard]] Value::Kind value_kind() const noexcept;
  [[nodiscard]] bool contains(const Value& v) const noexcept;

  /// Number of values, when it fits in 64 bits; nullopt for floats and 64-bit ints.
  [[nodiscard]] std::optional<std::uint64_t> cardinality() const noexcept;
  /// The i-th value in enumeration order (ints ascending numerically).
  [[nodiscard]] Value nth(std::uint64_t i) const;

  /// Signed/unsigned numeric order for ints, IEEE order for floats (NaN unordered).
  [[nodiscard]] std::partial_ordering compare(const Value& a, const Value& b) const;

  /// Canonical textual type: bool, int<8>, uint<3>, float64, or the enum name.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  explicit Domain(Kind k) : kind_(k) {}

  Kind kind_ = Kind::Bool;
  int int_width_ = 0;
  bool signed_ = false;
  std::string enum_name_;
  std::vector<std::string> members_;
};

/// Minimal code width for an enum with n members (at least one bit).
int enum_code_width(std::size_t n) noexcept;

enum class VarClass : std::uint8_t { Environment, State, Decision };

std::string_view var_class_name(VarClass c) noexcept;

/// Which slice of a state a restriction selects.
enum class Projection : std::uint8_t { Environment, State, Inputs, Decision, All };

bool in_projection(VarClass c, Projection p) noexcept;

struct VarDecl {
  std::string name;
  VarClass var_class = VarClass::Environment;
  Domain domain;
};

/// Ordered variable declarations of one decision program. Declaration order
/// is the canonical order for serialization and SMT emission.
class VarCatalog {
 public:
  VarCatalog() = default;
  /// Validates names, enum member lists, and the presence of a decision variable.
  explicit VarCatalog(std::vector<VarDecl> decls);

  [[nodiscard]] const std::vector<VarDecl>& decls() const noexcept { return decls_; }
  [[nodiscard]] std::size_t size() const noexcept { return decls_.size(); }
  [[nodiscard]] const VarDecl* find(std::string_view name) const;
  /// Throws UnknownVariable.
  [[nodiscard]] const VarDecl& at(std::string_view name) const;
  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;
  [[nodiscard]] std::vector<const VarDecl*> select(Projection p) const;

  friend bool operator==(const VarCatalog& a, const VarCatalog& b);

 private:
  std::vector<VarDecl> decls_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// A valuation of some catalog variables, keyed by name.
class ConcreteState {
 public:
  ConcreteState() = default;

  void set(const std::string& name, Value v) { values_[name] = v; }
  [[nodiscard]] bool contains(std::string_view name) const { return find(name) != nullptr; }
  [[nodiscard]] const Value* find(std::string_view name) const;
  /// Throws MissingVariable.
  [[nodiscard]] const Value& at(std::string_view name) const;
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

  [[nodiscard]] auto begin() const { return values_.begin(); }
  [[nodiscard]] auto end() const { return values_.end(); }

  friend bool operator==(const ConcreteState&, const ConcreteState&) = default;

 private:
  std::map<std::string, Value, std::less<>> values_;
};

/// Project a state onto one variable class. Throws MissingVariable when the
/// state lacks a variable of the requested class.
ConcreteState restrict(const VarCatalog& catalog, const ConcreteState& state, Projection p);

/// Check that `state` covers exactly the projection and every value lies in
/// its domain. Throws UnknownVariable, MissingVariable, or DomainViolation.
void check_state(const VarCatalog& catalog, const ConcreteState& state, Projection p);

// JSON encodings shared by logs, queries, witnesses, and sessions.
Json value_to_json(const Value& v, const Domain& d);
/// Throws DomainViolation when the document does not denote a value of `d`.
Value value_from_json(const Json& j, const Domain& d);
Json state_to_json(const VarCatalog& catalog, const ConcreteState& s);
ConcreteState state_from_json(const VarCatalog& catalog, const Json& j);
std::string format_value(const Value& v, const Domain& d);

/// Parse a textual type such as "int<8>", "uint<2>", "bool", "float64".
/// Enum types are resolved by the caller.
std::optional<Domain> parse_scalar_type(std::string_view text);

Json catalog_to_json(const VarCatalog& catalog);
VarCatalog catalog_from_json(const Json& j);

}  // namespace clear
