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

#include <string>
#include <vector>

#include "clear/declang.hpp"
#include "clear/model.hpp"
#include "clear/trace.hpp"

namespace clear {

enum class AtomKind : std::uint8_t { Eq, Range, Member, Free, Raw };

std::string_view atom_kind_name(AtomKind k) noexcept;

/// A constraint on a single input variable.
///
/// Eq and Member compare bit patterns, so on floats -0.0 and +0.0 are
/// different values. Range uses the domain's numeric order. Raw is an
/// unstable escape hatch: any boolean expression that reads only `var`.
struct AtomicConstraint {
  std::string var;
  AtomKind kind = AtomKind::Free;
  Value value;                 // Eq
  Value lo;                    // Range
  Value hi;                    // Range
  bool lo_open = false;        // Range
  bool hi_open = false;        // Range
  std::vector<Value> members;  // Member
  declang::ExprPtr raw;        // Raw
  std::string raw_text;        // Raw

  static AtomicConstraint eq(std::string var, Value v);
  static AtomicConstraint range(std::string var, Value lo, Value hi, bool lo_open = false, bool hi_open = false);
  static AtomicConstraint member(std::string var, std::vector<Value> values);
  static AtomicConstraint free(std::string var);
};

bool operator==(const AtomicConstraint& a, const AtomicConstraint& b);

/// One atom per environment and state variable, in catalog order.
class Relaxation {
 public:
  Relaxation() = default;

  [[nodiscard]] const std::vector<AtomicConstraint>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] const AtomicConstraint* find(std::string_view var) const;
  [[nodiscard]] bool tight() const;

  friend bool operator==(const Relaxation&, const Relaxation&) = default;

 private:
  friend Relaxation mk_relaxation(const VarCatalog&, std::vector<AtomicConstraint>);
  std::vector<AtomicConstraint> atoms_;
};

/// Throws NotARelaxation (repeated, missing, or multi-variable atoms),
/// WrongClass (atom on a decision variable), UnknownVariable,
/// DomainViolation, or InvalidQuery (malformed range or empty member set).
Relaxation mk_relaxation(const VarCatalog& catalog, std::vector<AtomicConstraint> atoms);

/// A relaxation with the factual input state removed.
struct PuncturedRelaxation {
  Relaxation base;
  ConcreteState puncture;  // over I

  friend bool operator==(const PuncturedRelaxation&, const PuncturedRelaxation&) = default;
};

/// Throws FactualOutsideRelaxation when the factual inputs violate `base`.
PuncturedRelaxation puncture(const VarCatalog& catalog, const Relaxation& base, const ConcreteState& factual_inputs);

struct Behavior {
  std::string text;
  declang::ExprPtr expr;
};

/// Parse a behavior over decision variables. Throws WrongClass when it reads
/// an input variable.
Behavior make_behavior(const declang::Program& program, std::string_view text);

bool eval_atom(const VarCatalog& catalog, const AtomicConstraint& atom, const ConcreteState& state);
bool eval_formula(const VarCatalog& catalog, const Relaxation& r, const ConcreteState& state);
bool eval_formula(const VarCatalog& catalog, const PuncturedRelaxation& p, const ConcreteState& state);
bool eval_formula(const VarCatalog& catalog, const Behavior& b, const ConcreteState& state);

/// Checks that every atom is Eq and agrees with the logged state at `t`.
/// Throws NotTight, KeyframeMismatch, or StepOutOfRange.
void validate_factual_scenario(const VarCatalog& catalog, const Relaxation& r, const Trace& trace, std::size_t t);

/// The all-Eq relaxation pinning every input to its value in `inputs`.
Relaxation tight_relaxation(const VarCatalog& catalog, const ConcreteState& inputs);

Json atom_to_json(const VarCatalog& catalog, const AtomicConstraint& atom);
AtomicConstraint atom_from_json(const declang::Program& program, const std::string& var, const Json& j);
Json relaxation_to_json(const VarCatalog& catalog, const Relaxation& r);
Relaxation relaxation_from_json(const declang::Program& program, const Json& j);

std::string describe(const VarCatalog& catalog, const AtomicConstraint& atom);
std::string describe(const VarCatalog& catalog, const Relaxation& r);

}  // namespace clear
