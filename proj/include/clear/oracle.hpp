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

#include <optional>
#include <string>
#include <vector>

#include "clear/declang.hpp"
#include "clear/formula.hpp"
#include "clear/smt.hpp"
#include "clear/symexec.hpp"
#include "clear/trace.hpp"

namespace clear {

enum class QueryMode : std::uint8_t { Factual, Might, Would };
enum class Verdict : std::uint8_t { True, False, Unknown, EmptyFamily };

std::string_view query_mode_name(QueryMode m) noexcept;
std::string_view verdict_name(Verdict v) noexcept;
Verdict verdict_from_name(std::string_view s);

struct Query {
  QueryMode mode = QueryMode::Factual;
  Relaxation scenario;
  Behavior behavior;
  std::size_t keyframe = 0;
  declang::StepBudget budget{declang::kDefaultMaxSteps};
};

/// Which satisfiability formula answers a might query: the implication form
/// X && (X => b), or the shorter X && b. Both have the same models.
enum class MightForm : std::uint8_t { Implication, Conjunction };

struct OracleOptions {
  ExploreMode explore = ExploreMode::Eager;
  MightForm might_form = MightForm::Implication;
};

struct PathSummary {
  std::size_t id = 0;
  std::uint64_t steps = 0;
  bool proven_feasible = true;
};

struct Timings {
  double symbolic = 0;
  double solving = 0;
  double total = 0;
};

struct OracleResponse {
  Verdict verdict = Verdict::Unknown;
  std::optional<ConcreteState> witness;          // over I
  std::optional<ConcreteState> witness_outputs;  // decision values the solver chose
  bool witness_certified = false;
  std::size_t ct = 0;
  std::vector<PathSummary> paths;
  Timings timings;
  std::vector<std::string> transcripts;
  /// Text of each top-level solver script, in the order sent. Not serialized.
  std::vector<std::string> scripts;
};

/// Resolve any query. Throws on invalid queries and propagated execution or
/// solver failures; a solver timeout yields Unknown.
OracleResponse resolve(const declang::Program& program, const Trace& trace, const Query& query, smt::Solver& solver,
                       const OracleOptions& options = {});

OracleResponse resolve_factual(const declang::Program& program, const Trace& trace, const Query& query,
                               smt::Solver& solver, const OracleOptions& options = {});
OracleResponse resolve_would(const declang::Program& program, const Trace& trace, const Query& query,
                             smt::Solver& solver, const OracleOptions& options = {});
OracleResponse resolve_might(const declang::Program& program, const Trace& trace, const Query& query,
                             smt::Solver& solver, const OracleOptions& options = {});

/// Run the program on the witness inputs and evaluate the behavior on the
/// resulting decision state.
bool witness_replay(const declang::Program& program, const ConcreteState& witness, const Behavior& behavior,
                    declang::StepBudget budget);

/// Query documents: {"mode", "constraints", "behavior", "keyframe", "budget"?}.
/// Inputs missing from "constraints" are pinned to their keyframe values.
Query query_from_json(const declang::Program& program, const Trace& trace, const Json& j);
Json query_to_json(const declang::Program& program, const Query& q);

Json response_to_json(const VarCatalog& catalog, const OracleResponse& r);
OracleResponse response_from_json(const VarCatalog& catalog, const Json& j);

}  // namespace clear
