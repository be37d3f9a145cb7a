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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clear/oracle.hpp"

namespace clear {

inline constexpr int kSessionSchemaVersion = 1;

/// What a fact is about: the factual run at a keyframe, a single
/// counterfactual witness, or a whole counterfactual family described by its
/// relaxation.
enum class BasisKind : std::uint8_t { Keyframe, Witness, Family };

std::string_view basis_kind_name(BasisKind k) noexcept;

struct Fact {
  std::size_t id = 0;
  std::size_t query_id = 0;
  BasisKind basis = BasisKind::Keyframe;
  std::size_t keyframe = 0;
  std::optional<ConcreteState> witness;  // Witness facts
  Relaxation family;                     // the query's scenario
  QueryMode mode = QueryMode::Factual;
  bool negated = false;  // the property holds for !b rather than b
  std::string behavior;
  std::string property;  // rendered statement
  Verdict verdict = Verdict::True;
  std::vector<std::string> transcripts;
  bool stale = false;
};

struct QueryRecord {
  std::size_t id = 0;
  Query query;
  OracleResponse response;
};

/// A witness promoted to a new factual starting point: the one-step trace of
/// its run and the tight relaxation pinning its inputs.
struct DerivedBasis {
  Relaxation scenario;
  Trace trace;
};

struct PoseResult {
  OracleResponse response;
  std::vector<Fact> added;
};

/// One investigation of one program against one factual trace. Queries are
/// appended in order; facts are only ever appended.
class Session {
 public:
  Session(std::string program_ref, declang::Program program, std::string trace_ref, Trace trace);

  [[nodiscard]] const declang::Program& program() const noexcept { return program_; }
  [[nodiscard]] const Trace& trace() const noexcept { return trace_; }
  [[nodiscard]] const std::string& program_ref() const noexcept { return program_ref_; }
  [[nodiscard]] const std::string& trace_ref() const noexcept { return trace_ref_; }
  [[nodiscard]] const std::string& program_hash() const noexcept { return program_hash_; }
  [[nodiscard]] const std::vector<QueryRecord>& history() const noexcept { return history_; }
  [[nodiscard]] const std::vector<Fact>& facts() const noexcept { return facts_; }

  /// Resolve `query`, record it, and add the facts its verdict proves.
  /// Unknown and EmptyFamily verdicts are recorded but add no fact.
  PoseResult pose(const Query& query, smt::Solver& solver, const OracleOptions& options = {});

  /// Parse a query document against this session's program and trace.
  [[nodiscard]] Query parse_query(const Json& j) const;

  /// Throws NoWitness and UnknownId, or an execution error from replaying
  /// the witness.
  [[nodiscard]] DerivedBasis derive_basis(std::size_t fact_id, declang::StepBudget budget) const;

  [[nodiscard]] const Fact& fact(std::size_t id) const;

 private:
  friend Json save_session(const Session& s);
  friend Session load_session(const Json& j, const std::function<std::string(const std::string&)>& read_ref);

  std::string program_ref_;
  declang::Program program_;
  std::string program_hash_;
  std::string trace_ref_;
  Trace trace_;
  std::vector<QueryRecord> history_;
  std::vector<Fact> facts_;
};

/// Statement of a fact in ASCII operator notation, e.g.
/// `[t=2] agent1_signal = RIGHT && ... -> move == 1`.
std::string render_property(const declang::Program& program, const Relaxation& scenario, std::size_t keyframe,
                            QueryMode mode, bool negated, std::string_view behavior,
                            const std::optional<ConcreteState>& witness);

/// Versioned session document. The program is referenced and hashed, not
/// embedded; `read_ref` fetches the text behind a program or trace reference.
/// A program whose hash no longer matches marks every fact stale. Throws
/// SchemaVersionMismatch and CorruptFile.
Json save_session(const Session& s);
Session load_session(const Json& j, const std::function<std::string(const std::string&)>& read_ref);

/// File variants; relative references resolve against the session file's
/// directory.
void save_session_file(const Session& s, const std::filesystem::path& path);
Session load_session_file(const std::filesystem::path& path);

}  // namespace clear
