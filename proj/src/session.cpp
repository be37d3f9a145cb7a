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

#include "clear/session.hpp"

#include "clear/bench.hpp"
#include "clear/error.hpp"
#include "clear/subprocess.hpp"

namespace clear {

std::string_view basis_kind_name(BasisKind k) noexcept {
  switch (k) {
    case BasisKind::Keyframe: return "keyframe";
    case BasisKind::Witness: return "witness";
    case BasisKind::Family: return "family";
  }
  return "?";
}

namespace {

BasisKind basis_from_name(std::string_view s) {
  if (s == "keyframe") return BasisKind::Keyframe;
  if (s == "witness") return BasisKind::Witness;
  if (s == "family") return BasisKind::Family;
  throw Error(Errc::CorruptFile, "unknown fact basis '" + std::string(s) + "'");
}

QueryMode mode_from_name(std::string_view s) {
  if (s == "factual") return QueryMode::Factual;
  if (s == "might") return QueryMode::Might;
  if (s == "would") return QueryMode::Would;
  throw Error(Errc::CorruptFile, "unknown query mode '" + std::string(s) + "'");
}

}  // namespace

Session::Session(std::string program_ref, declang::Program program, std::string trace_ref, Trace trace)
    : program_ref_(std::move(program_ref)),
      program_(std::move(program)),
      program_hash_(sha256_hex(program_.source)),
      trace_ref_(std::move(trace_ref)),
      trace_(std::move(trace)) {}

Query Session::parse_query(const Json& j) const { return query_from_json(program_, trace_, j); }

const Fact& Session::fact(std::size_t id) const {
  if (id >= facts_.size()) throw Error(Errc::UnknownId, "no fact " + std::to_string(id));
  return facts_[id];
}

DerivedBasis Session::derive_basis(std::size_t fact_id, declang::StepBudget budget) const {
  const auto& f = fact(fact_id);
  if (!f.witness) throw Error(Errc::NoWitness, "fact " + std::to_string(fact_id) + " has no witness");
  auto run = declang::interpret(program_, *f.witness, budget);
  return {tight_relaxation(program_.catalog, *f.witness), Trace({std::move(run.final_state)})};
}

std::string render_property(const declang::Program& program, const Relaxation& scenario, std::size_t keyframe,
                            QueryMode mode, bool negated, std::string_view behavior,
                            const std::optional<ConcreteState>& witness) {
  std::string b = negated ? "!(" + std::string(behavior) + ")" : std::string(behavior);
  std::string s;
  if (witness) {
    s += "M = {";
    bool first = true;
    for (const auto* d : program.catalog.select(Projection::Inputs)) {
      if (!first) s += ", ";
      first = false;
      s += d->name + " = " + format_value(witness->at(d->name), d->domain);
    }
    s += "}; ";
  }
  if (mode == QueryMode::Factual) return s + "[t=" + std::to_string(keyframe) + "] " + describe(program.catalog, scenario) + " -> " + b;
  return s + "[t*=" + std::to_string(keyframe) + "] " + describe(program.catalog, scenario) + " && !F []-> " + b;
}

PoseResult Session::pose(const Query& query, smt::Solver& solver, const OracleOptions& options) {
  PoseResult out{resolve(program_, trace_, query, solver, options), {}};
  const std::size_t qid = history_.size();
  history_.push_back({qid, query, out.response});

  const auto v = out.response.verdict;
  if (v != Verdict::True && v != Verdict::False) return out;

  Fact f;
  f.id = facts_.size();
  f.query_id = qid;
  f.keyframe = query.keyframe;
  f.family = query.scenario;
  f.mode = query.mode;
  f.behavior = query.behavior.text;
  f.verdict = v;
  f.transcripts = out.response.transcripts;
  switch (query.mode) {
    case QueryMode::Factual:
      f.basis = BasisKind::Keyframe;
      f.negated = v == Verdict::False;
      break;
    case QueryMode::Would:
      // True: the whole family satisfies b. False: the witness violates it.
      f.basis = v == Verdict::True ? BasisKind::Family : BasisKind::Witness;
      f.negated = v == Verdict::False;
      break;
    case QueryMode::Might:
      // True: the witness satisfies b. False: the whole family violates it.
      f.basis = v == Verdict::True ? BasisKind::Witness : BasisKind::Family;
      f.negated = v == Verdict::False;
      break;
  }
  if (f.basis == BasisKind::Witness) f.witness = out.response.witness;
  f.property = render_property(program_, f.family, f.keyframe, f.mode, f.negated, f.behavior, f.witness);
  facts_.push_back(f);
  out.added.push_back(std::move(f));
  return out;
}

// ---------------------------------------------------------------- persistence

Json save_session(const Session& s) {
  const auto& catalog = s.program_.catalog;
  Json queries = Json::array();
  for (const auto& r : s.history_) {
    queries.push_back({{"id", r.id}, {"query", query_to_json(s.program_, r.query)}, {"response", response_to_json(catalog, r.response)}});
  }
  Json facts = Json::array();
  for (const auto& f : s.facts_) {
    Json j{{"id", f.id},
           {"query_id", f.query_id},
           {"basis", basis_kind_name(f.basis)},
           {"keyframe", f.keyframe},
           {"family", relaxation_to_json(catalog, f.family)},
           {"mode", query_mode_name(f.mode)},
           {"negated", f.negated},
           {"behavior", f.behavior},
           {"property", f.property},
           {"verdict", verdict_name(f.verdict)},
           {"transcripts", f.transcripts},
           {"stale", f.stale}};
    if (f.witness) j["witness"] = state_to_json(catalog, *f.witness);
    facts.push_back(std::move(j));
  }
  return {{"schema", kSessionSchemaVersion},
          {"program", {{"ref", s.program_ref_}, {"sha256", s.program_hash_}, {"text", s.program_.source}}},
          {"trace", {{"ref", s.trace_ref_}}},
          {"queries", queries},
          {"facts", facts}};
}

Session load_session(const Json& j, const std::function<std::string(const std::string&)>& read_ref) {
  if (!j.is_object() || !j.contains("schema")) throw Error(Errc::CorruptFile, "not a session document");
  if (!j["schema"].is_number_integer() || j["schema"].get<int>() != kSessionSchemaVersion) {
    throw Error(Errc::SchemaVersionMismatch,
                "session schema " + j["schema"].dump() + ", expected " + std::to_string(kSessionSchemaVersion));
  }
  try {
    const auto& pj = j.at("program");
    const auto program_ref = pj.at("ref").get<std::string>();
    const auto stored_hash = pj.at("sha256").get<std::string>();
    const auto text = pj.at("text").get<std::string>();
    if (sha256_hex(text) != stored_hash) throw Error(Errc::CorruptFile, "embedded program does not match its hash");
    // History is interpreted against the program it was posed on; a changed
    // reference only invalidates the proofs.
    bool stale = false;
    try {
      stale = sha256_hex(read_ref(program_ref)) != stored_hash;
    } catch (const Error& e) {
      if (e.code() != Errc::IoError) throw;
      stale = true;
    }
    auto program = declang::parse_program(text);
    const auto trace_ref = j.at("trace").at("ref").get<std::string>();
    auto trace = parse_trace_log(read_ref(trace_ref), program.catalog);
    Session s(program_ref, std::move(program), trace_ref, std::move(trace));

    for (const auto& q : j.at("queries")) {
      QueryRecord r;
      r.id = q.at("id").get<std::size_t>();
      if (r.id != s.history_.size()) throw Error(Errc::CorruptFile, "query ids out of order");
      r.query = s.parse_query(q.at("query"));
      r.response = response_from_json(s.program_.catalog, q.at("response"));
      s.history_.push_back(std::move(r));
    }
    for (const auto& fj : j.at("facts")) {
      Fact f;
      f.id = fj.at("id").get<std::size_t>();
      f.query_id = fj.at("query_id").get<std::size_t>();
      if (f.id != s.facts_.size() || f.query_id >= s.history_.size()) {
        throw Error(Errc::CorruptFile, "fact " + std::to_string(f.id) + " has bad ids");
      }
      f.basis = basis_from_name(fj.at("basis").get<std::string>());
      f.keyframe = fj.at("keyframe").get<std::size_t>();
      f.family = relaxation_from_json(s.program_, fj.at("family"));
      f.mode = mode_from_name(fj.at("mode").get<std::string>());
      f.negated = fj.at("negated").get<bool>();
      f.behavior = fj.at("behavior").get<std::string>();
      f.property = fj.at("property").get<std::string>();
      f.verdict = verdict_from_name(fj.at("verdict").get<std::string>());
      f.transcripts = fj.at("transcripts").get<std::vector<std::string>>();
      f.stale = stale || fj.at("stale").get<bool>();
      if (fj.contains("witness")) f.witness = state_from_json(s.program_.catalog, fj["witness"]);
      s.facts_.push_back(std::move(f));
    }
    return s;
  } catch (const Json::exception& e) {
    throw Error(Errc::CorruptFile, e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::CorruptFile || e.code() == Errc::IoError) throw;
    throw Error(Errc::CorruptFile, e.what());
  }
}

void save_session_file(const Session& s, const std::filesystem::path& path) {
  write_text_file(path, save_session(s).dump(2) + "\n");
}

Session load_session_file(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(Errc::CorruptFile, path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  return load_session(j, [&](const std::string& ref) {
    const std::filesystem::path p(ref);
    return read_text_file(p.is_absolute() ? p : base / p);
  });
}

}  // namespace clear
