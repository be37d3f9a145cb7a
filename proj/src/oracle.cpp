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

#include "clear/oracle.hpp"

#include <chrono>

#include "clear/error.hpp"

namespace clear {

std::string_view query_mode_name(QueryMode m) noexcept {
  switch (m) {
    case QueryMode::Factual: return "factual";
    case QueryMode::Might: return "might";
    case QueryMode::Would: return "would";
  }
  return "?";
}

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Unknown: return "unknown";
    case Verdict::EmptyFamily: return "empty_family";
  }
  return "?";
}

Verdict verdict_from_name(std::string_view s) {
  if (s == "true") return Verdict::True;
  if (s == "false") return Verdict::False;
  if (s == "unknown") return Verdict::Unknown;
  if (s == "empty_family") return Verdict::EmptyFamily;
  throw Error(Errc::InvalidQuery, "unknown verdict '" + std::string(s) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

ConcreteState factual_inputs(const declang::Program& program, const Trace& trace, std::size_t t) {
  return restrict(program.catalog, state_at(trace, t), Projection::Inputs);
}

/// Everything a query's solver calls share.
struct Analysis {
  DecisionLogic logic;
  smt::TermPtr behavior;
  std::vector<std::string> behavior_vars;
  std::vector<std::string> value_symbols;
};

Analysis analyze(const declang::Program& program, const Query& q, smt::Solver& solver, const OracleOptions& options) {
  Analysis a{sym_execute(program, q.scenario, q.budget, solver, options.explore), nullptr, {}, {}};
  const auto& decls = program.catalog.decls();
  std::vector<smt::TermPtr> env(decls.size());
  for (std::size_t i = 0; i < decls.size(); ++i) {
    if (decls[i].var_class == VarClass::Decision) env[i] = a.logic.outputs.at(decls[i].name);
  }
  a.behavior = compile_expr(*q.behavior.expr, env);
  a.behavior_vars = declang::referenced_vars(program, *q.behavior.expr);
  for (const auto* d : program.catalog.select(Projection::Inputs)) {
    a.value_symbols.push_back(a.logic.inputs.at(d->name)->name);
  }
  for (const auto& v : a.behavior_vars) a.value_symbols.push_back(a.logic.outputs.at(v)->name);
  return a;
}

smt::TermPtr puncture_term(const declang::Program& program, const Analysis& a, const ConcreteState& factual) {
  std::vector<smt::TermPtr> eqs;
  for (const auto* d : program.catalog.select(Projection::Inputs)) {
    eqs.push_back(smt::mk_eq(a.logic.inputs.at(d->name), smt::mk_const(factual.at(d->name), d->domain)));
  }
  return smt::mk_and(std::move(eqs));
}

void fill_paths(const Analysis& a, OracleResponse& r) {
  r.ct = a.logic.ct();
  for (const auto& p : a.logic.paths) r.paths.push_back({p.id, p.final_state.steps, p.proven_feasible});
  r.timings.symbolic = a.logic.stats.seconds;
}

void take_model(const declang::Program& program, const Analysis& a, const smt::Model& m, OracleResponse& r) {
  ConcreteState in;
  for (const auto* d : program.catalog.select(Projection::Inputs)) {
    auto it = m.find(a.logic.inputs.at(d->name)->name);
    if (it == m.end()) throw Error(Errc::SolverCrash, "model lacks input '" + d->name + "'");
    in.set(d->name, smt::const_value(*it->second, d->domain));
  }
  ConcreteState out;
  for (const auto& v : a.behavior_vars) {
    if (auto it = m.find(a.logic.outputs.at(v)->name); it != m.end()) {
      out.set(v, smt::const_value(*it->second, program.catalog.at(v).domain));
    }
  }
  r.witness = std::move(in);
  r.witness_outputs = std::move(out);
}

/// A witness is certified when it lies in the family and replays to the
/// expected behavior outcome.
void certify(const declang::Program& program, const Query& q, const ConcreteState* factual, bool expect_behavior,
             OracleResponse& r) {
  if (!r.witness) return;
  try {
    bool in_family = eval_formula(program.catalog, q.scenario, *r.witness);
    if (factual != nullptr) in_family = in_family && !(*r.witness == *factual);
    r.witness_certified = in_family && witness_replay(program, *r.witness, q.behavior, q.budget) == expect_behavior;
  } catch (const Error&) {
    r.witness_certified = false;
  }
}

void record(const smt::CheckResult& c, OracleResponse& r) {
  r.timings.solving += c.seconds;
  if (!c.transcript.empty()) r.transcripts.push_back(c.transcript);
}

smt::CheckResult sat(smt::Solver& solver, const Analysis& a, const smt::TermPtr& formula, bool want_model,
                     OracleResponse& r) {
  const auto script =
      smt::emit_smt(a.logic.symbols, {formula}, want_model ? a.value_symbols : std::vector<std::string>{},
                    solver.config().logic);
  r.scripts.push_back(script.text());
  return solver.check_sat(script, a.logic.symbols);
}

void require_mode(const Query& q, QueryMode m) {
  if (q.mode != m) {
    throw Error(Errc::InvalidQuery, "expected a " + std::string(query_mode_name(m)) + " query, got " +
                                        std::string(query_mode_name(q.mode)));
  }
}

}  // namespace

bool witness_replay(const declang::Program& program, const ConcreteState& witness, const Behavior& behavior,
                    declang::StepBudget budget) {
  const auto run = declang::interpret(program, witness, budget);
  return eval_formula(program.catalog, behavior, restrict(program.catalog, run.final_state, Projection::Decision));
}

OracleResponse resolve_factual(const declang::Program& program, const Trace& trace, const Query& q,
                               smt::Solver& solver, const OracleOptions& options) {
  require_mode(q, QueryMode::Factual);
  const auto start = Clock::now();
  validate_factual_scenario(program.catalog, q.scenario, trace, q.keyframe);
  const auto a = analyze(program, q, solver, options);
  OracleResponse r;
  fill_paths(a, r);
  // valid((pre && Pi) => b), checked as unsat(pre && Pi && !b)
  const auto formula = smt::mk_and({a.logic.precondition, a.logic.pi_term(a.behavior_vars), smt::mk_not(a.behavior)});
  const auto c = sat(solver, a, formula, true, r);
  record(c, r);
  switch (c.verdict) {
    case smt::SatResult::Unsat: r.verdict = Verdict::True; break;
    case smt::SatResult::Sat:
      r.verdict = Verdict::False;
      take_model(program, a, c.model, r);
      certify(program, q, nullptr, false, r);
      break;
    case smt::SatResult::Unknown: r.verdict = Verdict::Unknown; break;
  }
  r.timings.total = since(start);
  return r;
}

namespace {

/// Shared part of would and might: build X = pre && !F && Pi and test that
/// the family is non-empty.
struct Counterfactual {
  Analysis a;
  ConcreteState factual;
  smt::TermPtr family;  // pre && !F
  smt::TermPtr x;       // pre && !F && Pi
};

std::optional<Counterfactual> prepare(const declang::Program& program, const Trace& trace, const Query& q,
                                      smt::Solver& solver, const OracleOptions& options, OracleResponse& r) {
  auto factual = factual_inputs(program, trace, q.keyframe);
  puncture(program.catalog, q.scenario, factual);
  auto a = analyze(program, q, solver, options);
  fill_paths(a, r);
  auto not_f = smt::mk_not(puncture_term(program, a, factual));
  auto family = smt::mk_and({a.logic.precondition, not_f});
  const auto nonempty = sat(solver, a, family, false, r);
  record(nonempty, r);
  if (nonempty.verdict == smt::SatResult::Unsat) {
    r.verdict = Verdict::EmptyFamily;
    return std::nullopt;
  }
  if (nonempty.verdict == smt::SatResult::Unknown) {
    r.verdict = Verdict::Unknown;
    return std::nullopt;
  }
  auto x = smt::mk_and({family, a.logic.pi_term(a.behavior_vars)});
  return Counterfactual{std::move(a), std::move(factual), std::move(family), std::move(x)};
}

}  // namespace

OracleResponse resolve_would(const declang::Program& program, const Trace& trace, const Query& q,
                             smt::Solver& solver, const OracleOptions& options) {
  require_mode(q, QueryMode::Would);
  const auto start = Clock::now();
  OracleResponse r;
  auto cf = prepare(program, trace, q, solver, options, r);
  if (cf) {
    // valid(X => b), checked as unsat(X && !b)
    const auto c = sat(solver, cf->a, smt::mk_and({cf->x, smt::mk_not(cf->a.behavior)}), true, r);
    record(c, r);
    switch (c.verdict) {
      case smt::SatResult::Unsat: r.verdict = Verdict::True; break;
      case smt::SatResult::Sat:
        r.verdict = Verdict::False;
        take_model(program, cf->a, c.model, r);
        certify(program, q, &cf->factual, false, r);
        break;
      case smt::SatResult::Unknown: r.verdict = Verdict::Unknown; break;
    }
  }
  r.timings.total = since(start);
  return r;
}

OracleResponse resolve_might(const declang::Program& program, const Trace& trace, const Query& q,
                             smt::Solver& solver, const OracleOptions& options) {
  require_mode(q, QueryMode::Might);
  const auto start = Clock::now();
  OracleResponse r;
  auto cf = prepare(program, trace, q, solver, options, r);
  if (cf) {
    const auto formula = options.might_form == MightForm::Implication
                             ? smt::mk_and({cf->x, smt::mk_implies(cf->x, cf->a.behavior)})
                             : smt::mk_and({cf->x, cf->a.behavior});
    const auto c = sat(solver, cf->a, formula, true, r);
    record(c, r);
    switch (c.verdict) {
      case smt::SatResult::Sat:
        r.verdict = Verdict::True;
        take_model(program, cf->a, c.model, r);
        certify(program, q, &cf->factual, true, r);
        break;
      case smt::SatResult::Unsat: r.verdict = Verdict::False; break;
      case smt::SatResult::Unknown: r.verdict = Verdict::Unknown; break;
    }
  }
  r.timings.total = since(start);
  return r;
}

OracleResponse resolve(const declang::Program& program, const Trace& trace, const Query& query, smt::Solver& solver,
                       const OracleOptions& options) {
  switch (query.mode) {
    case QueryMode::Factual: return resolve_factual(program, trace, query, solver, options);
    case QueryMode::Would: return resolve_would(program, trace, query, solver, options);
    case QueryMode::Might: return resolve_might(program, trace, query, solver, options);
  }
  throw Error(Errc::InvalidQuery, "bad query mode");
}

// ---------------------------------------------------------------- JSON

Query query_from_json(const declang::Program& program, const Trace& trace, const Json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidQuery, "query must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (k != "mode" && k != "constraints" && k != "behavior" && k != "keyframe" && k != "budget") {
      throw Error(Errc::InvalidQuery, "unexpected query key '" + k + "'");
    }
  }
  Query q;
  const auto mode = j.value("mode", std::string{});
  if (mode == "factual") {
    q.mode = QueryMode::Factual;
  } else if (mode == "might") {
    q.mode = QueryMode::Might;
  } else if (mode == "would") {
    q.mode = QueryMode::Would;
  } else {
    throw Error(Errc::InvalidQuery, "mode must be factual, might, or would");
  }
  const auto non_negative = [](const Json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0); };
  if (!j.contains("keyframe") || !non_negative(j["keyframe"])) {
    throw Error(Errc::InvalidQuery, "keyframe must be a non-negative integer");
  }
  q.keyframe = j["keyframe"].get<std::size_t>();
  if (!j.contains("behavior") || !j["behavior"].is_string()) throw Error(Errc::InvalidQuery, "behavior must be a string");
  q.behavior = make_behavior(program, j["behavior"].get<std::string>());
  if (j.contains("budget")) {
    if (!non_negative(j["budget"])) throw Error(Errc::InvalidQuery, "budget must be a positive integer");
    q.budget = declang::StepBudget(j["budget"].get<std::uint64_t>());
  }

  const auto& keyframe = state_at(trace, q.keyframe);
  const Json constraints = j.value("constraints", Json::object());
  if (!constraints.is_object()) throw Error(Errc::InvalidQuery, "constraints must be an object");
  std::vector<AtomicConstraint> atoms;
  for (const auto& [var, c] : constraints.items()) {
    if (program.catalog.find(var) == nullptr) {
      throw Error(Errc::UnknownVariable, "constraint on unknown variable '" + var + "'");
    }
    atoms.push_back(atom_from_json(program, var, c));
  }
  for (const auto* d : program.catalog.select(Projection::Inputs)) {
    if (!constraints.contains(d->name)) atoms.push_back(AtomicConstraint::eq(d->name, keyframe.at(d->name)));
  }
  q.scenario = mk_relaxation(program.catalog, std::move(atoms));
  return q;
}

Json query_to_json(const declang::Program& program, const Query& q) {
  Json j{{"mode", query_mode_name(q.mode)},
         {"constraints", relaxation_to_json(program.catalog, q.scenario)},
         {"behavior", q.behavior.text},
         {"keyframe", q.keyframe}};
  if (q.budget.max_steps() != declang::kDefaultMaxSteps) j["budget"] = q.budget.max_steps();
  return j;
}

Json response_to_json(const VarCatalog& catalog, const OracleResponse& r) {
  Json j{{"verdict", verdict_name(r.verdict)}, {"ct", r.ct}};
  if (r.witness) {
    j["witness"] = state_to_json(catalog, *r.witness);
    j["witness_certified"] = r.witness_certified;
  }
  if (r.witness_outputs) j["witness_outputs"] = state_to_json(catalog, *r.witness_outputs);
  Json paths = Json::array();
  for (const auto& p : r.paths) {
    paths.push_back({{"id", p.id}, {"steps", p.steps}, {"feasible", p.proven_feasible ? "sat" : "unknown"}});
  }
  j["paths"] = paths;
  j["timings"] = {{"symbolic", r.timings.symbolic}, {"solving", r.timings.solving}, {"total", r.timings.total}};
  if (!r.transcripts.empty()) j["transcripts"] = r.transcripts;
  return j;
}

OracleResponse response_from_json(const VarCatalog& catalog, const Json& j) {
  OracleResponse r;
  r.verdict = verdict_from_name(j.at("verdict").get<std::string>());
  r.ct = j.at("ct").get<std::size_t>();
  if (j.contains("witness")) {
    r.witness = state_from_json(catalog, j["witness"]);
    r.witness_certified = j.value("witness_certified", false);
  }
  if (j.contains("witness_outputs")) r.witness_outputs = state_from_json(catalog, j["witness_outputs"]);
  for (const auto& p : j.value("paths", Json::array())) {
    r.paths.push_back({p.at("id").get<std::size_t>(), p.at("steps").get<std::uint64_t>(),
                       p.at("feasible").get<std::string>() == "sat"});
  }
  const auto& t = j.at("timings");
  r.timings = {t.at("symbolic").get<double>(), t.at("solving").get<double>(), t.at("total").get<double>()};
  r.transcripts = j.value("transcripts", std::vector<std::string>{});
  return r;
}

}  // namespace clear
