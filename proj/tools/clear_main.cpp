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

// clear: command-line front end.
//
// Exit status: 0 success, 1 an --expect or bench mismatch, 2 any error,
// 64 usage.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "clear/bench.hpp"
#include "clear/brute_force.hpp"
#include "clear/error.hpp"
#include "clear/service.hpp"
#include "clear/session.hpp"

namespace {

using namespace clear;

constexpr int kExitMismatch = 1;
constexpr int kExitError = 2;
constexpr int kExitUsage = 64;

#ifndef CLEAR_FIXTURES_DIR
#define CLEAR_FIXTURES_DIR "fixtures"
#endif

struct SolverFlags {
  std::string path;
  int timeout_ms = 0;
  std::string transcripts;

  smt::SolverConfig config() const {
    auto c = smt::SolverConfig::from_env();
    if (!path.empty()) c.path = path;
    if (timeout_ms > 0) c.timeout = std::chrono::milliseconds(timeout_ms);
    if (!transcripts.empty()) c.transcript_dir = transcripts;
    return c;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--solver", f.path, "Solver executable (default $CLEAR_SOLVER or z3)");
  cmd->add_option("--timeout-ms", f.timeout_ms, "Per-call solver timeout");
  cmd->add_option("--transcripts", f.transcripts, "Directory for solver transcripts");
}

struct OracleFlags {
  std::string might_form = "implication";
  bool deferred = false;

  OracleOptions options() const {
    OracleOptions o;
    o.might_form = might_form == "conjunction" ? MightForm::Conjunction : MightForm::Implication;
    o.explore = deferred ? ExploreMode::Deferred : ExploreMode::Eager;
    return o;
  }
};

void add_oracle_flags(CLI::App* cmd, OracleFlags& f) {
  cmd->add_option("--might-form", f.might_form, "Might encoding: implication or conjunction")
      ->check(CLI::IsMember({"implication", "conjunction"}));
  cmd->add_flag("--deferred", f.deferred, "Prune infeasible paths after exploration instead of at each fork");
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

void print_state(const VarCatalog& catalog, const ConcreteState& s, const std::string& indent) {
  for (const auto& d : catalog.decls()) {
    if (const auto* v = s.find(d.name)) std::cout << indent << d.name << " = " << format_value(*v, d.domain) << '\n';
  }
}

void print_response(const VarCatalog& catalog, const OracleResponse& r) {
  std::cout << "verdict   " << verdict_name(r.verdict) << '\n';
  std::cout << "paths     " << r.ct << '\n';
  std::printf("timings   symbolic %.3fs  solving %.3fs  total %.3fs\n", r.timings.symbolic, r.timings.solving,
              r.timings.total);
  if (r.witness) {
    std::cout << "witness   (" << (r.witness_certified ? "certified" : "NOT certified") << ")\n";
    print_state(catalog, *r.witness, "  ");
    if (r.witness_outputs) print_state(catalog, *r.witness_outputs, "  -> ");
  }
}

int cmd_check(const std::string& program_path, bool json) {
  const auto p = load_program(program_path);
  if (json) {
    Json vars = Json::array();
    for (const auto& d : p.catalog.decls()) {
      vars.push_back({{"name", d.name}, {"class", var_class_name(d.var_class)}, {"type", d.domain.to_string()}});
    }
    print_json({{"ok", true}, {"variables", vars}, {"leaves", declang::count_leaves(p.body)}});
  } else {
    std::cout << program_path << ": ok, " << p.catalog.decls().size() << " variables, "
              << declang::count_leaves(p.body) << " leaves\n";
  }
  return 0;
}

int cmd_run(const std::string& program_path, const std::string& trace_path, std::size_t step, std::uint64_t budget,
            bool json) {
  const auto p = load_program(program_path);
  const auto t = load_trace(trace_path, p.catalog);
  const auto inputs = restrict(p.catalog, state_at(t, step), Projection::Inputs);
  const auto r = declang::interpret(p, inputs, declang::StepBudget(budget));
  if (json) {
    print_json({{"steps", r.steps}, {"state", state_to_json(p.catalog, r.final_state)}});
  } else {
    print_state(p.catalog, r.final_state, "");
    std::cout << "(" << r.steps << " steps)\n";
  }
  return 0;
}

int cmd_symexec(const std::string& program_path, const std::string& trace_path, const std::string& query_path,
                const std::string& out_dir, const SolverFlags& sf, bool deferred, bool json) {
  const auto p = load_program(program_path);
  Relaxation pre;
  declang::StepBudget budget(declang::kDefaultMaxSteps);
  if (query_path.empty()) {
    std::vector<AtomicConstraint> atoms;
    for (const auto* d : p.catalog.select(Projection::Inputs)) atoms.push_back(AtomicConstraint::free(d->name));
    pre = mk_relaxation(p.catalog, std::move(atoms));
  } else {
    if (trace_path.empty()) throw Error(Errc::InvalidQuery, "--query needs --trace");
    const auto t = load_trace(trace_path, p.catalog);
    const auto q = query_from_json(p, t, load_json(query_path));
    pre = q.scenario;
    budget = q.budget;
  }
  smt::Solver solver(sf.config());
  const auto logic = sym_execute(p, pre, budget, solver, deferred ? ExploreMode::Deferred : ExploreMode::Eager);
  if (!out_dir.empty()) dump_decision_logic(logic, out_dir);
  if (json) {
    Json paths = Json::array();
    for (const auto& path : logic.paths) {
      paths.push_back({{"id", path.id}, {"steps", path.final_state.steps}, {"feasible", path.proven_feasible ? "sat" : "unknown"}});
    }
    print_json({{"ct", logic.ct()},
                {"paths", paths},
                {"forks", logic.stats.forks},
                {"feasibility_checks", logic.stats.feasibility_checks},
                {"pruned", logic.stats.pruned},
                {"seconds", logic.stats.seconds}});
  } else {
    std::cout << "paths " << logic.ct() << " (forks " << logic.stats.forks << ", pruned " << logic.stats.pruned
              << ")\n";
    for (const auto& path : logic.paths) {
      std::cout << "  path " << path.id << ": " << path.final_state.steps << " steps"
                << (path.proven_feasible ? "" : ", feasibility unknown") << '\n';
    }
    if (!out_dir.empty()) std::cout << "wrote " << out_dir << '\n';
  }
  return 0;
}

int cmd_query(const std::string& program_path, const std::string& trace_path, const std::string& query_path,
              std::optional<std::size_t> keyframe, const std::string& expect, bool brute, const SolverFlags& sf,
              const OracleFlags& of, bool json) {
  const auto p = load_program(program_path);
  const auto t = load_trace(trace_path, p.catalog);
  auto doc = load_json(query_path);
  if (keyframe) doc["keyframe"] = *keyframe;
  const auto q = query_from_json(p, t, doc);
  smt::Solver solver(sf.config());
  const auto r = resolve(p, t, q, solver, of.options());
  std::optional<BruteForceResult> bf;
  if (brute) bf = brute_force_check(p, t, q);
  if (json) {
    auto j = response_to_json(p.catalog, r);
    if (bf) j["brute_force"] = {{"verdict", verdict_name(bf->verdict)}, {"family_size", bf->family_size}};
    print_json(j);
  } else {
    print_response(p.catalog, r);
    if (bf) std::cout << "brute     " << verdict_name(bf->verdict) << " over " << bf->family_size << " members\n";
  }
  if (!expect.empty() && expect != verdict_name(r.verdict)) return kExitMismatch;
  if (bf && bf->verdict != r.verdict) return kExitMismatch;
  return 0;
}

int cmd_session(const std::string& path, const SolverFlags& sf, const OracleFlags& of, bool json) {
  const auto s = load_session_file(path);
  smt::Solver solver(sf.config());
  Json rows = Json::array();
  bool all_match = true;
  for (const auto& rec : s.history()) {
    const auto r = resolve(s.program(), s.trace(), rec.query, solver, of.options());
    const bool match = r.verdict == rec.response.verdict;
    all_match = all_match && match;
    rows.push_back({{"query_id", rec.id},
                    {"mode", query_mode_name(rec.query.mode)},
                    {"behavior", rec.query.behavior.text},
                    {"recorded", verdict_name(rec.response.verdict)},
                    {"replayed", verdict_name(r.verdict)},
                    {"match", match}});
  }
  std::size_t stale = 0;
  for (const auto& f : s.facts()) stale += f.stale ? 1 : 0;
  if (json) {
    print_json({{"queries", rows}, {"facts", s.facts().size()}, {"stale_facts", stale}, {"consistent", all_match}});
  } else {
    for (const auto& row : rows) {
      std::cout << "q" << row["query_id"].get<std::size_t>() << "  " << row["mode"].get<std::string>() << "  "
                << row["behavior"].get<std::string>() << "  recorded " << row["recorded"].get<std::string>()
                << ", replayed " << row["replayed"].get<std::string>() << (row["match"].get<bool>() ? "" : "  MISMATCH")
                << '\n';
    }
    std::cout << s.facts().size() << " facts";
    if (stale > 0) std::cout << " (" << stale << " stale: program changed)";
    std::cout << '\n';
    for (const auto& f : s.facts()) std::cout << "  F" << f.id << "  " << f.property << '\n';
  }
  return all_match ? 0 : kExitMismatch;
}

std::filesystem::path suite_path(const std::string& suite, const std::string& fixtures) {
  std::filesystem::path p(suite);
  if (p.extension() == ".json" || std::filesystem::exists(p)) return p;
  return std::filesystem::path(fixtures) / (suite + ".json");
}

int cmd_bench(const std::vector<std::string>& suites, const std::string& fixtures, const std::string& emit_dir,
              const SolverFlags& sf, const OracleFlags& of, bool json) {
  smt::Solver solver(sf.config());
  if (!solver.available()) throw Error(Errc::SolverUnavailable, "solver '" + solver.config().path + "' not found");
  if (!emit_dir.empty()) {
    for (const auto& name : suites) {
      const auto suite = load_suite(suite_path(name, fixtures));
      for (const auto& c : suite.cases) {
        const auto dir = std::filesystem::path(emit_dir) / suite.name / case_dir_name(c);
        std::filesystem::create_directories(dir);
        for (const auto& [file, text] : case_scripts(c, solver, of.options())) write_text_file(dir / file, text);
      }
      std::cout << "wrote " << (std::filesystem::path(emit_dir) / suite.name).string() << '\n';
    }
    return 0;
  }
  bool ok = true;
  Json reports = Json::array();
  for (const auto& name : suites) {
    const auto report = run_suite(load_suite(suite_path(name, fixtures)), solver, of.options());
    ok = ok && report.all_passed();
    if (json) {
      reports.push_back(report_to_json(report));
      continue;
    }
    std::cout << "suite " << report.suite << '\n';
    for (const auto& o : report.outcomes) {
      std::printf("  %-4s %-42s %-12s ct=%-3zu %7.3fs", o.passed ? "ok" : "FAIL", o.name.c_str(),
                  o.error.empty() ? std::string(verdict_name(o.response.verdict)).c_str() : "error", o.response.ct,
                  o.seconds);
      if (!o.mismatch.empty()) std::printf("  (%s)", o.mismatch.c_str());
      if (!o.error.empty()) std::printf("  (%s)", o.error.c_str());
      std::printf("\n");
    }
    std::cout << "  " << report.passed() << "/" << report.outcomes.size() << " match\n";
  }
  if (json) print_json(reports.size() == 1 ? reports[0] : reports);
  return ok ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clear: counterfactual investigation of decision programs"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "Machine-readable output");

  SolverFlags sf;
  OracleFlags of;

  std::string program, trace, query, out_dir, expect, session_path, fixtures = CLEAR_FIXTURES_DIR "/v1";
  std::size_t step = 0;
  std::uint64_t budget = declang::kDefaultMaxSteps;
  std::optional<std::size_t> keyframe;
  bool brute = false;
  std::vector<std::string> suites;
  ServiceConfig service;
  std::string session_dir;
  std::string emit_dir;

  auto* check = app.add_subcommand("check", "Parse and typecheck a program");
  check->add_option("program", program, "Program file")->required();

  auto* run = app.add_subcommand("run", "Interpret a program on one logged state");
  run->add_option("program", program)->required();
  run->add_option("trace", trace)->required();
  run->add_option("--step", step, "Trace step whose inputs to use");
  run->add_option("--budget", budget, "Step budget");

  auto* symexec = app.add_subcommand("symexec", "Build and dump the decision logic");
  symexec->add_option("program", program)->required();
  symexec->add_option("--trace", trace);
  symexec->add_option("--query", query, "Query whose relaxation is the precondition (default: all inputs free)");
  symexec->add_option("--out", out_dir, "Directory for per-path SMT-LIB files");
  add_solver_flags(symexec, sf);
  symexec->add_flag("--deferred", of.deferred);

  auto* q = app.add_subcommand("query", "Resolve one query");
  q->add_option("--program", program)->required();
  q->add_option("--trace", trace)->required();
  q->add_option("--query", query)->required();
  q->add_option("--keyframe", keyframe, "Override the query's keyframe");
  q->add_option("--expect", expect, "Exit 1 unless the verdict is this")
      ->check(CLI::IsMember({"true", "false", "unknown", "empty_family"}));
  q->add_flag("--brute-force", brute, "Cross-check by enumerating the family");
  add_solver_flags(q, sf);
  add_oracle_flags(q, of);

  auto* sess = app.add_subcommand("session", "Replay a session file and check its verdicts");
  sess->add_option("file", session_path)->required();
  add_solver_flags(sess, sf);
  add_oracle_flags(sess, of);

  auto* bench = app.add_subcommand("bench", "Run fixture suites");
  bench->add_option("--suite", suites, "Suite name (table2, table3) or manifest path")->required();
  bench->add_option("--fixtures", fixtures, "Fixture directory");
  bench->add_option("--emit", emit_dir, "Write every case's SMT-LIB scripts here instead of checking verdicts");
  add_solver_flags(bench, sf);
  add_oracle_flags(bench, of);

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--host", service.host);
  serve_cmd->add_option("--port", service.port);
  serve_cmd->add_option("--sessions", session_dir, "Directory to persist sessions in");
  add_solver_flags(serve_cmd, sf);
  add_oracle_flags(serve_cmd, of);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*check) return cmd_check(program, json);
    if (*run) return cmd_run(program, trace, step, budget, json);
    if (*symexec) return cmd_symexec(program, trace, query, out_dir, sf, of.deferred, json);
    if (*q) return cmd_query(program, trace, query, keyframe, expect, brute, sf, of, json);
    if (*sess) return cmd_session(session_path, sf, of, json);
    if (*bench) return cmd_bench(suites, fixtures, emit_dir, sf, of, json);
    if (*serve_cmd) {
      service.solver = sf.config();
      service.session_dir = session_dir;
      service.oracle = of.options();
      std::cerr << "listening on http://" << service.host << ":" << service.port << '\n';
      if (!serve(service)) {
        std::cerr << "error: cannot bind " << service.host << ":" << service.port << '\n';
        return kExitError;
      }
      return 0;
    }
  } catch (const Error& e) {
    if (json) {
      print_json({{"error", errc_name(e.code())}, {"message", e.what()}});
    } else {
      std::cerr << "error: " << e.what() << '\n';
    }
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
