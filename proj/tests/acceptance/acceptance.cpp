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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// line fails. Needs a solver (CLEAR_SOLVER or z3 on PATH).

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "clear/bench.hpp"
#include "support/differential.hpp"

using namespace clear;
namespace fs = std::filesystem;

namespace {

// Pinned limits.
constexpr int kRandomPrograms = 210;             // at least 200
constexpr std::uint64_t kMaxFamily = 512;
constexpr double kRandomSuiteSeconds = 600.0;    // whole randomized suite
constexpr double kPerQuerySeconds = 5.0;         // each fixture query, cold cache
constexpr std::size_t kMinDualityPairs = 50;
constexpr int kEmissionRuns = 10;
constexpr std::uint64_t kSeed = 20261015;

const fs::path kFixtures = CLEAR_FIXTURES_DIR;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Line {
  bool pass = false;
  std::string detail;
};

/// Witnesses returned by would-false and might-true responses, and how many
/// coincide with the factual inputs.
struct PunctureTally {
  std::size_t witnesses = 0;
  std::size_t on_factual = 0;

  void add(const Query& q, const OracleResponse& r, const ConcreteState& factual) {
    const bool counter = (q.mode == QueryMode::Would && r.verdict == Verdict::False) ||
                         (q.mode == QueryMode::Might && r.verdict == Verdict::True);
    if (!counter || !r.witness) return;
    ++witnesses;
    if (*r.witness == factual) ++on_factual;
  }
};

PunctureTally g_puncture;

ConcreteState keyframe_inputs(const declang::Program& p, const Trace& t, std::size_t k) {
  return restrict(p.catalog, state_at(t, k), Projection::Inputs);
}

struct RandomResults {
  Line oracle;
  Line might_forms;
};

RandomResults random_suite(smt::Solver& solver) {
  const auto start = Clock::now();
  test::ProgramGen gen(kSeed);
  std::size_t queries = 0, agree = 0, both_failed = 0, witness_bad = 0, too_big = 0;
  std::size_t forms = 0, forms_agree = 0;
  std::string first_problem;
  for (int i = 0; i < kRandomPrograms; ++i) {
    const auto g = gen.next();
    for (const char* mode : {"factual", "would", "might"}) {
      const auto q = query_from_json(g.program, g.trace, g.query(mode, g.behavior));
      ++queries;
      const auto o = test::run_oracle(g, q, solver);
      std::string brute;
      try {
        const auto b = brute_force_check(g.program, g.trace, q);
        if (b.family_size > kMaxFamily) ++too_big;
        brute = std::string(verdict_name(b.verdict));
      } catch (const Error& e) {
        brute = "!" + std::string(errc_name(e.code()));
      }
      std::string problem;
      if (o.text == "unknown" || !test::same_outcome(o.text, brute)) {
        problem = "oracle " + o.text + " vs enumeration " + brute;
      } else {
        ++agree;
        if (o.threw()) ++both_failed;
        if (o.response) {
          problem = test::witness_problem(g, q, *o.response);
          if (!problem.empty()) ++witness_bad;
          g_puncture.add(q, *o.response, g.factual);
        }
      }
      if (!problem.empty() && first_problem.empty()) {
        first_problem = problem + "\n" + test::describe_case(g, mode);
      }

      if (std::string(mode) == "might") {
        // the other encoding, compared on verdict and witness membership
        ++forms;
        const auto c = test::run_oracle(g, q, solver, OracleOptions{ExploreMode::Eager, MightForm::Conjunction});
        bool ok = test::same_outcome(c.text, o.text);
        if (ok && c.response) {
          ok = test::witness_problem(g, q, *c.response).empty();
          g_puncture.add(q, *c.response, g.factual);
        }
        if (ok) ++forms_agree;
      }
    }
  }
  const double secs = since(start);
  RandomResults r;
  std::ostringstream os;
  os << agree << "/" << queries << " verdicts agree (" << both_failed << " fail on both sides), " << witness_bad
     << " bad witnesses, " << too_big << " families over " << kMaxFamily << ", " << kRandomPrograms << " programs in "
     << static_cast<int>(secs) << " s (limit " << kRandomSuiteSeconds << " s)";
  r.oracle.pass = agree == queries && witness_bad == 0 && too_big == 0 && secs < kRandomSuiteSeconds &&
                  kRandomPrograms >= 200;
  r.oracle.detail = os.str();
  if (!first_problem.empty()) std::cerr << "first random-suite problem: " << first_problem;

  std::ostringstream fs_;
  fs_ << forms_agree << "/" << forms << " might queries agree across the implication and conjunction forms";
  r.might_forms.pass = forms_agree == forms && forms > 0;
  r.might_forms.detail = fs_.str();
  return r;
}

/// Run a manifest with a fresh solver so timings are cold.
Line fixture_suite(const std::string& name, const std::function<std::string(const BenchOutcome&)>& extra) {
  smt::Solver solver(smt::SolverConfig::from_env());
  const auto suite = load_suite(kFixtures / (name + ".json"));
  const auto report = run_suite(suite, solver);
  std::size_t ok = 0;
  double slowest = 0;
  std::string failures;
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const auto& o = report.outcomes[i];
    const auto& c = suite.cases[i];
    slowest = std::max(slowest, o.seconds);
    std::string why = o.passed ? "" : o.mismatch + o.error;
    if (why.empty() && o.seconds >= kPerQuerySeconds) why = "took " + std::to_string(o.seconds) + " s";
    if (why.empty() && o.response.witness && !o.response.witness_certified) why = "witness not certified";
    if (why.empty()) why = extra(o);
    if (o.error.empty()) {
      const auto p = load_program(c.program);
      const auto t = load_trace(c.trace, p.catalog);
      const auto q = query_from_json(p, t, load_json(c.query));
      g_puncture.add(q, o.response, keyframe_inputs(p, t, q.keyframe));
    }
    if (why.empty()) {
      ++ok;
    } else {
      failures += " [" + o.name + ": " + why + "]";
    }
  }
  std::ostringstream os;
  os << ok << "/" << report.outcomes.size() << " cases match, slowest " << slowest << " s (limit " << kPerQuerySeconds
     << " s)" << failures;
  return {ok == report.outcomes.size() && !report.outcomes.empty(), os.str()};
}

Line table2() {
  return fixture_suite("table2", [](const BenchOutcome& o) -> std::string {
    if (o.name.rfind("moved/", 0) == 0 && (o.response.verdict != Verdict::True || o.response.ct != 1)) {
      return "moved must be true with ct 1";
    }
    return "";
  });
}

Line table3() {
  return fixture_suite("table3", [](const BenchOutcome& o) -> std::string {
    if (o.name == "ever_high_risk" && !o.response.witness_certified) return "no replaying witness";
    return "";
  });
}

Line duality(smt::Solver& solver) {
  const auto doc = load_json(kFixtures / "duality.json");
  std::size_t pairs = 0, ok = 0;
  std::string failures;
  for (const auto& f : doc["families"]) {
    const auto p = load_program(kFixtures / f["program"].get<std::string>());
    const auto t = load_trace(kFixtures / f["trace"].get<std::string>(), p.catalog);
    const auto factual = keyframe_inputs(p, t, f["keyframe"].get<std::size_t>());
    for (const auto& b : f["behaviors"]) {
      ++pairs;
      auto doc_for = [&](const char* mode, const std::string& behavior) {
        return Json{{"mode", mode}, {"constraints", f["constraints"]}, {"behavior", behavior}, {"keyframe", f["keyframe"]}};
      };
      const auto beta = b.get<std::string>();
      std::string why;
      try {
        const auto wq = query_from_json(p, t, doc_for("would", beta));
        const auto mq = query_from_json(p, t, doc_for("might", "!(" + beta + ")"));
        const auto w = resolve(p, t, wq, solver);
        const auto m = resolve(p, t, mq, solver);
        g_puncture.add(wq, w, factual);
        g_puncture.add(mq, m, factual);
        if (w.verdict == Verdict::EmptyFamily || m.verdict == Verdict::EmptyFamily) {
          why = "empty family";
        } else if (!((w.verdict == Verdict::True && m.verdict == Verdict::False) ||
                     (w.verdict == Verdict::False && m.verdict == Verdict::True))) {
          why = "would " + std::string(verdict_name(w.verdict)) + ", might-not " + std::string(verdict_name(m.verdict));
        } else if ((w.witness && !w.witness_certified) || (m.witness && !m.witness_certified)) {
          why = "uncertified witness";
        }
      } catch (const Error& e) {
        why = e.what();
      }
      if (why.empty()) {
        ++ok;
      } else {
        failures += " [" + f["name"].get<std::string>() + " / " + beta + ": " + why + "]";
      }
    }
  }
  std::ostringstream os;
  os << ok << "/" << pairs << " fixture (family, behavior) pairs satisfy would(b) <=> !might(!b) (minimum "
     << kMinDualityPairs << ")" << failures;
  return {ok == pairs && pairs >= kMinDualityPairs, os.str()};
}

Line emission() {
  std::size_t files = 0, mismatched = 0;
  std::string first;
  for (int run = 0; run < kEmissionRuns; ++run) {
    smt::Solver solver(smt::SolverConfig::from_env());  // no cache carried across runs
    for (const char* name : {"table2", "table3"}) {
      const auto suite = load_suite(kFixtures / (std::string(name) + ".json"));
      for (const auto& c : suite.cases) {
        const auto dir = kFixtures / "golden/smt" / suite.name / case_dir_name(c);
        std::size_t emitted = 0;
        for (const auto& [file, text] : case_scripts(c, solver)) {
          ++files;
          ++emitted;
          const auto path = dir / file;
          if (!fs::exists(path) || read_text_file(path) != text) {
            ++mismatched;
            if (first.empty()) first = path.string();
          }
        }
        const auto on_disk = static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
        if (on_disk != emitted) {
          ++mismatched;
          if (first.empty()) first = dir.string() + " file count";
        }
      }
    }
  }
  std::ostringstream os;
  os << files << " scripts over " << kEmissionRuns << " runs, " << mismatched << " differ from the golden files";
  if (!first.empty()) os << " (first: " << first << ")";
  return {mismatched == 0 && files > 0, os.str()};
}

}  // namespace

int main() {
  smt::Solver solver(smt::SolverConfig::from_env());
  if (!solver.available()) {
    std::cout << "FAIL solver: no SMT solver found (set CLEAR_SOLVER)\n";
    return 1;
  }
  int failed = 0;
  const auto start = Clock::now();
  auto report = [&](const char* id, const Line& l) {
    std::cout << (l.pass ? "PASS " : "FAIL ") << id << ": " << l.detail << std::endl;
    std::cerr << "  (" << static_cast<int>(since(start)) << " s elapsed)\n";
    if (!l.pass) ++failed;
  };

  const auto random = random_suite(solver);
  report("oracle_vs_brute_force", random.oracle);
  report("table2_verdict_matrix", table2());
  report("table3_case_study", table3());
  report("duality", duality(solver));
  report("might_form_equivalence", random.might_forms);

  std::ostringstream os;
  os << g_puncture.witnesses << " counterfactual witnesses across all suites, " << g_puncture.on_factual
     << " equal to the factual inputs";
  report("puncture_guarantee", {g_puncture.on_factual == 0 && g_puncture.witnesses > 0, os.str()});
  report("emission_determinism", emission());
  return failed == 0 ? 0 : 1;
}
