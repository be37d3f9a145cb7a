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

#include "clear/bench.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "clear/error.hpp"

namespace clear {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoError, "cannot read " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot create " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out.flush()) throw Error(Errc::IoError, "cannot write " + path.string());
}

declang::Program load_program(const std::filesystem::path& path) {
  return declang::parse_program(read_text_file(path));
}

Trace load_trace(const std::filesystem::path& path, const VarCatalog& catalog) {
  return parse_trace_log(read_text_file(path), catalog);
}

Json load_json(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::InvalidQuery, path.string() + ": " + e.what());
  }
}

Suite load_suite(const std::filesystem::path& manifest) {
  const auto j = load_json(manifest);
  const auto base = manifest.parent_path();
  Suite s;
  try {
    s.name = j.at("suite").get<std::string>();
    for (const auto& c : j.at("cases")) {
      s.cases.push_back({c.at("name").get<std::string>(), base / c.at("program").get<std::string>(),
                         base / c.at("trace").get<std::string>(), base / c.at("query").get<std::string>(),
                         c.at("expect")});
    }
  } catch (const Json::exception& e) {
    throw Error(Errc::InvalidQuery, manifest.string() + ": " + e.what());
  }
  return s;
}

std::size_t SuiteReport::passed() const {
  std::size_t n = 0;
  for (const auto& o : outcomes) n += o.passed ? 1 : 0;
  return n;
}

namespace {

std::string compare(const Json& expect, const OracleResponse& r) {
  const auto want = expect.at("verdict").get<std::string>();
  if (want != verdict_name(r.verdict)) return "verdict " + std::string(verdict_name(r.verdict)) + ", expected " + want;
  if (expect.contains("ct") && expect["ct"].get<std::size_t>() != r.ct) {
    return "ct " + std::to_string(r.ct) + ", expected " + expect["ct"].dump();
  }
  if (expect.contains("witness_certified") && expect["witness_certified"].get<bool>() != r.witness_certified) {
    return std::string("witness_certified ") + (r.witness_certified ? "true" : "false");
  }
  return {};
}

}  // namespace

SuiteReport run_suite(const Suite& suite, smt::Solver& solver, const OracleOptions& options) {
  SuiteReport report{suite.name, {}};
  for (const auto& c : suite.cases) {
    BenchOutcome o;
    o.name = c.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto program = load_program(c.program);
      const auto trace = load_trace(c.trace, program.catalog);
      const auto query = query_from_json(program, trace, load_json(c.query));
      o.response = resolve(program, trace, query, solver, options);
      o.mismatch = compare(c.expect, o.response);
      o.passed = o.mismatch.empty();
    } catch (const Error& e) {
      o.error = e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.outcomes.push_back(std::move(o));
  }
  return report;
}

Json report_to_json(const SuiteReport& report) {
  Json cases = Json::array();
  for (const auto& o : report.outcomes) {
    Json c{{"name", o.name}, {"passed", o.passed}, {"seconds", o.seconds}};
    if (o.error.empty()) {
      c["verdict"] = verdict_name(o.response.verdict);
      c["ct"] = o.response.ct;
    } else {
      c["error"] = o.error;
    }
    if (!o.mismatch.empty()) c["mismatch"] = o.mismatch;
    cases.push_back(std::move(c));
  }
  return {{"suite", report.suite}, {"passed", report.passed()}, {"total", report.outcomes.size()}, {"cases", cases}};
}

std::vector<std::pair<std::string, std::string>> case_scripts(const BenchCase& c, smt::Solver& solver,
                                                              const OracleOptions& options) {
  const auto program = load_program(c.program);
  const auto trace = load_trace(c.trace, program.catalog);
  const auto query = query_from_json(program, trace, load_json(c.query));
  auto files = decision_logic_files(sym_execute(program, query.scenario, query.budget, solver, options.explore));
  const auto r = resolve(program, trace, query, solver, options);
  for (std::size_t i = 0; i < r.scripts.size(); ++i) files.emplace_back("query_" + std::to_string(i) + ".smt2", r.scripts[i]);
  return files;
}

std::string case_dir_name(const BenchCase& c) {
  std::string out;
  for (char ch : c.name) {
    if (ch == '/') {
      out += "__";
    } else {
      out += ch;
    }
  }
  return out;
}

}  // namespace clear
