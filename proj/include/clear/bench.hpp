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
#include <optional>
#include <string>
#include <vector>

#include "clear/oracle.hpp"

namespace clear {

/// Read a whole file. Throws IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

declang::Program load_program(const std::filesystem::path& path);
Trace load_trace(const std::filesystem::path& path, const VarCatalog& catalog);
Json load_json(const std::filesystem::path& path);

/// One row of a suite manifest. Paths are resolved against the manifest's
/// directory.
struct BenchCase {
  std::string name;
  std::filesystem::path program;
  std::filesystem::path trace;
  std::filesystem::path query;
  /// Expected fields: "verdict" (required), "ct", "witness_certified".
  Json expect;
};

struct Suite {
  std::string name;
  std::vector<BenchCase> cases;
};

/// {"suite": name, "cases": [{"name", "program", "trace", "query", "expect"}]}
Suite load_suite(const std::filesystem::path& manifest);

struct BenchOutcome {
  std::string name;
  OracleResponse response;
  bool passed = false;
  std::string mismatch;  // empty when passed
  std::string error;     // set when resolution threw
  double seconds = 0;
};

struct SuiteReport {
  std::string suite;
  std::vector<BenchOutcome> outcomes;

  [[nodiscard]] std::size_t passed() const;
  [[nodiscard]] bool all_passed() const { return passed() == outcomes.size(); }
};

SuiteReport run_suite(const Suite& suite, smt::Solver& solver, const OracleOptions& options = {});

Json report_to_json(const SuiteReport& report);

/// Every SMT-LIB script a case emits, as (file name, text): the per-path
/// scripts of its decision logic, its index.json, and the oracle's query
/// scripts `query_<i>.smt2`.
std::vector<std::pair<std::string, std::string>> case_scripts(const BenchCase& c, smt::Solver& solver,
                                                              const OracleOptions& options = {});

/// Directory name for a case: its name with '/' replaced by "__".
std::string case_dir_name(const BenchCase& c);

}  // namespace clear
