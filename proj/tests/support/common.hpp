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
#include <string>

#include "clear/bench.hpp"
#include "clear/error.hpp"
#include "clear/oracle.hpp"

namespace clear::test {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(CLEAR_FIXTURES_DIR) / rel; }

struct Loaded {
  declang::Program program;
  Trace trace;
};

inline Loaded load(const std::string& program, const std::string& trace) {
  auto p = load_program(fixture("programs/" + program));
  auto t = load_trace(fixture("traces/" + trace), p.catalog);
  return {std::move(p), std::move(t)};
}

inline Query query_file(const Loaded& fx, const std::string& name) {
  return query_from_json(fx.program, fx.trace, load_json(fixture("queries/" + name)));
}

inline Query query_doc(const Loaded& fx, const char* json_text) {
  return query_from_json(fx.program, fx.trace, Json::parse(json_text));
}

inline smt::Solver make_solver() { return smt::Solver(smt::SolverConfig::from_env()); }

/// Run `fn` and return the error code it throws; fails the test if nothing is
/// thrown.
template <typename Fn>
Errc error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected an exception");
}

}  // namespace clear::test

#define CLEAR_REQUIRE_SOLVER(solver)                           \
  do {                                                         \
    if (!(solver).available()) GTEST_SKIP() << "no solver";    \
  } while (0)
