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

#include <filesystem>

#include <gtest/gtest.h>

#include "clear/session.hpp"
#include "clear/subprocess.hpp"
#include "support/common.hpp"

using namespace clear;
namespace fs = std::filesystem;

namespace {

ProcessResult clear_cli(std::vector<std::string> args) {
  args.insert(args.begin(), CLEAR_CLI_PATH);
  return run_process(args, "", std::chrono::seconds(300));
}

std::string fx(const std::string& rel) { return test::fixture(rel).string(); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("clear_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(clear_cli({}).exit_code, 64);
  EXPECT_EQ(clear_cli({"frobnicate"}).exit_code, 64);
  EXPECT_EQ(clear_cli({"check"}).exit_code, 64);
  EXPECT_EQ(clear_cli({"query", "--program", fx("programs/lpr.decl"), "--bogus"}).exit_code, 64);
  EXPECT_EQ(clear_cli({"--help"}).exit_code, 0);
}

TEST_F(Cli, CheckReportsProgramErrors) {
  const auto ok = clear_cli({"check", fx("programs/lpr.decl")});
  EXPECT_EQ(ok.exit_code, 0);
  EXPECT_NE(ok.out.find("4 leaves"), std::string::npos) << ok.out;

  const auto j = clear_cli({"--json", "check", fx("programs/intersection_standard.decl")});
  ASSERT_EQ(j.exit_code, 0);
  EXPECT_TRUE(Json::parse(j.out)["ok"].get<bool>());

  write_text_file(dir_ / "bad.decl", "env x: bool;\ndecision d: bool = false;\nx := true;\n");
  const auto bad = clear_cli({"check", (dir_ / "bad.decl").string()});
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_NE(bad.err.find("EnvWriteError"), std::string::npos) << bad.err;

  const auto missing = clear_cli({"--json", "check", (dir_ / "absent.decl").string()});
  EXPECT_EQ(missing.exit_code, 2);
  EXPECT_EQ(Json::parse(missing.out)["error"], "IoError");
}

TEST_F(Cli, RunInterpretsALoggedStep) {
  const auto r = clear_cli({"--json", "run", fx("programs/intersection_standard.decl"), fx("traces/crash.jsonl"), "--step", "2"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["state"]["move"], 1);
  EXPECT_EQ(clear_cli({"run", fx("programs/lpr.decl"), fx("traces/lpr.jsonl"), "--step", "9"}).exit_code, 2);
}

TEST_F(Cli, QueryExpectAndBruteForce) {
  auto solver = test::make_solver();
  CLEAR_REQUIRE_SOLVER(solver);
  const std::vector<std::string> base{"query", "--program", fx("programs/intersection_standard.decl"), "--trace",
                                      fx("traces/crash.jsonl"), "--query", fx("queries/moved.json")};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return clear_cli(a);
  };
  const auto ok = with({"--expect", "true"});
  EXPECT_EQ(ok.exit_code, 0) << ok.err;
  EXPECT_NE(ok.out.find("verdict   true"), std::string::npos) << ok.out;
  EXPECT_EQ(with({"--expect", "false"}).exit_code, 1);
  EXPECT_EQ(with({"--expect", "maybe"}).exit_code, 64);

  write_text_file(dir_ / "q.json", R"({"mode": "would", "constraints": {"agent1_signal": {"in": ["STRAIGHT", "LEFT", "RIGHT"]},
    "agent1_pos_x": {"in": [1.0, 1.25, 1.376, 1.5, 1.9]}}, "behavior": "move == 1", "keyframe": 2})");
  const auto bf = clear_cli({"--json", "query", "--program", fx("programs/intersection_standard.decl"), "--trace",
                             fx("traces/crash.jsonl"), "--query", (dir_ / "q.json").string(), "--brute-force"});
  ASSERT_EQ(bf.exit_code, 0) << bf.err;
  const auto j = Json::parse(bf.out);
  EXPECT_EQ(j["verdict"], j["brute_force"]["verdict"]);
  EXPECT_EQ(j["brute_force"]["family_size"], 14);

  const auto none = with({"--solver", "/nonexistent/solver"});
  EXPECT_EQ(none.exit_code, 2);
  EXPECT_NE(none.err.find("SolverUnavailable"), std::string::npos);
}

TEST_F(Cli, SymexecDumpsPaths) {
  auto solver = test::make_solver();
  CLEAR_REQUIRE_SOLVER(solver);
  const auto r = clear_cli({"--json", "symexec", fx("programs/lpr.decl"), "--out", (dir_ / "logic").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["ct"], 4);
  EXPECT_TRUE(fs::exists(dir_ / "logic" / "path_4.smt2"));
  EXPECT_TRUE(fs::exists(dir_ / "logic" / "index.json"));
}

TEST_F(Cli, SessionReplayDetectsMismatch) {
  auto solver = test::make_solver();
  CLEAR_REQUIRE_SOLVER(solver);
  const auto program = load_program(test::fixture("programs/intersection_standard.decl"));
  const auto trace = load_trace(test::fixture("traces/crash.jsonl"), program.catalog);
  Session s(fx("programs/intersection_standard.decl"), program, fx("traces/crash.jsonl"), trace);
  s.pose(s.parse_query(load_json(test::fixture("queries/moved.json"))), solver);
  s.pose(s.parse_query(load_json(test::fixture("queries/signal_always_move.json"))), solver);
  save_session_file(s, dir_ / "s.json");

  const auto ok = clear_cli({"session", (dir_ / "s.json").string()});
  EXPECT_EQ(ok.exit_code, 0) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("2 facts"), std::string::npos) << ok.out;

  auto doc = Json::parse(read_text_file(dir_ / "s.json"));
  doc["queries"][1]["response"]["verdict"] = "true";  // replays as false
  write_text_file(dir_ / "s.json", doc.dump());
  const auto bad = clear_cli({"--json", "session", (dir_ / "s.json").string()});
  EXPECT_EQ(bad.exit_code, 1);
  EXPECT_FALSE(Json::parse(bad.out)["consistent"].get<bool>());
}

TEST_F(Cli, BenchRunsNamedSuite) {
  auto solver = test::make_solver();
  CLEAR_REQUIRE_SOLVER(solver);
  const auto r = clear_cli({"--json", "bench", "--suite", "table3", "--fixtures", test::fixture("").string()});
  ASSERT_EQ(r.exit_code, 0) << r.out << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["passed"], j["total"]);
  EXPECT_EQ(j["total"], 3);
}
