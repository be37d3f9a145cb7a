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

#include <gtest/gtest.h>

#include "clear/brute_force.hpp"
#include "support/common.hpp"

using namespace clear;
using clear::test::error_of;

namespace {

test::Loaded threshold() {
  auto p = declang::parse_program("env x: int<4>;\nenv b: bool;\ndecision d: bool = false;\nif (x > 2 || b) { d := true; }\n");
  auto t = parse_trace_log(R"({"t": 0, "vars": {"x": 5, "b": false, "d": true}})", p.catalog);
  return {std::move(p), std::move(t)};
}

BruteForceResult check(const test::Loaded& fx, const char* doc, std::uint64_t cap = kBruteForceCap) {
  return brute_force_check(fx.program, fx.trace, test::query_doc(fx, doc), cap);
}

}  // namespace

TEST(BruteForce, WouldFindsFirstCounterexampleInOdometerOrder) {
  const auto fx = threshold();
  const auto r = check(fx, R"({"mode": "would", "constraints": {"x": "free", "b": "free"}, "behavior": "d", "keyframe": 0})");
  EXPECT_EQ(r.verdict, Verdict::False);
  EXPECT_EQ(r.family_size, 31u);
  // x slowest, b fastest: (-8, false) comes first
  EXPECT_EQ(r.witness->at("x").as_signed(4), -8);
  EXPECT_EQ(r.witness->at("b"), Value::boolean(false));

  const auto holds = check(fx, R"({"mode": "would", "constraints": {"x": {"range": [3, 7]}, "b": "free"}, "behavior": "d", "keyframe": 0})");
  EXPECT_EQ(holds.verdict, Verdict::True);
  EXPECT_EQ(holds.family_size, 9u);
  EXPECT_FALSE(holds.witness.has_value());
}

TEST(BruteForce, MightAndEmptyFamily) {
  const auto fx = threshold();
  const auto some = check(fx, R"({"mode": "might", "constraints": {"x": {"in": [5, 1]}}, "behavior": "!d", "keyframe": 0})");
  EXPECT_EQ(some.verdict, Verdict::True);
  EXPECT_EQ(some.witness->at("x").as_signed(4), 1);
  const auto none = check(fx, R"({"mode": "might", "constraints": {"x": {"in": [5, 4]}}, "behavior": "!d", "keyframe": 0})");
  EXPECT_EQ(none.verdict, Verdict::False);
  const auto empty = check(fx, R"({"mode": "would", "constraints": {}, "behavior": "d", "keyframe": 0})");
  EXPECT_EQ(empty.verdict, Verdict::EmptyFamily);
  EXPECT_EQ(empty.family_size, 0u);
}

TEST(BruteForce, FactualChecksTheLoggedPoint) {
  const auto fx = threshold();
  EXPECT_EQ(check(fx, R"({"mode": "factual", "constraints": {}, "behavior": "d", "keyframe": 0})").verdict, Verdict::True);
  EXPECT_EQ(check(fx, R"({"mode": "factual", "constraints": {}, "behavior": "!d", "keyframe": 0})").verdict, Verdict::False);
}

TEST(BruteForce, RawAtomsFilterTheDomain) {
  const auto fx = threshold();
  const auto r = check(fx, R"({"mode": "would", "constraints": {"x": {"raw": "x % 2 != 0"}}, "behavior": "d", "keyframe": 0})");
  // odd values of int<4> other than 5
  EXPECT_EQ(r.family_size, 7u);
  EXPECT_EQ(r.witness->at("x").as_signed(4), -7);
}

TEST(BruteForce, RefusesWhatItCannotEnumerate) {
  auto p = declang::parse_program("env x: float64;\nenv n: int<16>;\ndecision d: bool = false;\nd := x > 1.0;\n");
  auto t = parse_trace_log(R"({"t": 0, "vars": {"x": 2.0, "n": 0, "d": true}})", p.catalog);
  const test::Loaded fx{std::move(p), std::move(t)};
  EXPECT_EQ(error_of([&] { (void)check(fx, R"({"mode": "would", "constraints": {"x": "free"}, "behavior": "d", "keyframe": 0})"); }),
            Errc::DomainTooLarge);
  EXPECT_EQ(error_of([&] {
              (void)check(fx, R"({"mode": "would", "constraints": {"x": {"range": [1.0, 3.0]}}, "behavior": "d", "keyframe": 0})");
            }),
            Errc::DomainTooLarge);
  EXPECT_EQ(error_of([&] { (void)check(fx, R"({"mode": "would", "constraints": {"n": "free"}, "behavior": "d", "keyframe": 0})", 1000); }),
            Errc::DomainTooLarge);
  const auto small = check(fx, R"({"mode": "would", "constraints": {"x": {"in": [2.0, 0.5, -0.0]}, "n": {"range": [-2, 2]}}, "behavior": "d", "keyframe": 0})");
  EXPECT_EQ(small.family_size, 14u);
  EXPECT_EQ(small.verdict, Verdict::False);
}

TEST(BruteForce, ExecutionFailuresPropagate) {
  auto p = declang::parse_program("env x: int<4>;\ndecision d: int<4> = 0;\nd := 6 / x;\n");
  auto t = parse_trace_log(R"({"t": 0, "vars": {"x": 3, "d": 2}})", p.catalog);
  const test::Loaded fx{std::move(p), std::move(t)};
  EXPECT_EQ(error_of([&] { (void)check(fx, R"({"mode": "might", "constraints": {"x": "free"}, "behavior": "d == 2", "keyframe": 0})"); }),
            Errc::ArithmeticFault);
  EXPECT_EQ(check(fx, R"({"mode": "might", "constraints": {"x": {"range": [1, 7]}}, "behavior": "d == 2", "keyframe": 0})").verdict,
            Verdict::False);
}
