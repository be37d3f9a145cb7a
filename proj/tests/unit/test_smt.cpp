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

#include <bit>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "clear/numeric.hpp"
#include "clear/smt.hpp"
#include "support/common.hpp"

using namespace clear;
using namespace clear::smt;
using clear::test::error_of;

namespace {

std::uint64_t fbits(double d) { return std::bit_cast<std::uint64_t>(d); }

// Ask the solver for r = op(a, b) with constant operands and read r back.
std::uint64_t solve_fp(Solver& solver, Op op, double a, double b) {
  SymbolTable t;
  const auto r = t.declare("r", Sort::fp());
  const auto lhs = mk_sym("a", Sort::fp());
  t.declare("a", Sort::fp());
  t.declare("b", Sort::fp());
  const auto rhs = mk_sym("b", Sort::fp());
  const auto script = emit_smt(t,
                               {mk_eq(lhs, mk_fp(fbits(a))), mk_eq(rhs, mk_fp(fbits(b))),
                                mk_eq(r, mk_app(op, {lhs, rhs}))},
                               {"r"});
  const auto res = solver.check_sat(script, t);
  EXPECT_EQ(res.verdict, SatResult::Sat);
  return res.model.at("r")->bits;
}

}  // namespace

TEST(Literals, BitPatterns) {
  EXPECT_EQ(bv_literal(5, 4), "#x5");
  EXPECT_EQ(bv_literal(5, 3), "#b101");
  EXPECT_EQ(bv_literal(0xFF, 8), "#xff");
  EXPECT_EQ(fp_literal(fbits(-0.0)), "(fp #b1 #b00000000000 #x0000000000000)");
  EXPECT_EQ(fp_literal(fbits(1.0)), "(fp #b0 #b01111111111 #x0000000000000)");
}

TEST(Fold, SolverDivisionSemantics) {
  const SymbolLookup none;
  auto fold_bits = [&](Op op, std::uint64_t a, std::uint64_t b) {
    return (*fold(mk_app(op, {mk_bv(a, 8), mk_bv(b, 8)}), none))->bits;
  };
  EXPECT_EQ(fold_bits(Op::BvUdiv, 7, 0), 0xFFu);
  EXPECT_EQ(fold_bits(Op::BvUrem, 7, 0), 7u);
  EXPECT_EQ(fold_bits(Op::BvSdiv, 7, 0), 0xFFu);
  EXPECT_EQ(fold_bits(Op::BvSdiv, 0xF9, 0), 1u);  // -7 / 0
  EXPECT_EQ(fold_bits(Op::BvSrem, 0xF9, 0), 0xF9u);
  EXPECT_EQ(fold_bits(Op::BvSdiv, 0x80, 0xFF), 0x80u);
  EXPECT_EQ(fold_bits(Op::BvSrem, 0xF9, 2), 0xFFu);
}

TEST(Fold, FloatsRoundToNearestEven) {
  const SymbolLookup none;
  const auto sum = fold(mk_app(Op::FpAdd, {mk_fp(fbits(0.1)), mk_fp(fbits(0.2))}), none);
  volatile double a = 0.1;
  volatile double b = 0.2;
  EXPECT_EQ((*sum)->bits, fbits(a + b));
  const auto nan = fold(mk_app(Op::FpDiv, {mk_fp(fbits(0.0)), mk_fp(fbits(0.0))}), none);
  EXPECT_EQ((*nan)->bits, kCanonicalNaN);
  EXPECT_TRUE((*fold(mk_app(Op::FpEq, {mk_fp(fbits(0.0)), mk_fp(fbits(-0.0))}), none))->is_true());
  EXPECT_TRUE((*fold(mk_eq(mk_fp(fbits(0.0)), mk_fp(fbits(-0.0))), none))->is_false());
  EXPECT_FALSE(fold(mk_sym("x", Sort::fp()), none).has_value());
}

TEST(Emit, DeclaresOnlyReachableSymbolsInTableOrder) {
  SymbolTable t;
  const auto x = t.declare("x", Sort::bv(8));
  t.declare("unused", Sort::boolean());
  const auto y = t.declare("y", Sort::bv(8));
  const auto d = t.define("d", mk_app(Op::BvAdd, {x, y}));
  const auto s1 = emit_smt(t, {mk_app(Op::BvUlt, {d, mk_bv(3, 8)})}, {"x"});
  const auto s2 = emit_smt(t, {mk_app(Op::BvUlt, {d, mk_bv(3, 8)})}, {"x"});
  EXPECT_EQ(s1.text(), s2.text());
  EXPECT_EQ(s1.text().find("unused"), std::string::npos);
  EXPECT_LT(s1.text().find("declare-const x"), s1.text().find("declare-const y"));
  EXPECT_NE(s1.text().find("(set-logic QF_FPBV)"), std::string::npos);
  EXPECT_NE(s1.text_with_logic("ALL").find("(set-logic ALL)"), std::string::npos);
  EXPECT_EQ(error_of([&] { (void)emit_smt(t, {mk_sym("ghost", Sort::boolean())}, {}); }), Errc::UnboundVariable);
  EXPECT_EQ(error_of([&] { (void)emit_smt(t, {mk_eq(mk_app(Op::BvAdd, {x, mk_fp(0)}), x)}, {}); }),
            Errc::UnsupportedOperation);
  EXPECT_EQ(error_of([&] { (void)emit_smt(t, {x}, {}); }), Errc::UnsupportedOperation);
}

TEST(SExpr, ModelValues) {
  const auto parsed = parse_sexprs("((x (fp #b0 #b01111111111 #x8000000000000)) (y (_ NaN 11 53)) (z (_ -zero 11 53)))");
  ASSERT_EQ(parsed.size(), 1u);
  const auto& items = parsed[0].items;
  EXPECT_EQ(parse_model_value(items[0].items[1], Sort::fp())->bits, fbits(1.5));
  EXPECT_EQ(parse_model_value(items[1].items[1], Sort::fp())->bits, kCanonicalNaN);
  EXPECT_EQ(parse_model_value(items[2].items[1], Sort::fp())->bits, kFloatSignBit);
  EXPECT_EQ(parse_model_value(parse_sexprs("(_ bv13 8)")[0], Sort::bv(8))->bits, 13u);
  EXPECT_EQ(parse_model_value(parse_sexprs("#b101")[0], Sort::bv(3))->bits, 5u);
  EXPECT_EQ(error_of([] { (void)parse_sexprs("((x"); }), Errc::SolverCrash);
}

TEST(Solver, FloatModelIsBitExact) {
  auto solver = test::make_solver();
  CLEAR_REQUIRE_SOLVER(solver);
  SymbolTable t;
  const auto x = t.declare("x", Sort::fp());
  const auto s = emit_smt(t, {mk_eq(x, mk_fp(fbits(1.376)))}, {"x"});
  const auto r = solver.check_sat(s, t);
  ASSERT_EQ(r.verdict, SatResult::Sat);
  EXPECT_EQ(r.model.at("x")->bits, fbits(1.376));

  const auto unsat = emit_smt(t, {mk_app(Op::FpLt, {x, mk_fp(fbits(1.0))}), mk_app(Op::FpLt, {mk_fp(fbits(2.0)), x})}, {});
  EXPECT_EQ(solver.check_sat(unsat, t).verdict, SatResult::Unsat);
}

TEST(Solver, AgreesWithHardwareFloats) {
  auto solver = test::make_solver();
  CLEAR_REQUIRE_SOLVER(solver);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 8; ++i) {
    volatile double a = dist(rng);
    volatile double b = dist(rng);
    EXPECT_EQ(solve_fp(solver, Op::FpAdd, a, b), fbits(a + b));
    EXPECT_EQ(solve_fp(solver, Op::FpMul, a, b), fbits(a * b));
    EXPECT_EQ(solve_fp(solver, Op::FpDiv, a, b), fbits(a / b));
  }
  EXPECT_EQ(solve_fp(solver, Op::FpDiv, 0.0, 0.0), kCanonicalNaN);
}

TEST(Solver, CachesByScriptText) {
  auto solver = test::make_solver();
  CLEAR_REQUIRE_SOLVER(solver);
  SymbolTable t;
  const auto b = t.declare("b", Sort::boolean());
  const auto s = emit_smt(t, {b}, {"b"});
  const auto first = solver.check_sat(s, t);
  const auto again = solver.check_sat(s, t);
  EXPECT_FALSE(first.cached);
  EXPECT_TRUE(again.cached);
  EXPECT_EQ(again.seconds, 0.0);
  EXPECT_EQ(solver.stats().cache_hits, 1u);
  EXPECT_TRUE(again.model.at("b")->is_true());
}

TEST(Solver, Failures) {
  SolverConfig missing;
  missing.path = "/nonexistent/solver-binary";
  Solver none(missing);
  EXPECT_FALSE(none.available());
  SymbolTable t;
  const auto s = emit_smt(t, {mk_bool(true)}, {});
  EXPECT_EQ(error_of([&] { (void)none.check_sat(s, t); }), Errc::SolverUnavailable);

  SolverConfig slow;
  slow.path = "sleep";
  slow.args = {"5"};
  slow.timeout = std::chrono::milliseconds(200);
  Solver sleeper(slow);
  ASSERT_TRUE(sleeper.available());
  EXPECT_EQ(sleeper.check_sat(s, t).verdict, SatResult::Unknown);

  SolverConfig silent;
  silent.path = "true";
  silent.args = {};
  Solver quiet(silent);
  EXPECT_EQ(error_of([&] { (void)quiet.check_sat(s, t); }), Errc::SolverCrash);
}

TEST(Validity, CounterexampleOnInvalid) {
  auto solver = test::make_solver();
  CLEAR_REQUIRE_SOLVER(solver);
  SymbolTable t;
  const auto x = t.declare("x", Sort::bv(4));
  const auto invalid = check_valid(solver, t, mk_app(Op::BvUlt, {x, mk_bv(15, 4)}), {"x"});
  ASSERT_EQ(invalid.verdict, Validity::Invalid);
  EXPECT_EQ(invalid.counterexample.at("x")->bits, 15u);
  const auto valid = check_valid(solver, t, mk_app(Op::BvUle, {x, mk_bv(15, 4)}), {"x"});
  EXPECT_EQ(valid.verdict, Validity::Valid);
}
