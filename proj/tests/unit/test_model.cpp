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

#include <gtest/gtest.h>

#include "clear/trace.hpp"
#include "support/common.hpp"

using namespace clear;
using clear::test::error_of;

namespace {

VarCatalog crash_catalog() {
  return VarCatalog({
      {"agent1_pos_x", VarClass::Environment, Domain::float64()},
      {"agent1_signal", VarClass::Environment, Domain::enumeration("Signal", {"STRAIGHT", "LEFT", "RIGHT"})},
      {"speed", VarClass::State, Domain::integer(8, true)},
      {"move", VarClass::Decision, Domain::integer(1, false)},
  });
}

}  // namespace

TEST(Trace, SingleRecordKeepsFloatBits) {
  const auto cat = crash_catalog();
  const auto t = parse_trace_log(
      R"({"t": 0, "vars": {"agent1_pos_x": 1.376, "agent1_signal": "RIGHT", "speed": -3, "move": 1}})", cat);
  ASSERT_EQ(t.length(), 1u);
  EXPECT_EQ(state_at(t, 0).at("agent1_pos_x").bits(), std::bit_cast<std::uint64_t>(1.376));
  EXPECT_EQ(state_at(t, 0).at("agent1_signal"), Value::enum_code(2));
  EXPECT_EQ(state_at(t, 0).at("speed").as_signed(8), -3);
}

TEST(Trace, Errors) {
  const auto cat = crash_catalog();
  EXPECT_EQ(error_of([&] { (void)parse_trace_log("\n  \n", cat); }), Errc::EmptyTrace);
  EXPECT_EQ(error_of([&] {
              (void)parse_trace_log(
                  R"({"t": 0, "vars": {"agent1_pos_x": 1.0, "agent1_signal": "LEFT", "speed": 0, "move": 0, "ghost": 1}})",
                  cat);
            }),
            Errc::UnknownVariable);
  EXPECT_EQ(error_of([&] {
              (void)parse_trace_log(R"({"t": 0, "vars": {"agent1_pos_x": 1.0, "agent1_signal": "LEFT", "speed": 0}})", cat);
            }),
            Errc::MissingVariable);
  EXPECT_EQ(error_of([&] {
              (void)parse_trace_log(
                  R"({"t": 0, "vars": {"agent1_pos_x": 1.0, "agent1_signal": "LEFT", "speed": 200, "move": 0}})", cat);
            }),
            Errc::DomainViolation);
  EXPECT_EQ(error_of([&] {
              (void)parse_trace_log(
                  R"({"t": 1, "vars": {"agent1_pos_x": 1.0, "agent1_signal": "LEFT", "speed": 0, "move": 0}})", cat);
            }),
            Errc::NonMonotonicStep);
  EXPECT_EQ(error_of([&] { (void)parse_trace_log("{not json", cat); }), Errc::MalformedLog);
}

TEST(Trace, MetaIsIgnored) {
  const auto cat = crash_catalog();
  const auto t = parse_trace_log(
      R"({"t": 0, "vars": {"agent1_pos_x": 2.0, "agent1_signal": "LEFT", "speed": 0, "move": 0}, "meta": {"note": "x"}})",
      cat);
  EXPECT_EQ(t.length(), 1u);
}

TEST(Trace, StateAtBounds) {
  const auto cat = crash_catalog();
  const auto t = parse_trace_log(R"({"t": 0, "vars": {"agent1_pos_x": 2.0, "agent1_signal": "LEFT", "speed": 0, "move": 0}})"
                                 "\n"
                                 R"({"t": 1, "vars": {"agent1_pos_x": 1.5, "agent1_signal": "LEFT", "speed": 1, "move": 1}})",
                                 cat);
  EXPECT_EQ(state_at(t, 0).at("speed").as_signed(8), 0);
  EXPECT_EQ(state_at(t, 1).at("move").bits(), 1u);
  EXPECT_EQ(error_of([&] { (void)state_at(t, 2); }), Errc::StepOutOfRange);
}

TEST(Trace, SerializeRoundTripsSpecialFloats) {
  const auto cat = crash_catalog();
  std::vector<ConcreteState> steps;
  for (double x : {-0.0, 0.0, 5e-324, double(INFINITY), -double(INFINITY), 1.376}) {
    ConcreteState s;
    s.set("agent1_pos_x", Value::float64(x));
    s.set("agent1_signal", Value::enum_code(0));
    s.set("speed", Value::int_bits(static_cast<std::uint64_t>(-128), 8));
    s.set("move", Value::int_bits(0, 1));
    steps.push_back(s);
  }
  ConcreteState nan = steps[0];
  nan.set("agent1_pos_x", Value::float_bits(0x7FF8000000000001ULL));
  steps.push_back(nan);
  const Trace t(steps);
  const auto again = parse_trace_log(serialize_trace_log(t, cat), cat);
  EXPECT_EQ(again, t);
}

TEST(Restrict, Projections) {
  const auto cat = crash_catalog();
  ConcreteState s;
  s.set("agent1_pos_x", Value::float64(1.376));
  s.set("agent1_signal", Value::enum_code(2));
  s.set("speed", Value::int_bits(4, 8));
  s.set("move", Value::int_bits(1, 1));
  EXPECT_EQ(restrict(cat, s, Projection::Inputs).size(), 3u);
  EXPECT_EQ(restrict(cat, s, Projection::Decision).size(), 1u);
  EXPECT_EQ(restrict(cat, s, Projection::Environment).size(), 2u);
  const auto in = restrict(cat, s, Projection::Inputs);
  EXPECT_EQ(restrict(cat, in, Projection::Inputs), in);
  ConcreteState partial;
  partial.set("move", Value::int_bits(1, 1));
  EXPECT_EQ(error_of([&] { (void)restrict(cat, partial, Projection::Inputs); }), Errc::MissingVariable);
}

TEST(Domain, EnumerationOrderAndCardinality) {
  const auto i3 = Domain::integer(3, true);
  ASSERT_EQ(i3.cardinality(), 8u);
  EXPECT_EQ(i3.nth(0).as_signed(3), -4);
  EXPECT_EQ(i3.nth(7).as_signed(3), 3);
  EXPECT_EQ(Domain::enumeration("E", {"a", "b", "c"}).width(), 2);
  EXPECT_EQ(Domain::enumeration("E", {"a"}).width(), 1);
  EXPECT_FALSE(Domain::float64().cardinality().has_value());
  EXPECT_FALSE(Domain::integer(64, false).cardinality().has_value());
}

TEST(Catalog, Validation) {
  EXPECT_EQ(error_of([] { VarCatalog({{"x", VarClass::Environment, Domain::boolean()}}); }), Errc::InvalidCatalog);
  EXPECT_EQ(error_of([] {
              VarCatalog({{"x", VarClass::Environment, Domain::boolean()}, {"x", VarClass::Decision, Domain::boolean()}});
            }),
            Errc::InvalidCatalog);
  const auto cat = crash_catalog();
  EXPECT_EQ(catalog_from_json(catalog_to_json(cat)), cat);
}

TEST(Values, JsonForms) {
  const auto f = Domain::float64();
  EXPECT_EQ(value_from_json(Json::parse(R"({"bits": "8000000000000000"})"), f).bits(), 0x8000000000000000ULL);
  EXPECT_EQ(value_from_json(Json::parse(R"("inf")"), f).as_double(), INFINITY);
  EXPECT_EQ(error_of([&] { (void)value_from_json(Json::parse("3"), Domain::integer(2, true)); }), Errc::DomainViolation);
  EXPECT_EQ(error_of([&] { (void)value_from_json(Json::parse("-1"), Domain::integer(4, false)); }), Errc::DomainViolation);
  EXPECT_EQ(error_of([&] { (void)value_from_json(Json::parse(R"("UP")"), Domain::enumeration("E", {"a"})); }),
            Errc::DomainViolation);
}
