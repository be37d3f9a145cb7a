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

#include "clear/trace.hpp"

#include "clear/error.hpp"

namespace clear {

const ConcreteState& state_at(const Trace& trace, std::size_t t) {
  if (t >= trace.length()) {
    throw Error(Errc::StepOutOfRange,
                "step " + std::to_string(t) + " outside trace of length " + std::to_string(trace.length()));
  }
  return trace.steps()[t];
}

Trace parse_trace_log(std::string_view text, const VarCatalog& catalog) {
  std::vector<ConcreteState> steps;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const auto where = "line " + std::to_string(line_no) + ": ";
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(Errc::MalformedLog, where + e.what());
    }
    if (!record.is_object()) throw Error(Errc::MalformedLog, where + "record is not an object");
    for (const auto& [key, _] : record.items()) {
      if (key != "t" && key != "vars" && key != kLogMetaKey) {
        throw Error(Errc::MalformedLog, where + "unexpected key '" + key + "'");
      }
    }
    if (!record.contains("t") || !record["t"].is_number_integer()) {
      throw Error(Errc::MalformedLog, where + "missing integer step index 't'");
    }
    if (!record.contains("vars")) throw Error(Errc::MalformedLog, where + "missing 'vars'");

    const auto t = record["t"].get<std::int64_t>();
    if (t != static_cast<std::int64_t>(steps.size())) {
      throw Error(Errc::NonMonotonicStep,
                  where + "expected step " + std::to_string(steps.size()) + ", found " + std::to_string(t));
    }
    try {
      auto state = state_from_json(catalog, record["vars"]);
      check_state(catalog, state, Projection::All);
      steps.push_back(std::move(state));
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
  }
  if (steps.empty()) throw Error(Errc::EmptyTrace, "log contains no records");
  return Trace(std::move(steps));
}

std::string serialize_trace_log(const Trace& trace, const VarCatalog& catalog) {
  std::string out;
  for (std::size_t t = 0; t < trace.length(); ++t) {
    Json record{{"t", t}, {"vars", state_to_json(catalog, trace.steps()[t])}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

}  // namespace clear
