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

#include "clear/brute_force.hpp"

#include "clear/error.hpp"

namespace clear {

namespace {

std::vector<Value> whole_domain(const VarDecl& d, std::uint64_t cap) {
  const auto n = d.domain.cardinality();
  if (!n || *n > cap) throw Error(Errc::DomainTooLarge, "domain of '" + d.name + "' is too large to enumerate");
  std::vector<Value> out;
  out.reserve(*n);
  for (std::uint64_t i = 0; i < *n; ++i) out.push_back(d.domain.nth(i));
  return out;
}

std::vector<Value> candidates(const VarCatalog& catalog, const VarDecl& d, const AtomicConstraint& a,
                              std::uint64_t cap) {
  switch (a.kind) {
    case AtomKind::Eq: return {a.value};
    case AtomKind::Member: return a.members;
    case AtomKind::Free: return whole_domain(d, cap);
    case AtomKind::Range: {
      if (!d.domain.is_int()) throw Error(Errc::DomainTooLarge, "float range on '" + d.name + "'");
      const int w = d.domain.width();
      // Order keys: flipping the sign bit makes signed order unsigned.
      const std::uint64_t flip = d.domain.is_signed() ? std::uint64_t{1} << (w - 1) : 0;
      std::uint64_t first = a.lo.bits() ^ flip;
      std::uint64_t last = a.hi.bits() ^ flip;
      if (a.lo_open && first++ == low_mask(w)) return {};
      if (a.hi_open && last-- == 0) return {};
      if (last < first) return {};
      if (last - first >= cap) throw Error(Errc::DomainTooLarge, "range on '" + d.name + "' is too large to enumerate");
      std::vector<Value> out;
      for (std::uint64_t k = first;; ++k) {
        out.push_back(Value::int_bits(k ^ flip, w));
        if (k == last) break;
      }
      return out;
    }
    case AtomKind::Raw: {
      std::vector<Value> out;
      ConcreteState s;
      for (const auto& v : whole_domain(d, cap)) {
        s.set(d.name, v);
        if (eval_atom(catalog, a, s)) out.push_back(v);
      }
      return out;
    }
  }
  return {};
}

}  // namespace

BruteForceResult brute_force_check(const declang::Program& program, const Trace& trace, const Query& q,
                                   std::uint64_t cap) {
  const auto& catalog = program.catalog;
  const auto inputs = catalog.select(Projection::Inputs);
  std::vector<std::vector<Value>> sets;
  std::uint64_t product = 1;
  for (const auto* d : inputs) {
    sets.push_back(candidates(catalog, *d, *q.scenario.find(d->name), cap));
    if (sets.back().empty()) {
      product = 0;
    } else if (product != 0) {
      if (product > cap / sets.back().size()) throw Error(Errc::DomainTooLarge, "family exceeds enumeration cap");
      product *= sets.back().size();
    }
  }

  std::optional<ConcreteState> factual;
  if (q.mode == QueryMode::Factual) {
    validate_factual_scenario(catalog, q.scenario, trace, q.keyframe);
  } else {
    factual = restrict(catalog, state_at(trace, q.keyframe), Projection::Inputs);
    puncture(catalog, q.scenario, *factual);
  }

  BruteForceResult r;
  const bool want = q.mode == QueryMode::Might;  // might looks for b, the others for !b
  std::vector<std::size_t> idx(sets.size(), 0);
  for (std::uint64_t n = 0; n < product; ++n) {
    ConcreteState s;
    for (std::size_t i = 0; i < inputs.size(); ++i) s.set(inputs[i]->name, sets[i][idx[i]]);
    for (std::size_t i = sets.size(); i-- > 0;) {
      if (++idx[i] < sets[i].size()) break;
      idx[i] = 0;
    }
    // Every point runs, the factual one included, so an execution failure
    // anywhere under the relaxation surfaces as it does symbolically.
    const bool b = witness_replay(program, s, q.behavior, q.budget);
    if (factual && s == *factual) continue;
    ++r.family_size;
    if (b == want && !r.witness) r.witness = std::move(s);
  }

  if (r.family_size == 0) {
    r.verdict = Verdict::EmptyFamily;
  } else if (want) {
    r.verdict = r.witness ? Verdict::True : Verdict::False;
  } else {
    r.verdict = r.witness ? Verdict::False : Verdict::True;
  }
  return r;
}

}  // namespace clear
