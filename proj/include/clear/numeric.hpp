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

#include <cmath>
#include <cstdint>

namespace clear {

inline constexpr std::uint64_t kFloatSignBit = std::uint64_t{1} << 63;
/// Positive quiet NaN; the only NaN the solver can describe.
inline constexpr std::uint64_t kCanonicalNaN = 0x7FF8000000000000ULL;

/// Bounds of the doubles that convert to a width-w integer without
/// overflow under round-toward-zero. The lower bound is exclusive when
/// `lower_strict`, inclusive otherwise; the upper bound is always exclusive.
struct FloatIntRange {
  double lower;
  bool lower_strict;
  double upper;
};

inline FloatIntRange float_int_range(int width, bool is_signed) {
  if (!is_signed) return {-1.0, true, std::ldexp(1.0, width)};
  const double min = -std::ldexp(1.0, width - 1);
  // min - 1 is representable up to 53 bits of magnitude.
  if (width <= 53) return {min - 1.0, true, -min};
  return {min, false, -min};
}

inline bool float_fits_int(double d, int width, bool is_signed) {
  const auto r = float_int_range(width, is_signed);
  const bool lower_ok = r.lower_strict ? d > r.lower : d >= r.lower;
  return lower_ok && d < r.upper;
}

}  // namespace clear
