#!/usr/bin/env python3
# Copyright 2026 The clear Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Decision tables for the fixture programs, computed by a separate Python
transcription of each policy. Floats are written as bit patterns so the
tables compare bit-exactly.

    python3 tools/gen_golden.py fixtures/v1/golden/decisions
"""

import itertools
import json
import struct
import sys
from pathlib import Path

NAN = float("nan")
INF = float("inf")

BOX_LO, BOX_HI = 1.5, 2.1
CLEAR_X, DEEP_X, BAIT = 1.2, 1.8, 1.45


def bits(x):
    return {"bits": format(struct.unpack("<Q", struct.pack("<d", x))[0], "016x")}


def in_box(x, z):
    return BOX_LO <= x <= BOX_HI and BOX_LO <= z <= BOX_HI


def standard(sig, px, row, a2x, a2z):
    if in_box(a2x, a2z):
        return 0
    if row:
        return 1
    if sig == "RIGHT":
        return 1
    return 1 if px < CLEAR_X else 0


def impatient(sig, px, row, a2x, a2z):
    if in_box(a2x, a2z):
        return 0
    if sig == "RIGHT":
        return 1
    return 1 if px <= DEEP_X else 0


def pathological(sig, px, row, a2x, a2z):
    if in_box(a2x, a2z):
        return 0
    if sig == "RIGHT":
        return 1
    if sig == "LEFT":
        return 1 if px < BAIT else 0
    return 0 if px > BAIT else 1


POS_X = [0.0, -0.0, 1.0, 1.1999999999999997, 1.2, 1.2000000000000002, 1.25, 1.376, 1.44, 1.45,
         1.4500000000000002, 1.5, 1.62, 1.8, 1.8000000000000003, 2.0, NAN, INF, -INF]
AGENT2 = [(5.0, 5.0), (1.5, 1.5), (2.1, 2.1), (2.1000000000000005, 1.8), (1.4999999999999998, 1.8),
          (1.316, 0.378), (1.8, 2.2), (NAN, 1.8)]


def intersection_rows(policy):
    rows = []
    for sig, px, row, (a2x, a2z) in itertools.product(["STRAIGHT", "LEFT", "RIGHT"], POS_X, [False, True], AGENT2):
        rows.append({
            "inputs": {
                "agent1_signal": sig,
                "agent1_pos_x": bits(px),
                "agent1_pos_z": bits(1.8),
                "ego_has_right_of_way": row,
                "agent2_pos_x": bits(a2x),
                "agent2_pos_z": bits(a2z),
            },
            "outputs": {"move": policy(sig, px, row, a2x, a2z)},
        })
    return rows


def tree(bmi, glucose, age):
    # NaN fails every comparison and falls to the else branches.
    if bmi <= 26.35:
        return "low" if glucose <= 150.5 else "high"
    if age <= 24.5:
        return "low"
    if glucose <= 99.5:
        return "low"
    return "high"


def bmi_buggy(weight, height):
    return weight / (height * height)


def bmi_corrected(weight, height):
    h = height * 0.0254
    return (weight * 0.45359237) / (h * h)


def health_rows(bmi_fn):
    rows = []
    grid = itertools.product([1.7, 60.0, 64.0, 70.5], [55.0, 120.5, 170.0, 249.973, 300.0],
                             [99.5, 99.50000000000001, 120.0, 150.5, 151.0], [24.5, 25.0, 45.0])
    for height, weight, glucose, age in grid:
        bmi = bmi_fn(weight, height)
        rows.append({
            "inputs": {
                "pregnancies": 2,
                "glucose": bits(glucose),
                "blood_pressure": bits(72.0),
                "skin_thickness": bits(29.0),
                "insulin": bits(94.0),
                "height": bits(height),
                "weight": bits(weight),
                "pedigree": bits(0.47),
                "age": bits(age),
            },
            "outputs": {"bmi": bits(bmi), "class": tree(bmi, glucose, age)},
        })
    return rows


def lpr(t, tb_lng, front):
    active, a_min, a_max = False, 0.0, 0.0
    if tb_lng < 0:
        return False, a_min, a_max
    active = True
    if front:
        return active, -8.0, a_max
    # int<32> subtraction wraps
    diff = (t - 2 + 2**31) % 2**32 - 2**31
    if diff > tb_lng:
        return active, a_min, 3.5
    return active, a_min, -4.0


def lpr_rows():
    rows = []
    values = [-2**31, -2**31 + 1, -5, -1, 0, 1, 2, 3, 4, 7, 2**31 - 1]
    for t, tb, front in itertools.product(values, values, [False, True]):
        active, a_min, a_max = lpr(t, tb, front)
        rows.append({
            "inputs": {"t": t, "tb_lng": tb, "front": front},
            "outputs": {"active": active, "a_min": bits(a_min), "a_max": bits(a_max)},
        })
    return rows


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures/v1/golden/decisions")
    out.mkdir(parents=True, exist_ok=True)
    tables = {
        "intersection_standard": intersection_rows(standard),
        "intersection_impatient": intersection_rows(impatient),
        "intersection_pathological": intersection_rows(pathological),
        "dt_health": health_rows(bmi_buggy),
        "dt_health_corrected": health_rows(bmi_corrected),
        "lpr": lpr_rows(),
    }
    for name, rows in tables.items():
        lines = ",\n".join(json.dumps(r, separators=(",", ":")) for r in rows)
        text = '{"program": "programs/%s.decl", "rows": [\n%s\n]}\n' % (name, lines)
        (out / f"{name}.json").write_text(text)
        print(f"{name}: {len(rows)} rows")


if __name__ == "__main__":
    main()
