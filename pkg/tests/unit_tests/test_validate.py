# Copyright (c) 2026, The itebasis authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

from itebasis.config import RunConfig
from itebasis.validate import (
    _Context,
    _frame_bounds,
    _winding_partition,
    _z_expansion_slopes,
)
from itebasis.zeros import Box, Spectrum, ZeroFinder, ZeroRecord

SMALL_SEARCH = {"re_min": 0.1, "re_max": 10.0, "im_min": -1.0, "im_max": 1.0}


def _context(profile: dict) -> _Context:
    config = RunConfig.from_dict({"profile": profile, "search": SMALL_SEARCH})
    return _Context(config, None)


@pytest.fixture
def constant_context() -> _Context:
    ctx = _context({"kind": "constant", "n0": 4.0})
    records = [
        ZeroRecord(k=complex(j * math.pi, 0.0), residual=0.0, multiplicity=3)
        for j in (1, 2, 3)
    ]
    # the known zeros stand in for a located spectrum
    ctx.__dict__["spectrum"] = Spectrum(
        records, Box(0.1, 10.0, -1.0, 1.0), ctx.profile.fingerprint(), B=2.0
    )
    return ctx


class TestWindingPartition:
    def test_counts_add_up(self, constant_context):
        passed, detail = _winding_partition(constant_context)
        assert passed
        assert detail["whole"] == 6 and detail["attempt"] == 0

    def test_collision_shifts_the_lines(self, constant_context, monkeypatch):
        original = ZeroFinder.winding_counts
        calls = []

        def first_collides(self, boxes):
            calls.append(len(boxes))
            if len(calls) == 1:
                return [None] * len(boxes)
            return original(self, boxes)

        monkeypatch.setattr(ZeroFinder, "winding_counts", first_collides)
        passed, detail = _winding_partition(constant_context)
        assert passed
        assert detail["attempt"] == 1 and detail["shift"] > 0
        assert detail["whole"] == 6

    def test_every_shift_collides(self, constant_context, monkeypatch):
        monkeypatch.setattr(
            ZeroFinder, "winding_counts", lambda self, boxes: [None] * len(boxes)
        )
        passed, detail = _winding_partition(constant_context)
        assert not passed
        assert "every shifted partition" in detail["message"]


def test_frame_bounds(constant_context):
    passed, detail = _frame_bounds(constant_context)
    reference = detail["constant_four"]
    assert [row["N"] for row in reference["rows"]] == [20, 40, 80, 160]
    assert reference["lower_bounded"] and reference["upper_bounded"]
    assert [row["N"] for row in detail["rows"]] == [18]
    assert passed


def test_z_expansion_slopes():
    ctx = _context({"kind": "smooth_bump", "amplitude": 3.0, "power": 3})
    passed, detail = _z_expansion_slopes(ctx)
    assert passed
    assert detail["relative_error_40i"] <= 1e-3
    assert -6.0 <= detail["slopes"]["z_order2"] <= -8.0 / 3.0
    assert detail["constants"]["z_order2"] > 0


def test_z_expansion_exact_for_constant(constant_context):
    passed, detail = _z_expansion_slopes(constant_context)
    assert passed and detail["max_error"] < 1e-9
