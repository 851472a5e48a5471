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

import pytest
from _pytest.fixtures import SubRequest

from itebasis.profile import (
    ConstantProfile,
    RadialProfile,
    SmoothBumpProfile,
    SplineGridProfile,
)


@pytest.fixture
def profile(request: SubRequest) -> RadialProfile:
    """Builds the requested profile.

    You can do @pytest.mark.parametrize("profile", ["constant4", "bump"], indirect=True)
    to parametrize this fixture.
    """
    kind = request.param

    if kind == "constant4":
        return ConstantProfile(4.0)
    elif kind == "constant2":
        return ConstantProfile(2.0)
    elif kind == "unit":
        return ConstantProfile(1.0)
    elif kind == "bump":
        return SmoothBumpProfile(amplitude=3.0, power=3)
    elif kind == "spline":
        # samples of the bump, clamped so that n' = 0 at both ends
        r = [i / 16 for i in range(17)]
        n = [1.0 + 3.0 * (1.0 - x**2) ** 3 for x in r]
        return SplineGridProfile(r=tuple(r), n=tuple(n), boundary="clamped")

    raise ValueError(f"unknown profile fixture {kind}")


@pytest.fixture
def reproducible_env(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    monkeypatch.delenv("ITEBASIS_WORKERS", raising=False)


@pytest.fixture
def workers_env(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("ITEBASIS_WORKERS", "3")
