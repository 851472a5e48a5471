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

import os

import pytest


@pytest.fixture(autouse=True)
def slow_run(monkeypatch: pytest.MonkeyPatch):
    """Skips the test unless ITEBASIS_RUN_SLOW is set, and pins the report time."""
    if not os.getenv("ITEBASIS_RUN_SLOW"):
        pytest.skip("ITEBASIS_RUN_SLOW not set")
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    monkeypatch.delenv("ITEBASIS_WORKERS", raising=False)
