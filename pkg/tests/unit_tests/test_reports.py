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

import json
import math
from pathlib import Path

import numpy as np
import pytest

from itebasis._version import __version__
from itebasis.errors import ConfigError, DomainError
from itebasis.reports import (
    ReportEnvelope,
    generated_at,
    jsonable,
    read_samples_csv,
    samples_csv,
    spectrum_csv,
    summarize,
    write_text,
)
from itebasis.zeros import Box, Spectrum, ZeroRecord

EXPECTED = Path(__file__).parent / "expected_reports"


def _expected(name: str) -> str:
    return (EXPECTED / name).read_text()


def test_spectrum_csv():
    spectrum = Spectrum(
        records=[
            ZeroRecord(3.0 + 0.25j, 0.125, multiplicity=3),
            ZeroRecord(1.5 + 0j, 0.5),
        ],
        region=Box(1.0, 4.0, -1.0, 1.0),
        fingerprint="",
        B=1.0,
    )
    assert spectrum_csv(spectrum) == _expected("spectrum.csv")


def test_spectrum_csv_keeps_full_precision():
    spectrum = Spectrum([ZeroRecord(math.pi + 0j, 0.0)], Box(1, 4, -1, 1), "", 1.0)
    row = spectrum_csv(spectrum).splitlines()[1]
    assert float(row.split(",")[0]) == math.pi


def test_samples_csv():
    text = samples_csv(np.array([-0.5, 0.25]), np.array([1.0, -2.0 + 0.5j]))
    assert text == _expected("samples.csv")


def test_read_samples_csv():
    r, f = read_samples_csv(str(EXPECTED / "samples.csv"))
    assert r.tolist() == [-0.5, 0.25]
    assert f.tolist() == [1.0 + 0j, -2.0 + 0.5j]


@pytest.mark.parametrize(
    ["text", "match"],
    [
        ("x,y,z\n1,2,3\n", "must start with the header"),
        ("r,re_f,im_f\n", "has no rows"),
        ("r,re_f,im_f\n1,2\n", "three columns"),
        ("r,re_f,im_f\n1,two,3\n", "non-numeric"),
    ],
)
def test_read_samples_csv_errors(tmp_path, text, match):
    path = tmp_path / "samples.csv"
    path.write_text(text)
    with pytest.raises(DomainError, match=match):
        read_samples_csv(str(path))


def test_read_samples_csv_missing(tmp_path):
    with pytest.raises(ConfigError, match="Could not read"):
        read_samples_csv(str(tmp_path / "absent.csv"))


def test_jsonable():
    value = {
        "z": 1 + 2j,
        "arr": np.array([1.5, np.inf]),
        "n": np.int64(3),
        "flag": np.bool_(True),
        "nan": float("nan"),
        "nested": (np.float64(0.5), None, "text"),
    }
    assert jsonable(value) == {
        "z": [1.0, 2.0],
        "arr": [1.5, None],
        "n": 3,
        "flag": True,
        "nan": None,
        "nested": [0.5, None, "text"],
    }


def test_jsonable_uses_to_dict():
    assert jsonable([Box(0.0, 1.0, -1.0, 1.0)]) == [
        {"re_min": 0.0, "re_max": 1.0, "im_min": -1.0, "im_max": 1.0}
    ]


class TestEnvelope:
    def test_reproducible_timestamp(self, reproducible_env):
        assert generated_at() == "1970-01-01T00:00:00Z"

    def test_bad_epoch(self, monkeypatch: pytest.MonkeyPatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "yesterday")
        with pytest.raises(ConfigError, match="SOURCE_DATE_EPOCH"):
            generated_at()

    def test_dumps(self, reproducible_env):
        envelope = ReportEnvelope(
            command="eval",
            config={"seed": 0},
            profile_fingerprint="0123456789abcdef",
            payload={"k": 2 + 1j, "bad": float("inf")},
        )
        text = envelope.dumps()
        assert text.endswith("}\n")
        out = json.loads(text)
        assert out == {
            "tool": "itebasis",
            "version": __version__,
            "command": "eval",
            "config": {"seed": 0},
            "profile_fingerprint": "0123456789abcdef",
            "generated_at": "1970-01-01T00:00:00Z",
            "payload": {"bad": None, "k": [2.0, 1.0]},
        }

    def test_identical_runs_give_identical_text(self, reproducible_env):
        def make():
            return ReportEnvelope("grid", {}, "fp", {"a": 3.0}).dumps()

        assert make() == make()


def test_write_text(tmp_path, capsys: pytest.CaptureFixture):
    write_text("a,b\n", None, "CSV")
    assert capsys.readouterr().out == "a,b\n"
    path = tmp_path / "out.csv"
    write_text("a,b\n", str(path), "CSV")
    assert path.read_text() == "a,b\n"


def test_summarize():
    payload = {
        "checks": [
            {"name": "symmetry", "passed": True},
            {"name": "density", "passed": False},
        ]
    }
    assert summarize("validate", payload) == "1 of 2 checks passed. Failed: density."
    assert summarize("grid", {"b": 1, "a": 2}) == "grid report with keys ['a', 'b']"
