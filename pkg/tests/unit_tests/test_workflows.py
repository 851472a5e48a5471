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

import cmath
import json
import math

import pytest
from _pytest.logging import LogCaptureFixture

from itebasis.config import RunConfig
from itebasis.errors import DegenerateDeterminant, DomainError
from itebasis.workflows import (
    cmd_basis,
    cmd_eval,
    cmd_expand,
    cmd_grid,
    cmd_indicator,
    cmd_spectrum,
    cmd_strips,
)

SMALL_SEARCH = {"re_min": 0.1, "re_max": 10.0, "im_min": -1.0, "im_max": 1.0}


def _config(n0: float = 4.0, **sections) -> RunConfig:
    data = {"profile": {"kind": "constant", "n0": n0}, "search": SMALL_SEARCH}
    data.update(sections)
    return RunConfig.from_dict(data)


def _read(path) -> dict:
    with open(path) as f:
        return json.load(f)


class TestCmdEval:
    def test_report(self, tmp_path, reproducible_env):
        out = tmp_path / "eval.json"
        envelope = cmd_eval(_config(), k=3 + 0.5j, out=str(out))
        report = _read(out)
        assert report == json.loads(envelope.dumps())
        assert report["command"] == "eval"
        assert report["generated_at"] == "1970-01-01T00:00:00Z"
        payload = report["payload"]
        assert payload["k"] == [3.0, 0.5]
        assert payload["B"] == pytest.approx(2.0)
        assert set(payload["asymptotic"]) == {"full", "reduced"}
        assert payload["eigenpair"] is None
        # D0 = -sin(k)^3/k for n = 4
        expected = -(cmath.sin(3 + 0.5j) ** 3) / (3 + 0.5j)
        re, im = payload["d0"]["value"]
        assert complex(re, im) == pytest.approx(expected, rel=1e-8)

    def test_k_from_config(self, tmp_path):
        out = tmp_path / "eval.json"
        cmd_eval(_config(eval={"k": [2.0, -1.0]}), out=str(out))
        assert _read(out)["payload"]["k"] == [2.0, -1.0]

    def test_degenerate(self, caplog: LogCaptureFixture):
        with pytest.raises(DegenerateDeterminant):
            cmd_eval(_config(n0=1.0), k=3.0)
        assert "cmd_eval failed" in caplog.text


class TestSearchCommands:
    def test_spectrum(self, tmp_path):
        csv_path, out = tmp_path / "zeros.csv", tmp_path / "spectrum.json"
        cmd_spectrum(_config(), out=str(out), csv_path=str(csv_path))
        rows = csv_path.read_text().splitlines()
        assert rows[0] == "re,im,residual,multiplicity"
        assert len(rows) == 4
        assert rows[1].startswith("3.14159265")
        assert rows[1].endswith(",3")
        spectrum = _read(out)["payload"]["spectrum"]
        assert spectrum["winding"] == 9
        assert spectrum["complete"]

    def test_csv_from_config(self, tmp_path):
        csv_path = tmp_path / "zeros.csv"
        config = _config(output={"csv": str(csv_path), "json": str(tmp_path / "s")})
        cmd_spectrum(config)
        assert csv_path.exists()

    def test_strips(self, tmp_path):
        out = tmp_path / "strips.json"
        config = _config(
            strips={"T": 1.0, "s": 5.0, "K": 0.5},
            separation={"exclusion_radius": 4.0},
        )
        cmd_strips(config, out=str(out))
        payload = _read(out)["payload"]
        assert payload["strips"]["total"] == 3
        assert payload["separation"]["delta"] == pytest.approx(math.pi / 2, rel=1e-6)
        assert len(payload["separation"]["anomalies"]) == 2

    def test_basis(self, tmp_path, caplog: LogCaptureFixture):
        out = tmp_path / "basis.json"
        cmd_basis(_config(basis={"N": [6, 12, 40]}), out=str(out))
        payload = _read(out)["payload"]
        assert payload["system_size"] == 18
        assert [row["N"] for row in payload["frame"]["rows"]] == [6, 12]
        assert "exceed the 18 available functions" in caplog.text


def test_indicator(tmp_path):
    out = tmp_path / "indicator.json"
    cmd_indicator(
        _config(indicator={"thetas": [math.pi / 2], "radii": [10.0, 20.0, 40.0]}),
        out=str(out),
    )
    (report,) = _read(out)["payload"]["indicators"]
    assert report["theta"] == pytest.approx(math.pi / 2)


def test_grid(tmp_path):
    csv_path = tmp_path / "grid.csv"
    envelope = cmd_grid(_config(grid={"points": 16}), csv_path=str(csv_path))
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "r,re_f,im_f"
    assert len(rows) == 17
    assert all(row.endswith(",0,0") for row in rows[1:])
    assert envelope.payload["a"] == pytest.approx(3.0)
    assert envelope.payload["weight_sum"] == pytest.approx(6.0)


class TestCmdExpand:
    def test_needs_samples(self):
        with pytest.raises(DomainError, match="needs a samples file"):
            cmd_expand(_config())

    def test_expands_grid_samples(self, tmp_path):
        samples = tmp_path / "samples.csv"
        cmd_grid(_config(grid={"points": 64}), csv_path=str(samples))
        out = tmp_path / "expand.json"
        cmd_expand(_config(expand={"N": 6}), samples=str(samples), out=str(out))
        expansion = _read(out)["payload"]["expansion"]
        # the template holds f = 0
        assert expansion["N"] == 6
        assert all(c == [0.0, 0.0] for c in expansion["coefficients"])
