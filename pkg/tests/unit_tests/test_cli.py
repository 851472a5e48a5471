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

import argparse
import json

import pytest

from itebasis.cli import _parse_k, build_parser, main

CONSTANT4 = 'profile={"kind": "constant", "n0": 4}'
SMALL_SEARCH = 'search={"re_min": 0.1, "re_max": 10, "im_min": -1, "im_max": 1}'


@pytest.mark.parametrize(
    ["text", "expected"],
    [("3+0.5i", 3 + 0.5j), ("2", 2 + 0j), ("-1 - 2i", -1 - 2j), ("4j", 4j)],
)
def test_parse_k(text, expected):
    assert _parse_k(text) == expected


def test_parse_k_rejects_garbage():
    with pytest.raises(argparse.ArgumentTypeError, match="not a complex number"):
        _parse_k("three")


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_eval(tmp_path):
    out = tmp_path / "eval.json"
    code = main(["eval", "--k", "3+0.5i", "--set", CONSTANT4, "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["payload"]["k"] == [3.0, 0.5]


def test_config_file_and_seed(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"profile": {"kind": "constant", "n0": 2}}))
    out = tmp_path / "eval.json"
    assert main(["eval", "-c", str(config), "--seed", "3", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["config"]["seed"] == 3
    assert report["config"]["profile"] == {"kind": "constant", "n0": 2.0}


def test_spectrum(tmp_path):
    csv_path = tmp_path / "zeros.csv"
    argv = ["spectrum", "--set", CONSTANT4, "--set", SMALL_SEARCH, "--workers", "2"]
    argv += ["--csv", str(csv_path), "--out", str(tmp_path / "s.json")]
    assert main(argv) == 0
    assert csv_path.read_text().splitlines()[1].startswith("3.14159265")


def test_grid_to_stdout(capsys: pytest.CaptureFixture):
    assert main(["grid", "--set", CONSTANT4, "--set", "grid.points=8"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "r,re_f,im_f"
    assert len(rows) == 9


@pytest.mark.parametrize(
    ["argv", "code"],
    [
        (["eval", "--set", 'profile={"kind": "constant", "n0": 1}'], 5),
        (["eval", "--set", "strips.T=-1"], 2),
        (["eval", "--set", "nonsense=1"], 2),
        (["expand", "--samples", "/nonexistent/samples.csv"], 2),
        (["spectrum", "--set", CONSTANT4, "--set", "search.re_min=-1"], 2),
    ],
)
def test_exit_codes(argv, code):
    assert main(argv) == code
