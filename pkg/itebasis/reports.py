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

"""Turn results into text: the spectrum CSV, the JSON report envelope and short
summaries for the log.
"""

import csv
import datetime
import io
import json
import math
import os
import textwrap
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np

from ._version import __version__
from .errors import ConfigError, DomainError
from .log import fatal_and_log, log
from .zeros import Spectrum

TOOL = "itebasis"
SPECTRUM_HEADER = ["re", "im", "residual", "multiplicity"]
SAMPLES_HEADER = ["r", "re_f", "im_f"]


def _clean(text: str) -> str:
    """Collapse a dedented multi-line string into one log line."""
    return " ".join(textwrap.dedent(text).split())


def jsonable(value: Any) -> Any:
    """Convert report values into JSON types.

    Complex numbers become ``[re, im]`` pairs, numpy scalars and arrays become
    Python numbers and lists, and non-finite floats become ``None``.
    """
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (complex, np.complexfloating)):
        return [jsonable(value.real), jsonable(value.imag)]
    return value


def generated_at() -> str:
    """UTC timestamp of the report, fixed by SOURCE_DATE_EPOCH when it is set.

    Environment variables
    ---------------------
    SOURCE_DATE_EPOCH
        Seconds since the epoch to stamp reports with, for reproducible output.
    """
    epoch = os.getenv("SOURCE_DATE_EPOCH")
    if epoch:
        try:
            stamp = datetime.datetime.fromtimestamp(int(epoch), datetime.timezone.utc)
        except ValueError:
            fatal_and_log(
                f"SOURCE_DATE_EPOCH must be an integer, got '{epoch}'", ConfigError
            )
    else:
        stamp = datetime.datetime.now(datetime.timezone.utc)
    return stamp.replace(microsecond=0).isoformat().replace("+00:00", "Z")


@dataclass
class ReportEnvelope:
    """The JSON document every command writes.

    Parameters
    ----------
    command
        The subcommand that produced the payload.
    config
        Canonical echo of the run configuration.
    profile_fingerprint
        First 16 hex characters of the sha256 of the canonical profile JSON.
    payload
        The command's results. Never contains timings or timestamps.
    generated_at
        UTC time of writing; the only field that varies between identical runs.
    """

    command: str
    config: dict
    profile_fingerprint: str
    payload: Any
    generated_at: str = ""
    tool: str = TOOL
    version: str = __version__

    def __post_init__(self):
        if not self.generated_at:
            self.generated_at = generated_at()

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "config": jsonable(self.config),
            "profile_fingerprint": self.profile_fingerprint,
            "generated_at": self.generated_at,
            "payload": jsonable(self.payload),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def write_text(text: str, path: Optional[str], what: str) -> None:
    """Write to ``path``, or to stdout when no path is given."""
    if not path:
        print(text, end="")
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    log.info(f"Wrote {what} to {path}")


def spectrum_csv(spectrum: Spectrum) -> str:
    """CSV with header ``re,im,residual,multiplicity``, numbers formatted .17g."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SPECTRUM_HEADER)
    for rec in spectrum.records:
        writer.writerow(
            [
                format(rec.k.real, ".17g"),
                format(rec.k.imag, ".17g"),
                format(rec.residual, ".17g"),
                rec.multiplicity,
            ]
        )
    return buffer.getvalue()


def samples_csv(r: np.ndarray, f: np.ndarray) -> str:
    """Samples file with header ``r,re_f,im_f``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SAMPLES_HEADER)
    for x, value in zip(r, np.asarray(f, dtype=complex)):
        writer.writerow(
            [format(x, ".17g"), format(value.real, ".17g"), format(value.imag, ".17g")]
        )
    return buffer.getvalue()


def read_samples_csv(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Radii and complex values of a samples file."""
    try:
        with open(path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header != SAMPLES_HEADER:
                fatal_and_log(
                    f"'{path}' must start with the header r,re_f,im_f, got {header}",
                    DomainError,
                )
            rows = [[float(x) for x in row] for row in reader if row]
    except OSError as e:
        fatal_and_log(f"Could not read samples file '{path}': {e}", ConfigError)
    except ValueError as e:
        if isinstance(e, DomainError):
            raise
        fatal_and_log(
            f"Samples file '{path}' has a non-numeric entry: {e}", DomainError
        )
    if not rows:
        fatal_and_log(f"Samples file '{path}' has no rows", DomainError)
    if any(len(row) != 3 for row in rows):
        fatal_and_log(f"Samples file '{path}' must have three columns", DomainError)
    data = np.array(rows)
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def summarize(command: str, payload: dict) -> str:
    """One log line describing a command's payload."""
    if command == "spectrum":
        spectrum = payload["spectrum"]
        return _clean(
            f"""
            {len(spectrum['zeros'])} distinct zero(s), total multiplicity
            {spectrum['total_multiplicity']} against winding count
            {spectrum['winding']}; complete: {spectrum['complete']}.
            """
        )
    if command == "eval":
        return _clean(
            f"""
            D0({payload['k'][0]} + {payload['k'][1]}i) has normalized modulus
            {payload['normalized_abs']:.6g}.
            """
        )
    if command == "validate":
        failed = [c["name"] for c in payload["checks"] if not c["passed"]]
        return _clean(
            f"""
            {len(payload['checks']) - len(failed)} of {len(payload['checks'])}
            checks passed. {('Failed: ' + ', '.join(failed) + '.') if failed else ''}
            """
        )
    return f"{command} report with keys {sorted(payload)}"
