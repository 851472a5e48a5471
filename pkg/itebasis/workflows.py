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

"""One function per subcommand. Each builds its payload, wraps it in a
ReportEnvelope and writes the report.
"""

import math
from typing import Optional, Tuple

import numpy as np

from .config import RunConfig
from .determinant import (
    AsymptoticMode,
    AsymptoticModel,
    Determinant,
    d0_asymptotic,
    eigenpair_coefficients,
    indicator_estimate,
)
from .errors import DomainError, NotAnEigenvalue
from .log import fatal_and_log, log
from .reports import (
    ReportEnvelope,
    read_samples_csv,
    samples_csv,
    spectrum_csv,
    summarize,
    write_text,
)
from .riesz import (
    build_system,
    completeness_density,
    expand,
    frame_bounds,
    quadrature_grid,
)
from .validate import run_suite
from .zeros import Spectrum, ZeroFinder, density, separation, strip_report

# normalized |D0| below which cmd_eval also reports the eigenpair coefficients
EIGEN_TOL = 1e-8


def _determinant(config: RunConfig) -> Determinant:
    return Determinant(config.build_profile(), config.integrator)


def _envelope(config: RunConfig, command: str, payload: dict) -> ReportEnvelope:
    return ReportEnvelope(
        command=command,
        config=config.to_dict(),
        profile_fingerprint=config.build_profile().fingerprint(),
        payload=payload,
    )


def _emit(envelope: ReportEnvelope, config: RunConfig, out: Optional[str]):
    log.info(summarize(envelope.command, envelope.to_dict()["payload"]))
    write_text(envelope.dumps(), out or config.output.json, "JSON report")
    return envelope


def _locate(
    config: RunConfig, workers: Optional[int]
) -> Tuple[Determinant, Spectrum]:
    det = _determinant(config)
    finder = ZeroFinder(det, config.search_config(workers))
    return det, finder.locate(config.search.box())


def _scaled_pair(value) -> dict:
    """[re, im] of a scaled value plus its log-modulus, so huge values survive."""
    re, im = value.to_pair()
    return {"value": [re, im], "log_abs": value.log_abs()}


def cmd_eval(
    config: RunConfig, k: Optional[complex] = None, out: Optional[str] = None
) -> ReportEnvelope:
    """Evaluate D0, its k-derivative and both large-k models at one wavenumber.

    Parameters
    ----------
    config
        The run configuration. ``eval.k`` is used when ``k`` is not given.
    k
        The wavenumber.
    out
        Path of the JSON report; defaults to ``output.json``, then stdout.
    """
    try:
        k = config.eval.wavenumber if k is None else complex(k)
        det = _determinant(config)
        det.check_degenerate()
        value = det.d0(k)
        deriv = det.d0_derivative(k)
        payload = {
            "k": [k.real, k.imag],
            "B": det.B,
            "d0": _scaled_pair(value),
            "d0_derivative": _scaled_pair(deriv),
            "normalized_abs": value.scaled_abs(det.exponential_type * abs(k.imag)),
            "asymptotic": {},
            "eigenpair": None,
        }
        for mode in AsymptoticMode:
            model = AsymptoticModel.from_map(det.lmap, mode)
            try:
                payload["asymptotic"][mode.value] = _scaled_pair(
                    d0_asymptotic(model, k, reduced_normalized=True)
                )
            except DomainError as e:
                log.warning(f"{mode.value} model not evaluated: {e}")
                payload["asymptotic"][mode.value] = None
        if payload["normalized_abs"] <= EIGEN_TOL:
            try:
                payload["eigenpair"] = eigenpair_coefficients(det, k, EIGEN_TOL)
            except NotAnEigenvalue as e:
                log.warning(f"No eigenpair coefficients: {e}")
        return _emit(_envelope(config, "eval", payload), config, out)

    except Exception as e:
        log.error(f"cmd_eval failed: {e}")
        raise


def cmd_spectrum(
    config: RunConfig,
    workers: Optional[int] = None,
    out: Optional[str] = None,
    csv_path: Optional[str] = None,
) -> ReportEnvelope:
    """Locate the zeros in the search region and write the spectrum CSV and report.

    Parameters
    ----------
    config
        The run configuration.
    workers
        The ``--workers`` flag; see ``RunConfig.resolved_workers``.
    out
        Path of the JSON report; defaults to ``output.json``, then stdout.
    csv_path
        Path of the spectrum CSV; defaults to ``output.csv``. No CSV is written
        when neither is set.

    Environment variables
    ---------------------
    ITEBASIS_WORKERS
        Default worker count.
    """
    try:
        _, spectrum = _locate(config, workers)
        csv_path = csv_path or config.output.csv
        if csv_path:
            write_text(spectrum_csv(spectrum), csv_path, "spectrum CSV")
        payload = {"spectrum": spectrum.to_dict()}
        return _emit(_envelope(config, "spectrum", payload), config, out)

    except Exception as e:
        log.error(f"cmd_spectrum failed: {e}")
        raise


def cmd_density(
    config: RunConfig, workers: Optional[int] = None, out: Optional[str] = None
) -> ReportEnvelope:
    """Angular zero densities of the located spectrum."""
    try:
        _, spectrum = _locate(config, workers)
        report = density(
            spectrum, radii=config.density.radii, epsilon=config.density.epsilon
        )
        payload = {
            "density": report,
            "complete": spectrum.complete,
            "winding": spectrum.winding,
        }
        return _emit(_envelope(config, "density", payload), config, out)

    except Exception as e:
        log.error(f"cmd_density failed: {e}")
        raise


def cmd_strips(
    config: RunConfig, workers: Optional[int] = None, out: Optional[str] = None
) -> ReportEnvelope:
    """Strip counts and the separation of the located spectrum."""
    try:
        _, spectrum = _locate(config, workers)
        strips = strip_report(
            spectrum, config.strips.T, config.strips.s, config.strips.K
        )
        sep = separation(
            spectrum,
            config.separation.exclusion_radius,
            config.separation.near_collision,
        )
        payload = {"strips": strips, "separation": sep, "complete": spectrum.complete}
        return _emit(_envelope(config, "strips", payload), config, out)

    except Exception as e:
        log.error(f"cmd_strips failed: {e}")
        raise


def cmd_indicator(config: RunConfig, out: Optional[str] = None) -> ReportEnvelope:
    """Indicator estimates for every configured direction."""
    try:
        det = _determinant(config)
        det.check_degenerate()
        reports = [
            indicator_estimate(
                det,
                theta,
                config.indicator.radii,
                max_radius=config.indicator.max_radius,
            )
            for theta in config.indicator.thetas
        ]
        payload = {"indicators": reports}
        return _emit(_envelope(config, "indicator", payload), config, out)

    except Exception as e:
        log.error(f"cmd_indicator failed: {e}")
        raise


def cmd_basis(
    config: RunConfig, workers: Optional[int] = None, out: Optional[str] = None
) -> ReportEnvelope:
    """Frame bounds and completeness density of the spectrum's exponential system."""
    try:
        _, spectrum = _locate(config, workers)
        system = build_system(spectrum)
        too_big = [N for N in config.basis.N if N > len(system)]
        if too_big:
            log.warning(
                f"Truncations {too_big} exceed the {len(system)} available functions "
                "and are skipped"
            )
        frame = frame_bounds(system, config.basis.N, config.basis.normalize)
        completeness = completeness_density(system, config.basis.radii)
        payload = {
            "system_size": len(system),
            "frame": frame,
            "completeness": completeness,
            "warnings": system.warnings,
        }
        return _emit(_envelope(config, "basis", payload), config, out)

    except Exception as e:
        log.error(f"cmd_basis failed: {e}")
        raise


def cmd_expand(
    config: RunConfig,
    samples: Optional[str] = None,
    workers: Optional[int] = None,
    out: Optional[str] = None,
) -> ReportEnvelope:
    """Expand the function in a samples file in the spectrum's exponential system.

    Parameters
    ----------
    samples
        A CSV with header ``r,re_f,im_f``; defaults to ``expand.samples``. The
        ``grid`` subcommand writes a template on the Gauss-Legendre grid.
    """
    try:
        path = samples or config.expand.samples
        if not path:
            fatal_and_log(
                "cmd_expand needs a samples file (--samples or expand.samples)",
                DomainError,
            )
        r, f = read_samples_csv(path)
        _, spectrum = _locate(config, workers)
        system = build_system(spectrum)
        result = expand(r, f, system, config.expand.N)
        payload = {"samples": len(r), "expansion": result}
        return _emit(_envelope(config, "expand", payload), config, out)

    except Exception as e:
        log.error(f"cmd_expand failed: {e}")
        raise


def cmd_grid(
    config: RunConfig, out: Optional[str] = None, csv_path: Optional[str] = None
) -> ReportEnvelope:
    """Write a samples template ``r,re_f,im_f`` with f = 0 on the Gauss-Legendre
    grid of (-(1 + B), 1 + B).

    The template goes to ``csv_path``, then ``output.csv``, then stdout. The JSON
    report is only written when a path for it is configured.
    """
    try:
        det = _determinant(config)
        a = 1.0 + det.B
        r, w = quadrature_grid(a, config.grid.points)
        csv_path = csv_path or config.output.csv
        write_text(samples_csv(r, np.zeros_like(r)), csv_path, "samples template")
        payload = {
            "a": a,
            "points": int(config.grid.points),
            "weight_sum": float(np.sum(w)),
            "max_resolved_re_k": math.pi * config.grid.points / (8.0 * a),
        }
        envelope = _envelope(config, "grid", payload)
        if out or config.output.json:
            _emit(envelope, config, out)
        return envelope

    except Exception as e:
        log.error(f"cmd_grid failed: {e}")
        raise


def cmd_validate(
    config: RunConfig, workers: Optional[int] = None, out: Optional[str] = None
) -> ReportEnvelope:
    """Run the invariant suite. ``payload["passed"]`` is True iff every check passed."""
    try:
        checks = run_suite(config, workers)
        payload = {
            "passed": all(c.passed for c in checks),
            "checks": [c.to_dict() for c in checks],
        }
        return _emit(_envelope(config, "validate", payload), config, out)

    except Exception as e:
        log.error(f"cmd_validate failed: {e}")
        raise
