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

"""The invariant suite behind ``itebasis validate``.

Every check returns pass/fail plus the numbers it looked at. Oracle checks use
constant profiles with closed-form determinants; the rest run on the configured
profile and share one located spectrum.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .config import RunConfig
from .determinant import (
    AsymptoticMode,
    AsymptoticModel,
    Determinant,
    d0_asymptotic,
    eigenpair_coefficients,
    horizontal_bounds,
    indicator_estimate,
)
from .errors import DegenerateDeterminant, ItebasisError
from .log import log
from .profile import ConstantProfile, profile_from_dict
from .radial_solver import asymptotic_z, integrate, integrate_batch, z_from_solution
from .reports import spectrum_csv
from .riesz import (
    ExponentialSystem,
    build_system,
    expand,
    frame_bounds,
    gram,
    quadrature_grid,
)
from .scaled import ScaledComplex
from .zeros import (
    Box,
    Spectrum,
    ZeroFinder,
    ZeroRecord,
    density,
    separation,
    strip_report,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "message": self.message,
        }


class _Context:
    """Shared state of one suite run; the spectrum is located once, on demand."""

    def __init__(self, config: RunConfig, workers: Optional[int]):
        self.config = config
        self.profile = config.build_profile()
        self.det = Determinant(self.profile, config.integrator)
        self.search = config.search_config(workers)

    @cached_property
    def spectrum(self) -> Spectrum:
        return ZeroFinder(self.det, self.search).locate(self.config.search.box())


_CHECKS: List[Tuple[str, Callable[[_Context], Tuple[bool, dict]]]] = []

# offsets tried in turn when a partition contour touches a zero
_PARTITION_SHIFTS = (0.0, 0.013, 0.029, 0.047)


def _check(name: str):
    def register(func):
        _CHECKS.append((name, func))
        return func

    return register


def _relative(a: ScaledComplex, b: ScaledComplex) -> float:
    """|a - b| / |b| computed in scaled form."""
    if b.is_zero:
        return 0.0 if a.is_zero else math.inf
    diff = a - b
    return 0.0 if diff.is_zero else math.exp(diff.log_abs() - b.log_abs())


# ------------------------------------------------------------------ oracles


@_check("constant_oracle")
def _constant_oracle(ctx: _Context):
    """n = 4: D0 = -sin(k)^3 / k, compared envelope-normalized."""
    det = Determinant(ConstantProfile(4.0), ctx.config.integrator)
    rng = np.random.default_rng(ctx.config.seed)
    ks = rng.uniform(0.5, 60.0, 40) + 1j * rng.uniform(-5.0, 5.0, 40)
    mantissa, exponent = det.evaluate(ks)
    with np.errstate(over="ignore"):
        exact = -np.sin(ks) ** 3 / ks
    envelope = np.exp(det.log_envelope(ks))
    got = mantissa * np.exp(exponent)
    error = np.abs(got - exact) / envelope * np.abs(ks)
    worst = float(np.max(error))
    return worst <= 1e-9, {"max_scaled_error": worst, "samples": len(ks)}


@_check("degenerate_detection")
def _degenerate_detection(ctx: _Context):
    det = Determinant(ConstantProfile(1.0), ctx.config.integrator)
    ks = np.linspace(0.5, 12.0, 32)
    peak = float(np.max(det.normalized_abs(ks)))
    try:
        det.check_degenerate()
    except DegenerateDeterminant:
        return peak < 1e-12, {"max_normalized_abs": peak}
    return False, {"max_normalized_abs": peak}


@_check("simple_zero_oracle")
def _simple_zero_oracle(ctx: _Context):
    """n = 2: every sign change of c sin k cos ck - cos k sin ck on (0.5, 12) is a
    located zero. The first one sits near 7.7.
    """
    c = math.sqrt(2.0)

    def f(x):
        return c * math.sin(x) * math.cos(c * x) - math.cos(x) * math.sin(c * x)

    xs = np.linspace(0.5, 12.0, 4001)
    values = np.array([f(x) for x in xs])
    roots = [
        brentq(f, xs[i], xs[i + 1], xtol=1e-15)
        for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
    ]
    det = Determinant(ConstantProfile(2.0), ctx.config.integrator)
    spectrum = ZeroFinder(det, ctx.search).locate(Box(0.5, 12.0, -0.5, 0.5))
    found = spectrum.ks
    misses = [x for x in roots if not len(found) or np.min(np.abs(found - x)) > 1e-8]
    detail = {"real_roots": roots, "located": len(found), "missed": misses}
    return bool(roots) and not misses and spectrum.complete, detail


# ---------------------------------------------------------- configured profile


@_check("fingerprint_round_trip")
def _fingerprint_round_trip(ctx: _Context):
    again = profile_from_dict(ctx.profile.to_dict())
    return again.fingerprint() == ctx.profile.fingerprint(), {
        "fingerprint": ctx.profile.fingerprint()
    }


@_check("symmetry")
def _symmetry(ctx: _Context):
    """D0(conj k) = conj D0(k) and D0(-k) = D0(k)."""
    ks = np.array([2.3 + 0.7j, 7.1 - 1.9j, 13.4 + 3.2j, 0.9 + 0.4j])
    base = [ctx.det.d0(k) for k in ks]
    conj = [ctx.det.d0(k.conjugate()) for k in ks]
    neg = [ctx.det.d0(-k) for k in ks]
    conj_err = max(_relative(c, b.conj()) for c, b in zip(conj, base))
    even_err = max(_relative(n, b) for n, b in zip(neg, base))
    passed = conj_err <= 1e-10 and even_err <= 1e-10
    return passed, {"conjugate_error": conj_err, "evenness_error": even_err}


@_check("growth_scaling")
def _growth_scaling(ctx: _Context):
    """log|y(1; x + 10i)| stays within 1 of 10 B - log(2 |k| n(0)^(1/4))."""
    lmap = ctx.det.lmap
    deviations = []
    for x in np.linspace(0.0, 50.0, 6):
        k = complex(x, 10.0)
        sample = integrate(ctx.profile, k, 1.0, ctx.config.integrator)
        expected = 10.0 * lmap.B - math.log(2.0 * abs(k) * lmap.n_quarter)
        deviations.append(abs(sample.y.log_abs() - expected))
    worst = float(max(deviations))
    return worst <= 1.0, {"max_deviation": worst}


@_check("asymptotic_reduced_decay")
def _asymptotic_reduced_decay(ctx: _Context):
    """Relative deviation from the reduced model along Im k = 2 drops >= 1.8x
    when Re k doubles from 20 to 40.
    """
    model = AsymptoticModel.from_map(ctx.det.lmap, AsymptoticMode.REDUCED)

    def deviation(x0):
        num, den = 0.0, 0.0
        for x in np.linspace(x0, x0 + 2.0 * math.pi, 32, endpoint=False):
            k = complex(x, 2.0)
            exact = ctx.det.d0(k)
            approx = d0_asymptotic(model, k, reduced_normalized=True)
            shift = -ctx.det.exponential_type * 2.0
            num += (exact - approx).scaled_abs(-shift)
            den += approx.scaled_abs(-shift)
        return num / den

    d20, d40 = deviation(20.0), deviation(40.0)
    ratio = d20 / d40 if d40 > 0 else math.inf
    return ratio >= 1.8, {"deviation_20": d20, "deviation_40": d40, "ratio": ratio}


def _z_window_errors(ctx: _Context, centers) -> Dict[str, List[float]]:
    """Largest expansion errors at xi = B over one period of sin(k B) above each
    center, for order 1, order 2 and order 2 with the derived z' bracket.
    """
    lmap = ctx.det.lmap
    period = 2.0 * math.pi / lmap.B
    variants = (("1", 1, False), ("2", 2, False), ("2_derived", 2, True))
    errors: Dict[str, List[float]] = {}
    for center in centers:
        ks = center + np.linspace(0.0, period, 12, endpoint=False)
        batch = integrate_batch(ctx.profile, ks, 1.0, ctx.config.integrator)
        worst: Dict[str, float] = {}
        for i, k in enumerate(ks):
            z, dz = z_from_solution(lmap, batch.sample(i))
            for name, order, derived in variants:
                az, adz = asymptotic_z(
                    lmap, 1.0, k, order=order, derived_bracket=derived
                )
                for key, err in (
                    (f"z{name}", abs((z - az).to_complex())),
                    (f"dz{name}", abs((dz - adz).to_complex())),
                ):
                    worst[key] = max(worst.get(key, 0.0), err)
        for key, err in worst.items():
            errors.setdefault(key, []).append(err)
    return errors


def _slope(centers, errors) -> float:
    return float(np.polyfit(np.log(centers), np.log(errors), 1)[0])


@_check("z_expansion_slopes")
def _z_expansion_slopes(ctx: _Context):
    """The first-order expansion of (z, z') at xi = B errs like k^-3 and k^-2 on
    k in {20, 40, 80}; the second-order z errs like k^-4 on {40, 80, 160} and stays
    within 1e-3 relative at k = 40i. Slopes must lie within a factor 1.5 of these.

    The fitted constants err * k^3 and err * k^4 and the second-order z' slopes for
    both bracket signs are reported without a bound.
    """
    centers = [20.0, 40.0, 80.0, 160.0]
    errors = _z_window_errors(ctx, centers)
    if max(max(v) for v in errors.values()) < 1e-9:
        # p = 0 and Q = 0: every order is exact
        return True, {"max_error": max(max(v) for v in errors.values())}

    low, high = centers[:3], centers[1:]
    slopes = {
        "z_order1": _slope(low, errors["z1"][:3]),
        "dz_order1": _slope(low, errors["dz1"][:3]),
        "z_order2": _slope(high, errors["z2"][1:]),
        "dz_order2": _slope(high, errors["dz2"][1:]),
        "dz_order2_derived": _slope(high, errors["dz2_derived"][1:]),
    }
    ks = np.array(centers)
    constants = {
        "z_order1": float(np.median(np.array(errors["z1"]) * ks**3)),
        "z_order2": float(np.median(np.array(errors["z2"]) * ks**4)),
    }

    lmap = ctx.det.lmap
    k = 40.0j
    sample = integrate(ctx.profile, k, 1.0, ctx.config.integrator)
    z, _ = z_from_solution(lmap, sample)
    az, _ = asymptotic_z(lmap, 1.0, k, order=2)
    imaginary = math.exp((z - az).log_abs() - z.log_abs())

    def close(slope, predicted):
        return 1.0 / 1.5 <= slope / predicted <= 1.5

    passed = (
        close(slopes["z_order1"], -3.0)
        and close(slopes["dz_order1"], -2.0)
        and close(slopes["z_order2"], -4.0)
        and imaginary <= 1e-3
    )
    return passed, {
        "centers": centers,
        "slopes": slopes,
        "constants": constants,
        "relative_error_40i": imaginary,
        "errors": errors,
    }


@_check("indicator")
def _indicator(ctx: _Context):
    section = ctx.config.indicator
    detail, passed = {}, True
    for theta, tol in ((math.pi / 2.0, 0.05), (math.pi / 4.0, 0.07)):
        report = indicator_estimate(
            ctx.det, theta, section.radii, max_radius=section.max_radius
        )
        detail[f"{theta:.6f}"] = report.to_dict()
        passed = passed and report.relative_error <= tol
    return passed, detail


@_check("horizontal_bounds")
def _horizontal_bounds(ctx: _Context):
    h = max(4.0, 2.0 * math.pi / ctx.det.exponential_type)
    upper = horizontal_bounds(ctx.det, h, samples=200)
    lower = horizontal_bounds(ctx.det, -h, samples=200)
    mirrored = np.allclose(upper, lower, rtol=1e-10, atol=0.0)
    return upper[0] > 1e-8 and mirrored, {"h": h, "min": upper[0], "max": upper[1]}


# ---------------------------------------------------------------- spectrum


@_check("spectrum_consistency")
def _spectrum_consistency(ctx: _Context):
    """Residuals below zero_tol, multiplicities adding up to the winding count,
    and conjugate closure inside the region.
    """
    spectrum = ctx.spectrum
    worst = max((r.residual for r in spectrum.records), default=0.0)
    missing_conj = []
    for rec in spectrum.records:
        image = rec.k.conjugate()
        if spectrum.region.contains(image) and not np.any(
            np.abs(spectrum.ks - image) <= 10 * ctx.search.merge_tol
        ):
            missing_conj.append([rec.k.real, rec.k.imag])
    passed = (
        spectrum.complete
        and worst <= ctx.search.zero_tol
        and spectrum.total_multiplicity == spectrum.winding
        and not missing_conj
    )
    return passed, {
        "zeros": len(spectrum),
        "winding": spectrum.winding,
        "total_multiplicity": spectrum.total_multiplicity,
        "max_residual": worst,
        "missing_conjugates": missing_conj,
    }


@_check("winding_partition")
def _winding_partition(ctx: _Context):
    """Counts over a 2 x 2 partition add up to the count of the whole box. When a
    zero lies on a contour, the box and its partition lines are shifted.
    """
    finder = ZeroFinder(ctx.det, ctx.search)
    for attempt, shift in enumerate(_PARTITION_SHIFTS):
        x, y = 3.61 + shift, 0.37 + shift
        whole = Box(0.5 - shift, 6.5 + shift, -1.7 - shift, 2.3 + shift)
        parts = [
            Box(whole.re_min, x, whole.im_min, y),
            Box(x, whole.re_max, whole.im_min, y),
            Box(whole.re_min, x, y, whole.im_max),
            Box(x, whole.re_max, y, whole.im_max),
        ]
        counts = finder.winding_counts([whole] + parts)
        if all(c is not None for c in counts):
            return counts[0] == sum(counts[1:]), {
                "whole": counts[0],
                "parts": counts[1:],
                "shift": shift,
                "attempt": attempt,
            }
        log.debug(f"Partition at shift {shift} touches a zero")
    return False, {"message": "every shifted partition touches a zero"}


@_check("strip_confinement")
def _strip_confinement(ctx: _Context):
    """No zeros with Re k >= 5 between the search height and twice of it."""
    section = ctx.config.search
    height = max(abs(section.im_min), abs(section.im_max))
    top = min(2.0 * height, ctx.search.max_im)
    left = max(5.0, section.re_min)
    if top <= height or left >= section.re_max:
        return True, {"skipped": "no room above the search region"}
    finder = ZeroFinder(ctx.det, ctx.search)
    count = finder.winding_count(Box(left, section.re_max, height, top))
    return count == 0, {"band": [left, section.re_max, height, top], "count": count}


@_check("density_partition")
def _density_partition(ctx: _Context):
    """The default sectors cover the plane, so their counts add up."""
    report = density(
        ctx.spectrum,
        radii=ctx.config.density.radii,
        epsilon=ctx.config.density.epsilon,
    )
    zeros = ctx.spectrum.full_plane()
    totals = [sum(m for k, m in zeros if abs(k) <= r) for r in report.radii]
    sums = [sum(row[j] for row in report.counts) for j in range(len(report.radii))]
    return sums == totals, {"density": report.to_dict(), "totals": totals}


@_check("strip_count")
def _strip_count(ctx: _Context):
    section = ctx.config.search
    T = max(5.0, section.re_min)
    s = section.re_max - T
    K = min(abs(section.im_min), section.im_max)
    if s <= 0 or K <= 0:
        return True, {"skipped": "the search region has no strip window"}
    report = strip_report(ctx.spectrum, T, s, K)
    families = report.family_near + report.family_far + report.unclassified
    passed = families == report.total and abs(report.total - report.predicted) <= 4.0
    return passed, report.to_dict()


@_check("separation")
def _separation(ctx: _Context):
    report = separation(
        ctx.spectrum,
        ctx.config.separation.exclusion_radius,
        ctx.config.separation.near_collision,
    )
    passed = (
        report.delta is not None
        and report.delta > 0
        and not report.violations
        and not report.anomalies
    )
    return passed, report.to_dict()


@_check("eigenpair")
def _eigenpair(ctx: _Context):
    simple = [r for r in ctx.spectrum.records if r.multiplicity == 1]
    if not simple:
        return True, {"skipped": "no simple zero located"}
    coeffs = eigenpair_coefficients(ctx.det, simple[0].k)
    norm = abs(coeffs.a00) ** 2 + abs(coeffs.b00) ** 2
    passed = abs(norm - 1.0) <= 1e-12 and coeffs.matching_residual <= 1e-8
    return passed, coeffs.to_dict()


@_check("determinism")
def _determinism(ctx: _Context):
    box = Box(0.5, 6.5, -2.0, 2.0)
    first = spectrum_csv(ZeroFinder(ctx.det, ctx.search).locate(box))
    second = spectrum_csv(ZeroFinder(ctx.det, ctx.search).locate(box))
    return first == second, {"bytes": len(first)}


# ------------------------------------------------------------------- riesz


@_check("fourier_control")
def _fourier_control(ctx: _Context):
    """Nodes j pi / a give the Gram matrix 2a I."""
    a = ctx.det.exponential_type
    j = np.arange(-10, 11)
    system = ExponentialSystem(
        nodes=(j * math.pi / a).astype(complex), powers=np.zeros(len(j), int), a=a
    )
    G = gram(system).matrix
    error = float(np.max(np.abs(G - 2.0 * a * np.eye(len(j)))))
    return error <= 1e-12 * 2.0 * a, {"max_error": error}


def _constant_four_system() -> ExponentialSystem:
    """The system of n = 4 from its known zeros j pi, each of multiplicity 3."""
    profile = ConstantProfile(4.0)
    records = [
        ZeroRecord(k=complex(j * math.pi, 0.0), residual=0.0, multiplicity=3)
        for j in range(1, 29)
    ]
    region = Box(0.1, 90.0, -1.0, 1.0)
    return build_system(Spectrum(records, region, profile.fingerprint(), B=2.0))


@_check("frame_bounds")
def _frame_bounds(ctx: _Context):
    """For n = 4 over N in {20, 40, 80, 160}, lambda_min stays above half and
    lambda_max below twice their N = 20 values. The configured profile must keep
    every lambda_min positive; its two flags are reported.
    """
    reference = frame_bounds(
        _constant_four_system(), [20, 40, 80, 160], normalize=True
    )
    system = build_system(ctx.spectrum)
    N_list = [N for N in ctx.config.basis.N if N <= len(system)] or [len(system)]
    report = frame_bounds(system, N_list, normalize=True)
    positive = all(row.lambda_min > 0 for row in report.rows)
    passed = reference.lower_bounded and reference.upper_bounded and positive
    return passed, {"constant_four": reference.to_dict(), **report.to_dict()}


@_check("member_expansion")
def _member_expansion(ctx: _Context):
    """Expanding one function of the system gives a unit coefficient vector."""
    system = build_system(ctx.spectrum)
    N = min(10, len(system))
    top = float(np.max(np.abs(system.nodes[:N].real)))
    points = max(256, int(math.ceil(8.0 * 2.0 * system.a * top / math.pi)) + 64)
    r, _ = quadrature_grid(system.a, points)
    f = system.truncate(N).evaluate(r)[:, 0]
    result = expand(r, f, system, N)
    unit = np.zeros(N, dtype=complex)
    unit[0] = 1.0
    error = float(np.max(np.abs(result.coefficients - unit)))
    passed = error <= 1e-6 and result.relative_residual <= 1e-8
    return passed, {"coefficient_error": error, **result.to_dict()}


def run_suite(config: RunConfig, workers: Optional[int] = None) -> List[CheckResult]:
    """Run every check. A degenerate configured profile aborts the suite."""
    ctx = _Context(config, workers)
    ctx.det.check_degenerate()
    results = []
    for name, func in _CHECKS:
        try:
            passed, detail = func(ctx)
            result = CheckResult(name=name, passed=bool(passed), detail=detail)
        except ItebasisError as e:
            result = CheckResult(name=name, passed=False, message=str(e))
        log.info(f"[{'pass' if result.passed else 'FAIL'}] {name}")
        results.append(result)
    return results
