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
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from itebasis.determinant import (
    AsymptoticMode,
    AsymptoticModel,
    Determinant,
    d0,
    d0_asymptotic,
    d0_derivative,
    eigenpair_coefficients,
    horizontal_bounds,
    indicator_estimate,
)
from itebasis.errors import DegenerateDeterminant, DomainError, NotAnEigenvalue
from itebasis.profile import ConstantProfile, LiouvilleMap, SmoothBumpProfile

SQRT2 = math.sqrt(2.0)


def _sqrt2_roots(lo: float, hi: float):
    """Real zeros of D0 for n = 2, from its numerator. The first is near 7.7."""

    def f(x):
        return SQRT2 * math.sin(x) * math.cos(SQRT2 * x) - math.cos(x) * math.sin(
            SQRT2 * x
        )

    xs = np.linspace(lo, hi, 2001)
    values = [f(x) for x in xs]
    return [
        brentq(f, xs[i], xs[i + 1], xtol=1e-15)
        for i in range(len(xs) - 1)
        if values[i] * values[i + 1] < 0
    ]


@pytest.mark.parametrize(
    ["n0", "k", "expected"],
    [
        (4.0, math.pi / 2.0, -2.0 / math.pi),
        (4.0, math.pi, 0.0),
        (1.0, 2.0, 0.0),
        (4.0, 0.0, 0.0),
        (4.0, 1.3 + 0.4j, -cmath.sin(1.3 + 0.4j) ** 3 / (1.3 + 0.4j)),
    ],
)
def test_d0_constant(n0, k, expected):
    assert d0(ConstantProfile(n0), k).to_complex() == pytest.approx(
        expected, abs=1e-11
    )


def test_d0_constant_far_from_real_axis():
    k = 30.0 + 15.0j
    value = d0(ConstantProfile(4.0), k)
    exact = -cmath.sin(k) ** 3 / k
    assert value.to_complex() == pytest.approx(exact, rel=1e-9)


@pytest.mark.parametrize("k", [1.3 + 0.4j, 7.0, math.pi])
def test_d0_derivative_constant(k):
    k = complex(k)
    s, c = cmath.sin(k), cmath.cos(k)
    exact = -3.0 * s**2 * c / k + s**3 / k**2
    got = d0_derivative(ConstantProfile(4.0), k).to_complex()
    assert got == pytest.approx(exact, abs=1e-10)


def test_d0_derivative_matches_central_difference():
    bump = SmoothBumpProfile(amplitude=3.0, power=3)
    det = Determinant(bump)
    k, step = 5.0 + 1.0j, 1e-5
    central = (det.d0(k + step).to_complex() - det.d0(k - step).to_complex()) / (
        2.0 * step
    )
    assert det.d0_derivative(k).to_complex() == pytest.approx(central, rel=1e-6)
    assert abs(det.d0_derivative(4.2).to_complex().imag) < 1e-12


@pytest.mark.parametrize("profile", ["bump", "spline", "constant2"], indirect=True)
def test_symmetries(profile):
    det = Determinant(profile)
    for k in (2.3 + 0.7j, 13.4 - 3.2j):
        value = det.d0(k)
        assert det.d0(k.conjugate()).isclose(value.conj(), rel_tol=1e-10)
        assert det.d0(-k).isclose(value, rel_tol=1e-10)


def test_normalized_abs_and_envelope():
    det = Determinant(ConstantProfile(4.0))
    ks = np.array([10.0 + 5.0j, 10.0 - 5.0j])
    assert det.B == pytest.approx(2.0)
    assert np.allclose(det.log_envelope(ks), [15.0, 15.0])
    exact = np.abs(np.sin(ks) ** 3 / ks) * np.exp(-15.0)
    assert np.allclose(det.normalized_abs(ks), exact, rtol=1e-9)


@pytest.mark.parametrize("profile", ["unit"], indirect=True)
def test_degenerate(profile):
    with pytest.raises(DegenerateDeterminant, match="identically-zero"):
        Determinant(profile).check_degenerate()
    assert d0(profile, 3.0 + 1.0j).to_complex() == pytest.approx(0.0, abs=1e-10)


def test_not_degenerate():
    Determinant(SmoothBumpProfile(amplitude=3.0, power=3)).check_degenerate()


def test_reduced_model_constant():
    model = AsymptoticModel(
        B=2.0, n0_quarter=1.0, p0=0.0, Q_B=0.0, p_B=0.0, mode=AsymptoticMode.REDUCED
    )
    assert d0_asymptotic(model, math.pi).to_complex() == pytest.approx(0.0, abs=1e-15)
    k = 3.3 + 0.5j
    assert d0_asymptotic(model, k).to_complex() == pytest.approx(
        2.0 * cmath.sin(-k) / k, rel=1e-13
    )


def test_full_model_exact_for_constant():
    lmap = LiouvilleMap(ConstantProfile(4.0))
    model = AsymptoticModel.from_map(lmap, AsymptoticMode.FULL)
    assert model.boundary_quarter == pytest.approx(SQRT2)
    k = 3.3 + 0.2j
    exact = d0(ConstantProfile(4.0), k)
    assert d0_asymptotic(model, k).isclose(exact, rel_tol=1e-9)


def test_full_model_guard_band():
    model = AsymptoticModel.from_map(LiouvilleMap(ConstantProfile(4.0)), "full")
    with pytest.raises(DomainError, match="guard band"):
        d0_asymptotic(model, math.pi / 2.0)


def test_asymptotic_small_k():
    model = AsymptoticModel.from_map(LiouvilleMap(ConstantProfile(4.0)))
    with pytest.raises(DomainError, match="need"):
        d0_asymptotic(model, 0.5)


def test_reduced_model_deviation_decays():
    det = Determinant(SmoothBumpProfile(amplitude=3.0, power=3))
    model = AsymptoticModel.from_map(det.lmap, AsymptoticMode.REDUCED)
    shift = 2.0 * det.exponential_type

    def deviation(x0):
        num, den = 0.0, 0.0
        for x in np.linspace(x0, x0 + 2.0 * math.pi, 32, endpoint=False):
            k = complex(x, 2.0)
            approx = d0_asymptotic(model, k, reduced_normalized=True)
            num += (det.d0(k) - approx).scaled_abs(shift)
            den += approx.scaled_abs(shift)
        return num / den

    assert deviation(20.0) >= 1.8 * deviation(40.0)


def test_indicator_constant():
    det = Determinant(ConstantProfile(4.0))
    report = indicator_estimate(det, math.pi / 2.0, [10.0, 20.0, 40.0])
    assert report.target == pytest.approx(3.0)
    assert report.relative_error < 1e-6
    assert report.fit_model == "h + (c + d log R)/R"
    mirrored = indicator_estimate(det, -math.pi / 2.0, [10.0, 20.0, 40.0])
    assert mirrored.extrapolated == pytest.approx(report.extrapolated, abs=1e-8)
    assert report.to_dict()["relative_error"] == report.relative_error


def test_indicator_two_radii():
    det = Determinant(ConstantProfile(4.0))
    report = indicator_estimate(det, math.pi / 2.0, [20.0, 40.0])
    assert report.fit_model == "h + c/R"
    # the c/R model cannot absorb log R / R
    assert 0.0 < report.relative_error < 0.1


@pytest.mark.parametrize(
    ["theta", "radii", "match"],
    [
        (0.0, [10.0, 20.0], "real axis"),
        (1.0, [20.0, 10.0], "increasing"),
        (1.0, [10.0, 100.0], "max_radius"),
    ],
)
def test_indicator_domain(theta, radii, match):
    det = Determinant(ConstantProfile(4.0))
    with pytest.raises(DomainError, match=match):
        indicator_estimate(det, theta, radii)


def test_horizontal_bounds():
    det = Determinant(ConstantProfile(4.0))
    low, high = horizontal_bounds(det, math.pi, samples=200)
    assert 0.0 < low <= high
    assert np.allclose(
        (low, high), horizontal_bounds(det, -math.pi, samples=200), rtol=1e-10
    )
    with pytest.raises(DomainError, match="h_min"):
        horizontal_bounds(det, 1.0)


def test_eigenpair_at_simple_zero():
    det = Determinant(ConstantProfile(2.0))
    root = _sqrt2_roots(6.0, 9.0)[0]
    coeffs = eigenpair_coefficients(det, root)
    assert abs(coeffs.a00) ** 2 + abs(coeffs.b00) ** 2 == pytest.approx(1.0)
    assert coeffs.matching_residual <= 1e-8
    lead = coeffs.a00 if abs(coeffs.a00) > 1e-15 else coeffs.b00
    assert lead.imag == pytest.approx(0.0, abs=1e-15) and lead.real > 0
    assert coeffs.to_dict()["k"] == [root, 0.0]


def test_eigenpair_rejects_non_zero():
    det = Determinant(ConstantProfile(2.0))
    with pytest.raises(NotAnEigenvalue, match="not an eigenvalue"):
        eigenpair_coefficients(det, 1.0)
