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

"""The l = 0 transmission determinant

    D0(k) = (sin k / k) y'(1; k) - cos(k) y(1; k)

its large-k models, growth diagnostics and the eigenpair coefficients.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateDeterminant, DomainError, NotAnEigenvalue
from .log import fatal_and_log, log
from .profile import LiouvilleMap, RadialProfile
from .radial_solver import IntegratorConfig, integrate_batch
from .scaled import ScaledComplex, log_abs_arrays, scaled_sin_cos

# below this |k| the sinc factors use their Taylor series
_SERIES_RADIUS = 1e-3
_GUARD_BAND = 0.1


def _sinc_parts(ks: np.ndarray):
    """Mantissas of sin k, cos k, sin k / k and d/dk(sin k / k), all sharing the
    exponent |Im k|.
    """
    sin_m, cos_m, grow = scaled_sin_cos(ks)
    small = np.abs(ks) < _SERIES_RADIUS
    safe = np.where(small, 1.0, ks)
    damp = np.exp(-grow)
    sinc_m = np.where(small, (1.0 - ks**2 / 6.0 + ks**4 / 120.0) * damp, sin_m / safe)
    dsinc_m = np.where(
        small,
        (-ks / 3.0 + ks**3 / 30.0) * damp,
        (safe * cos_m - sin_m) / safe**2,
    )
    return sin_m, cos_m, sinc_m, dsinc_m, grow


class Determinant:
    """D0 for one profile, evaluated in batches of wavenumbers.

    Parameters
    ----------
    profile
        The refractive index.
    cfg
        Integrator tolerances.
    lmap
        A LiouvilleMap of ``profile``, built on demand if not given. Only B is used,
        for the envelope normalization.
    """

    def __init__(
        self,
        profile: RadialProfile,
        cfg: Optional[IntegratorConfig] = None,
        lmap: Optional[LiouvilleMap] = None,
    ):
        self.profile = profile
        self.cfg = cfg or IntegratorConfig()
        self.lmap = lmap or LiouvilleMap(profile)

    @property
    def B(self) -> float:
        return self.lmap.B

    @property
    def exponential_type(self) -> float:
        """The exponential type 1 + B."""
        return 1.0 + self.B

    def evaluate(self, ks) -> Tuple[np.ndarray, np.ndarray]:
        """Mantissas and exponents of D0 at every k."""
        ks = np.atleast_1d(np.asarray(ks, dtype=complex)).ravel()
        batch = integrate_batch(self.profile, ks, 1.0, self.cfg)
        _, cos_m, sinc_m, _, grow = _sinc_parts(ks)
        y_m, dy_m = batch.state[:, 0], batch.state[:, 1]
        return sinc_m * dy_m - cos_m * y_m, batch.exponent + grow

    def evaluate_with_derivative(
        self, ks
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Mantissas of D0 and dD0/dk sharing one exponent per k."""
        ks = np.atleast_1d(np.asarray(ks, dtype=complex)).ravel()
        batch = integrate_batch(self.profile, ks, 1.0, self.cfg, with_k_derivative=True)
        sin_m, cos_m, sinc_m, dsinc_m, grow = _sinc_parts(ks)
        y_m, dy_m, dky_m, dkdy_m = batch.state.T
        value = sinc_m * dy_m - cos_m * y_m
        deriv = dsinc_m * dy_m + sinc_m * dkdy_m + sin_m * y_m - cos_m * dky_m
        return value, deriv, batch.exponent + grow

    def log_envelope(self, ks) -> np.ndarray:
        """(1 + B)|Im k|, the log of the growth envelope of D0."""
        return self.exponential_type * np.abs(np.imag(np.asarray(ks, dtype=complex)))

    def normalized_abs(self, ks) -> np.ndarray:
        """|D0(k)| exp(-(1 + B)|Im k|)."""
        ks = np.atleast_1d(np.asarray(ks, dtype=complex)).ravel()
        mantissa, exponent = self.evaluate(ks)
        return np.abs(mantissa) * np.exp(exponent - self.log_envelope(ks))

    def d0(self, k: complex) -> ScaledComplex:
        mantissa, exponent = self.evaluate([k])
        return ScaledComplex(complex(mantissa[0]), float(exponent[0]))

    def d0_derivative(self, k: complex) -> ScaledComplex:
        _, deriv, exponent = self.evaluate_with_derivative([k])
        return ScaledComplex(complex(deriv[0]), float(exponent[0]))

    def check_degenerate(self, grid_points: int = 64, floor: float = 1e-12):
        """Raise DegenerateDeterminant if D0 vanishes identically.

        The structural test catches n == 1 exactly; the coarse scan catches
        profiles that are numerically indistinguishable from it.
        """
        if self.profile.is_unit_index():
            fatal_and_log(
                "identically-zero determinant: the profile is n == 1",
                DegenerateDeterminant,
            )
        xs = np.linspace(0.5, 12.0, grid_points // 2)
        ks = np.concatenate([xs, xs + 0.5j])
        peak = float(np.max(self.normalized_abs(ks)))
        if peak < floor:
            fatal_and_log(
                f"identically-zero determinant: max normalized |D0| = {peak:.3g} on "
                "the pre-scan grid",
                DegenerateDeterminant,
            )
        log.debug(f"Degeneracy pre-scan passed, max normalized |D0| = {peak:.3g}")


def d0(
    profile: RadialProfile, k: complex, cfg: Optional[IntegratorConfig] = None
) -> ScaledComplex:
    """D0(k) as a scaled value, from one integration to r = 1."""
    return Determinant(profile, cfg).d0(k)


def d0_derivative(
    profile: RadialProfile, k: complex, cfg: Optional[IntegratorConfig] = None
) -> ScaledComplex:
    """dD0/dk by the product rule over D0 with the variational k-derivative of y."""
    return Determinant(profile, cfg).d0_derivative(k)


class AsymptoticMode(str, enum.Enum):
    FULL = "full"
    REDUCED = "reduced"


@dataclass
class AsymptoticModel:
    """Parameters of the large-k models of D0.

    Parameters
    ----------
    B
        Total travel time.
    n0_quarter
        n(0)^(1/4).
    p0, p_B
        The Liouville potential at xi = 0 and xi = B.
    Q_B
        The integral of the potential over [0, B].
    mode
        ``full`` keeps the O1/O2 correction factors, ``reduced`` is the
        exponential polynomial of the zero-counting argument.
    boundary_quarter
        n(1)^(1/4). 1 for every profile that joins the background; a constant
        profile sets it to n0^(1/4), which makes the full model exact.
    """

    B: float
    n0_quarter: float
    p0: float
    Q_B: float
    p_B: float
    mode: AsymptoticMode = AsymptoticMode.REDUCED
    boundary_quarter: float = 1.0

    def __post_init__(self):
        self.mode = AsymptoticMode(self.mode)
        values = [self.B, self.n0_quarter, self.p0, self.Q_B, self.p_B]
        if not all(math.isfinite(v) for v in values):
            fatal_and_log(
                f"Asymptotic model has non-finite fields: {self}", DomainError
            )
        if self.B <= 0 or self.n0_quarter <= 0 or self.boundary_quarter <= 0:
            fatal_and_log(
                "Asymptotic model needs B, n(0)^(1/4) and n(1)^(1/4) positive",
                DomainError,
            )

    @classmethod
    def from_map(
        cls, lmap: LiouvilleMap, mode: AsymptoticMode = AsymptoticMode.REDUCED
    ) -> "AsymptoticModel":
        return cls(
            B=lmap.B,
            n0_quarter=lmap.n_quarter,
            p0=lmap.p0,
            Q_B=lmap.Q_B,
            p_B=lmap.p_B,
            mode=mode,
            boundary_quarter=lmap.boundary_quarter,
        )


def d0_asymptotic(
    model: AsymptoticModel, k: complex, reduced_normalized: bool = False
) -> ScaledComplex:
    """Evaluate a large-k model of D0.

    ``full``::

        (1/(q k)) [a sin k cos(kB) O2(k) - (1/a) cos k sin(kB) O1(k)]
        O1 = 1 - cot(kB) Q(B)/(2k) + [p(B) + p(0) - Q(B)^2/2] / (4k^2)
        O2 = 1 + tan(kB) Q(B)/(2k) + [p(B) - p(0) - Q(B)^2/2] / (4k^2)

    with q = n(0)^(1/4) and a = n(1)^(1/4). For a = 1 and O1 = O2 = 1 this is
    sin((1 - B)k)/(q k).

    ``reduced``::

        [k^2 (e^{i(1-B)k} - e^{-i(1-B)k}) - p(0)(e^{i(1+B)k} - e^{-i(1+B)k})] / (i k^3)

    which is 2 sin((1-B)k)/k - 2 p(0) sin((1+B)k)/k^3. With
    ``reduced_normalized=True`` it is rescaled to the normalization of D0,
    [sin((1-B)k) - p(0) sin((1+B)k)/(4k^2)] / (q k).
    """
    k = complex(k)
    if abs(k) < 1.0:
        fatal_and_log(f"Asymptotic models need |k| >= 1, got {abs(k):.3g}", DomainError)
    B, q = model.B, model.n0_quarter

    if model.mode == AsymptoticMode.FULL:
        sin_b, cos_b, grow_b = (complex(v) for v in scaled_sin_cos(k * B))
        grow_b = grow_b.real
        for name, mantissa in (("sin(kB)", sin_b), ("cos(kB)", cos_b)):
            if abs(mantissa) * math.exp(grow_b) <= _GUARD_BAND:
                fatal_and_log(
                    f"k = {k} is inside the guard band of a pole: |{name}| <= "
                    f"{_GUARD_BAND}",
                    DomainError,
                )
        cot, tan = cos_b / sin_b, sin_b / cos_b
        o1 = (
            1.0
            - cot * model.Q_B / (2.0 * k)
            + (model.p_B + model.p0 - model.Q_B**2 / 2.0) / (4.0 * k**2)
        )
        o2 = (
            1.0
            + tan * model.Q_B / (2.0 * k)
            + (model.p_B - model.p0 - model.Q_B**2 / 2.0) / (4.0 * k**2)
        )
        sin_k, cos_k, grow_k = (complex(v) for v in scaled_sin_cos(k))
        alpha = model.boundary_quarter
        mantissa = (alpha * sin_k * cos_b * o2 - cos_k * sin_b * o1 / alpha) / (q * k)
        return ScaledComplex(mantissa, grow_k.real + grow_b)

    sin_minus, _, grow_minus = (complex(v) for v in scaled_sin_cos((1.0 - B) * k))
    sin_plus, _, grow_plus = (complex(v) for v in scaled_sin_cos((1.0 + B) * k))
    minus = ScaledComplex(sin_minus, grow_minus.real)
    plus = ScaledComplex(sin_plus, grow_plus.real)
    if reduced_normalized:
        return (minus - plus * (model.p0 / (4.0 * k**2))) / (q * k)
    return minus * (2.0 / k) - plus * (2.0 * model.p0 / k**3)


@dataclass
class IndicatorReport:
    """Directional growth estimate of D0 along the ray k = R e^{i theta}."""

    theta: float
    radii: List[float]
    raw: List[float]
    extrapolated: float
    target: float
    fit_model: str = "h + c/R"
    dithered: List[float] = field(default_factory=list)

    @property
    def relative_error(self) -> float:
        if self.target == 0:
            return abs(self.extrapolated)
        return abs(self.extrapolated - self.target) / abs(self.target)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "radii": list(self.radii),
            "raw": list(self.raw),
            "extrapolated": self.extrapolated,
            "target": self.target,
            "relative_error": self.relative_error,
            "fit_model": self.fit_model,
            "dithered": list(self.dithered),
        }


def indicator_estimate(
    det: Determinant,
    theta: float,
    radii: Sequence[float],
    max_radius: float = 80.0,
    zero_distance: float = 1e-3,
    dither: float = 1e-3,
) -> IndicatorReport:
    """Estimate the indicator h(theta) = lim log|D0(R e^{i theta})| / R.

    raw[i] = log|D0| / R_i. With three or more radii the samples are fitted by
    least squares to ``h + (c + d log R)/R``, which absorbs the 1/k prefactor of
    D0; with two radii the model is ``h + c/R``. A sample within ``zero_distance``
    of a zero (estimated by |D0/D0'|) is retaken at an angle moved ``dither``
    away from the real axis.
    """
    radii = [float(R) for R in radii]
    if abs(math.sin(theta)) < 1e-12:
        fatal_and_log(
            f"theta = {theta} lies on the real axis; the indicator is estimated away "
            "from it",
            DomainError,
        )
    if not radii or any(R <= 0 for R in radii) or np.any(np.diff(radii) <= 0):
        fatal_and_log(
            f"radii must be positive and increasing, got {radii}", DomainError
        )
    if radii[-1] > max_radius:
        fatal_and_log(
            f"radius {radii[-1]} exceeds the budget max_radius = {max_radius}",
            DomainError,
        )

    R = np.asarray(radii)
    ks = R * np.exp(1j * theta)
    value, deriv, exponent = det.evaluate_with_derivative(ks)
    with np.errstate(divide="ignore", invalid="ignore"):
        near = np.abs(value) < zero_distance * np.abs(deriv)
    dithered = []
    if np.any(near):
        moved = theta + math.copysign(dither, math.sin(theta))
        retake = R[near] * np.exp(1j * moved)
        new_value, new_exponent = det.evaluate(retake)
        value[near], exponent[near] = new_value, new_exponent
        dithered = [float(x) for x in R[near]]
        log.debug(f"Indicator samples at R = {dithered} retaken at theta = {moved}")

    raw = log_abs_arrays(value, exponent) / R
    if len(R) >= 3:
        design = np.column_stack([np.ones_like(R), 1.0 / R, np.log(R) / R])
        fit_model = "h + (c + d log R)/R"
    elif len(R) == 2:
        design = np.column_stack([np.ones_like(R), 1.0 / R])
        fit_model = "h + c/R"
    else:
        design = np.ones((1, 1))
        fit_model = "raw"
    coef, *_ = np.linalg.lstsq(design, raw, rcond=None)

    report = IndicatorReport(
        theta=float(theta),
        radii=radii,
        raw=[float(x) for x in raw],
        extrapolated=float(coef[0]),
        target=det.exponential_type * abs(math.sin(theta)),
        fit_model=fit_model,
        dithered=dithered,
    )
    log.info(
        f"Indicator at theta = {theta:.6g}: h = {report.extrapolated:.6g}, "
        f"target {report.target:.6g}"
    )
    return report


def horizontal_bounds(
    det: Determinant,
    h: float,
    x_range: Tuple[float, float] = (0.0, 60.0),
    samples: int = 600,
    h_min: Optional[float] = None,
    warn_below: float = 1e-8,
) -> Tuple[float, float]:
    """Envelope-normalized (min, max) of |D0| on the line Im k = h.

    ``h_min`` defaults to 2 pi / (1 + B); lines closer to the real axis may pass
    through zeros.
    """
    h_min = 2.0 * math.pi / det.exponential_type if h_min is None else h_min
    if abs(h) < h_min:
        fatal_and_log(
            f"|h| = {abs(h):.6g} is below h_min = {h_min:.6g}; "
            "the line may cross zeros",
            DomainError,
        )
    if samples < 2 or not x_range[1] > x_range[0]:
        fatal_and_log(f"Invalid sampling {samples} on {x_range}", DomainError)
    xs = np.linspace(x_range[0], x_range[1], samples)
    values = det.normalized_abs(xs + 1j * h)
    low, high = float(np.min(values)), float(np.max(values))
    if low < warn_below:
        log.warning(
            f"min normalized |D0| = {low:.3g} on Im k = {h}; h is too small, a zero "
            "is near the line"
        )
    return low, high


@dataclass
class EigenpairCoefficients:
    """Unit null vector (a00, b00) of the l = 0 matching system at an eigenvalue."""

    k: complex
    a00: complex
    b00: complex
    matching_residual: float

    def to_dict(self) -> dict:
        return {
            "k": [self.k.real, self.k.imag],
            "a00": [self.a00.real, self.a00.imag],
            "b00": [self.b00.real, self.b00.imag],
            "matching_residual": self.matching_residual,
        }


def eigenpair_coefficients(
    det: Determinant, k: complex, tol: float = 1e-8
) -> EigenpairCoefficients:
    """Solve the l = 0 matching system at an eigenvalue k.

    The rows match the values and the r-derivatives at r = 1 of a j0(kr) and
    b y(r)/r::

        [[ sin k / k,            -y(1)          ],
         [ cos k - sin k / k,    -(y'(1) - y(1)) ]]

    Columns are equilibrated before the SVD, so ``matching_residual`` is the ratio
    of the smaller to the larger singular value. The null vector has unit norm and
    its first nonzero component is real and positive.
    """
    k = complex(k)
    ks = np.array([k])
    batch = integrate_batch(det.profile, ks, 1.0, det.cfg)
    _, cos_m, sinc_m, _, grow = _sinc_parts(ks)
    y_m, dy_m = batch.state[0, 0], batch.state[0, 1]
    exp_y = float(batch.exponent[0])
    grow = float(grow[0])

    value = sinc_m[0] * dy_m - cos_m[0] * y_m
    envelope = det.exponential_type * abs(k.imag)
    normalized = abs(value) * math.exp(exp_y + grow - envelope)
    if normalized > tol:
        fatal_and_log(
            f"k = {k} is not an eigenvalue: "
            f"normalized |D0| = {normalized:.3g} > {tol:g}",
            NotAnEigenvalue,
        )

    matrix = np.array(
        [[sinc_m[0], -y_m], [cos_m[0] - sinc_m[0], -(dy_m - y_m)]], dtype=complex
    )
    col_norm = np.linalg.norm(matrix, axis=0)
    col_norm[col_norm == 0] = 1.0
    _, sing, vh = np.linalg.svd(matrix / col_norm)
    residual = float(sing[-1] / sing[0]) if sing[0] > 0 else 0.0
    if residual > tol:
        fatal_and_log(
            f"k = {k} is not an eigenvalue: matching residual {residual:.3g} > {tol:g}",
            NotAnEigenvalue,
        )

    # undo the column scaling, including the exponents e^{|Im k|} and e^{exp_y}
    null = vh[-1].conj() / col_norm
    log_scale = np.array([-grow, -exp_y])
    null = null * np.exp(log_scale - log_scale.max())
    null /= np.linalg.norm(null)
    lead = null[0] if abs(null[0]) > 1e-15 else null[1]
    null *= abs(lead) / lead

    return EigenpairCoefficients(
        k=k, a00=complex(null[0]), b00=complex(null[1]), matching_residual=residual
    )
