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

"""The exponential system generated by a spectrum on (-(1 + B), 1 + B).

A zero k of multiplicity m contributes r**q * exp(i k r) for q = 0, ..., m - 1.
The module builds Gram matrices, truncated frame bounds, least-squares
expansions and the completeness density of such systems.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import legendre

from .errors import ConditioningError, DomainError, NonConvergence
from .log import fatal_and_log, log
from .zeros import Spectrum

_SMALL_MU = 1e-14
_EIGH_RESIDUAL = 1e-8
_CONDITION_FLOOR = 1e-10
_POINTS_PER_PERIOD = 8
_REFINE_STEPS = 3


def quadrature_grid(a: float, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on (-a, a)."""
    if a <= 0 or points < 1:
        fatal_and_log(
            f"quadrature_grid needs a > 0 and points >= 1, got {a}, {points}",
            DomainError,
        )
    x, w = legendre.leggauss(int(points))
    return a * x, a * w


@dataclass
class ExponentialSystem:
    """Nodes k_j with powers q_j, standing for the functions r**q_j exp(i k_j r).

    Parameters
    ----------
    nodes
        Complex frequencies, one entry per function.
    powers
        The power of r of each function; nonzero only at multiple zeros.
    a
        Half length of the interval, 1 + B.
    fingerprint
        Fingerprint of the profile whose spectrum generated the system.
    warnings
        Caveats inherited from the spectrum.
    """

    nodes: np.ndarray
    powers: np.ndarray
    a: float
    fingerprint: str = ""
    warnings: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def B(self) -> float:
        return self.a - 1.0

    @property
    def is_plain(self) -> bool:
        return not np.any(self.powers)

    def truncate(self, N: int) -> "ExponentialSystem":
        if not 1 <= N <= len(self):
            fatal_and_log(
                f"Truncation N = {N} outside 1..{len(self)} functions", DomainError
            )
        return ExponentialSystem(
            nodes=self.nodes[:N],
            powers=self.powers[:N],
            a=self.a,
            fingerprint=self.fingerprint,
            warnings=list(self.warnings),
        )

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        """Matrix E with E[i, j] = r_i**q_j exp(i k_j r_i)."""
        r = np.asarray(r, dtype=float)[:, None]
        return r ** self.powers[None, :] * np.exp(1j * self.nodes[None, :] * r)

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "fingerprint": self.fingerprint,
            "size": len(self),
            "nodes": [[k.real, k.imag] for k in self.nodes],
            "powers": [int(q) for q in self.powers],
            "warnings": self.warnings,
        }


def _node_key(k: complex, q: int):
    return (abs(k.real), 0 if k.real >= 0 else 1, k.imag, q)


def build_system(spectrum: Spectrum, B: Optional[float] = None) -> ExponentialSystem:
    """The exponential system of ``spectrum``.

    When the search region lies in the right half plane, -k is added for every
    zero k. Functions are ordered by |Re k|, then by sign of Re k, then by Im k.
    """
    if not spectrum.records:
        fatal_and_log("Cannot build an exponential system from no zeros", DomainError)
    B = spectrum.B if B is None else float(B)
    warnings = []
    if not spectrum.complete:
        warnings.append("spectrum is incomplete; the system misses functions")
        log.warning("Building an exponential system from an incomplete spectrum")

    mirror = spectrum.region.re_min > 0
    entries = []
    for rec in spectrum.records:
        images = [rec.k, -rec.k] if mirror else [rec.k]
        for k in images:
            entries += [(complex(k), q) for q in range(rec.multiplicity)]
    entries.sort(key=lambda e: _node_key(*e))

    system = ExponentialSystem(
        nodes=np.array([k for k, _ in entries], dtype=complex),
        powers=np.array([q for _, q in entries], dtype=int),
        a=1.0 + B,
        fingerprint=spectrum.fingerprint,
        warnings=warnings,
    )
    generalized = int(np.count_nonzero(system.powers))
    log.info(
        f"Exponential system of {len(system)} functions on (-{system.a:.6g}, "
        f"{system.a:.6g}), {generalized} generalized"
    )
    return system


@dataclass
class GramMatrix:
    """G[j, l] = integral over (-a, a) of e_j(r) conj(e_l(r))."""

    N: int
    matrix: np.ndarray
    normalized: bool = False
    closed_form: bool = True
    scale: Optional[np.ndarray] = None


def _closed_form_gram(nodes: np.ndarray, a: float) -> np.ndarray:
    mu = nodes[:, None] - nodes[None, :].conj()
    small = np.abs(mu) < _SMALL_MU
    safe = np.where(small, 1.0, mu)
    return np.where(small, 2.0 * a, 2.0 * np.sin(a * safe) / safe)


def _quadrature_gram(system: ExponentialSystem) -> np.ndarray:
    top = float(np.max(np.abs(system.nodes.real)))
    points = int(math.ceil(0.7 * system.a * 2.0 * top)) + 48
    r, w = quadrature_grid(system.a, points)
    E = system.evaluate(r)
    return (E.T * w) @ E.conj()


def gram(system: ExponentialSystem, N: Optional[int] = None, normalize: bool = False):
    """Gram matrix of the first ``N`` functions.

    Plain exponentials use 2 sin(a mu)/mu with mu = k_j - conj(k_l); generalized
    ones use Gauss-Legendre quadrature. With ``normalize`` the matrix is scaled to
    unit diagonal.
    """
    N = len(system) if N is None else int(N)
    sub = system.truncate(N)
    if sub.is_plain:
        G = _closed_form_gram(sub.nodes, sub.a)
    else:
        G = _quadrature_gram(sub)
    G = (G + G.conj().T) / 2.0
    scale = None
    if normalize:
        scale = 1.0 / np.sqrt(np.real(np.diag(G)))
        G = G * scale[:, None] * scale[None, :]
    return GramMatrix(
        N=N, matrix=G, normalized=normalize, closed_form=sub.is_plain, scale=scale
    )


@dataclass
class FrameRow:
    N: int
    lambda_min: float
    lambda_max: float

    @property
    def cond(self) -> float:
        if self.lambda_min <= 0:
            return math.inf
        return self.lambda_max / self.lambda_min

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "cond": self.cond if math.isfinite(self.cond) else None,
        }


@dataclass
class FrameReport:
    """Extreme eigenvalues of the truncated Gram matrices.

    ``lower_bounded`` holds when every lambda_min stays above half the first one;
    ``upper_bounded`` when every lambda_max stays below twice the first one.
    """

    rows: List[FrameRow]
    normalized: bool
    lower_bounded: bool
    upper_bounded: bool

    def to_dict(self) -> dict:
        return {
            "rows": [row.to_dict() for row in self.rows],
            "normalized": self.normalized,
            "lower_bounded": self.lower_bounded,
            "upper_bounded": self.upper_bounded,
        }


def _checked_eigh(G: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    values, vectors = sla.eigh(G)
    residual = np.linalg.norm(G @ vectors - vectors * values[None, :])
    norm = np.linalg.norm(G)
    if residual > _EIGH_RESIDUAL * max(norm, 1.0):
        fatal_and_log(
            f"Hermitian eigensolver residual {residual:.3g} exceeds "
            f"{_EIGH_RESIDUAL:g} * |G| = {_EIGH_RESIDUAL * norm:.3g}",
            NonConvergence,
        )
    return values, vectors


def frame_bounds(
    system: ExponentialSystem, N_list: Sequence[int], normalize: bool = False
) -> FrameReport:
    """Frame (Riesz) bound estimates for each truncation in ``N_list``."""
    N_list = sorted(int(N) for N in N_list if int(N) <= len(system))
    if not N_list:
        fatal_and_log(
            f"No truncation fits a system of {len(system)} functions", DomainError
        )
    rows = []
    for N in N_list:
        values, _ = _checked_eigh(gram(system, N, normalize).matrix)
        rows.append(
            FrameRow(N=N, lambda_min=float(values[0]), lambda_max=float(values[-1]))
        )
        log.info(
            f"N = {N}: lambda_min = {values[0]:.4g}, lambda_max = {values[-1]:.4g}"
        )
    first = rows[0]
    return FrameReport(
        rows=rows,
        normalized=normalize,
        lower_bounded=all(row.lambda_min >= 0.5 * first.lambda_min for row in rows),
        upper_bounded=all(row.lambda_max <= 2.0 * first.lambda_max for row in rows),
    )


@dataclass
class ExpansionResult:
    """Coefficients c with f ~ sum_j c_j e_j in the weighted least-squares sense.

    ``quadrature_error`` compares the Gram matrix assembled on the sample grid
    with the exact one, relative to its norm.
    """

    N: int
    coefficients: np.ndarray
    relative_residual: float
    quadrature_error: float
    condition: float

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
            "relative_residual": self.relative_residual,
            "quadrature_error": self.quadrature_error,
            "condition": self.condition,
        }


def grid_weights(r: np.ndarray, a: float) -> np.ndarray:
    """Quadrature weights for samples at ``r``.

    A Gauss-Legendre grid on (-a, a) gets its own weights; any other increasing
    grid gets trapezoid weights.
    """
    r = np.asarray(r, dtype=float)
    nodes, weights = quadrature_grid(a, len(r))
    if np.allclose(r, nodes, rtol=0.0, atol=1e-12 * a):
        return weights
    if np.any(np.diff(r) <= 0):
        fatal_and_log("Sample radii must be strictly increasing", DomainError)
    gaps = np.diff(r)
    w = np.zeros_like(r)
    w[:-1] += gaps / 2.0
    w[1:] += gaps / 2.0
    return w


def expand(
    r: np.ndarray,
    f: np.ndarray,
    system: ExponentialSystem,
    N: int,
    weights: Optional[np.ndarray] = None,
) -> ExpansionResult:
    """Expand samples ``f`` at ``r`` in the first ``N`` functions of ``system``.

    The moments b_j = integral of f conj(e_j) come from the sample grid, and the
    normal equations are solved by Cholesky with iterative refinement.
    """
    r = np.asarray(r, dtype=float)
    f = np.asarray(f, dtype=complex)
    if r.shape != f.shape or r.ndim != 1:
        fatal_and_log(
            "Sample radii and values must be 1-d arrays of equal length", DomainError
        )
    sub = system.truncate(N)
    if r[0] < -sub.a - 1e-12 or r[-1] > sub.a + 1e-12:
        fatal_and_log(
            f"Samples span [{r[0]}, {r[-1]}], outside (-{sub.a}, {sub.a})", DomainError
        )
    top = float(np.max(np.abs(sub.nodes.real)))
    if top > 0:
        needed = _POINTS_PER_PERIOD * 2.0 * sub.a * top / (2.0 * math.pi)
        if len(r) < needed:
            fatal_and_log(
                f"{len(r)} samples do not resolve |Re k| = {top:.4g}; need at least "
                f"{int(math.ceil(needed))} ({_POINTS_PER_PERIOD} per period)",
                DomainError,
            )
    w = grid_weights(r, sub.a) if weights is None else np.asarray(weights, dtype=float)

    # equilibrated to unit diagonal; the floor applies to the scaled matrix
    scaled = gram(sub, N, normalize=True)
    G, scale = scaled.matrix, scaled.scale
    values = sla.eigvalsh(G)
    if values[0] < _CONDITION_FLOOR * values[-1]:
        fatal_and_log(
            f"Gram matrix of N = {N} is too ill-conditioned: lambda_min = "
            f"{values[0]:.3g}, lambda_max = {values[-1]:.3g}",
            ConditioningError,
        )
    E = sub.evaluate(r)
    b = scale * (E.conj().T @ (w * f))
    # normal equations of min |f - E c|_w: the matrix is conj(G)
    normal = G.conj()
    factor = sla.cho_factor(normal, lower=True)
    c = sla.cho_solve(factor, b)
    for _ in range(_REFINE_STEPS):
        c = c + sla.cho_solve(factor, b - normal @ c)
    c = scale * c

    approx = E @ c
    norm_f = math.sqrt(float(np.sum(w * np.abs(f) ** 2)))
    misfit = math.sqrt(float(np.sum(w * np.abs(f - approx) ** 2)))
    grid_gram = scale[:, None] * ((E.T * w) @ E.conj()) * scale[None, :]
    quad_err = float(np.linalg.norm(grid_gram - G) / np.linalg.norm(G))
    result = ExpansionResult(
        N=N,
        coefficients=c,
        relative_residual=misfit / norm_f if norm_f > 0 else misfit,
        quadrature_error=quad_err,
        condition=float(values[-1] / values[0]),
    )
    log.info(
        f"Expansion in N = {N} functions: relative residual "
        f"{result.relative_residual:.3g}, quadrature error {quad_err:.3g}"
    )
    return result


@dataclass
class CompletenessReport:
    """Functions with |k| <= r per unit radius against 2(1 + B)/pi."""

    radii: List[float]
    counts: List[int]
    estimates: List[float]
    target: float
    caveats: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "radii": self.radii,
            "counts": self.counts,
            "estimates": self.estimates,
            "target": self.target,
            "caveats": self.caveats,
        }


def completeness_density(
    system: ExponentialSystem, radii: Sequence[float]
) -> CompletenessReport:
    """Count the system's functions with |k| <= r for each radius."""
    radii = sorted(float(r) for r in radii)
    if not radii or radii[0] <= 0:
        fatal_and_log("completeness_density needs positive radii", DomainError)
    mags = np.abs(system.nodes)
    counts = [int(np.count_nonzero(mags <= r)) for r in radii]
    report = CompletenessReport(
        radii=radii,
        counts=counts,
        estimates=[n / r for n, r in zip(counts, radii)],
        target=2.0 * system.a / math.pi,
        caveats=list(system.warnings),
    )
    if len(system) and radii[-1] > float(np.max(mags)):
        report.caveats.append(
            f"radius {radii[-1]:g} exceeds the largest node modulus "
            f"{float(np.max(mags)):.4g}"
        )
    log.info(
        f"Completeness density {report.estimates[-1]:.4f} at r = {radii[-1]:g}, "
        f"target {report.target:.4f}"
    )
    return report
