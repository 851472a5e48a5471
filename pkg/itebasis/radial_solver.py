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

"""Shooting integration of the radial equation y'' + k^2 n(r) y = 0.

The initial data are y(0) = 0, y'(0) = 1. Every wavenumber of a batch is stacked
into one complex first-order system that ``scipy.integrate.solve_ivp`` advances
with an embedded explicit Runge-Kutta pair. The interval [0, r_end] is cut into
segments short enough that no solution grows by more than e**100 across one of
them; between segments the state of each wavenumber is folded into a mantissa and
a per-wavenumber exponent, so solutions that grow like exp(|Im k| B) never
overflow.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigError, DomainError, InvariantViolation, NonConvergence
from .log import fatal_and_log, log
from .profile import LiouvilleMap, RadialProfile
from .scaled import ScaledComplex, scaled_sin_cos

# natural-log growth allowed across one segment
_SEGMENT_GROWTH = 100.0
_MIN_SEGMENTS = 4
# solve_ivp refuses relative tolerances below 100 machine epsilons
_RTOL_FLOOR = 3e-14
_METHODS = ("DOP853", "RK45")


@dataclass
class IntegratorConfig:
    """Tolerances of the radial integrator.

    Parameters
    ----------
    rel_tol
        Relative local error target for every component of every wavenumber.
    abs_tol
        Absolute local error floor, in unscaled units.
    max_steps
        Accepted steps allowed per batch before giving up. Checked at segment ends.
    renorm_threshold
        Natural-log magnitude of the state above which it is rescaled into the
        mantissa.
    step_ceiling
        The step size never exceeds ``step_ceiling / (1 + max |k|)``.
    method
        The ``solve_ivp`` method, ``"DOP853"`` or ``"RK45"``.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_steps: int = 200_000
    renorm_threshold: float = 50.0
    step_ceiling: float = 2.0
    method: str = "DOP853"

    def __post_init__(self):
        if not self.rel_tol >= 1e-13:
            fatal_and_log(f"rel_tol must be >= 1e-13, got {self.rel_tol}", ConfigError)
        if not self.abs_tol > 0:
            fatal_and_log(f"abs_tol must be positive, got {self.abs_tol}", ConfigError)
        if int(self.max_steps) != self.max_steps or self.max_steps < 1000:
            fatal_and_log(
                f"max_steps must be an integer >= 1000, got {self.max_steps}",
                ConfigError,
            )
        if not 0 < self.renorm_threshold < 600:
            fatal_and_log(
                f"renorm_threshold must lie in (0, 600), got {self.renorm_threshold}",
                ConfigError,
            )
        if not self.step_ceiling > 0:
            fatal_and_log(
                f"step_ceiling must be positive, got {self.step_ceiling}", ConfigError
            )
        if self.method not in _METHODS:
            fatal_and_log(
                f"method must be one of {', '.join(_METHODS)}, got {self.method!r}",
                ConfigError,
            )
        self.max_steps = int(self.max_steps)


@dataclass
class SolutionSample:
    """y(r; k) and y'(r; k), optionally with their k-derivatives.

    All values share ``exponent``: y = y_m * e**exponent and so on. The properties
    return each value as a normalized ScaledComplex.
    """

    r: float
    k: complex
    exponent: float
    y_m: complex
    dy_m: complex
    dk_y_m: Optional[complex] = None
    dk_dy_m: Optional[complex] = None

    @property
    def y(self) -> ScaledComplex:
        return ScaledComplex(self.y_m, self.exponent)

    @property
    def dy(self) -> ScaledComplex:
        return ScaledComplex(self.dy_m, self.exponent)

    @property
    def has_k_derivative(self) -> bool:
        return self.dk_y_m is not None

    @property
    def dk_y(self) -> Optional[ScaledComplex]:
        if self.has_k_derivative:
            return ScaledComplex(self.dk_y_m, self.exponent)

    @property
    def dk_dy(self) -> Optional[ScaledComplex]:
        if self.has_k_derivative:
            return ScaledComplex(self.dk_dy_m, self.exponent)


@dataclass
class SolutionBatch:
    """Solutions at one radius for an array of wavenumbers.

    ``state`` has columns (y, y') or (y, y', dy/dk, dy'/dk) as mantissas, and
    ``exponent`` holds one log-scale per wavenumber.
    """

    r: float
    ks: np.ndarray
    exponent: np.ndarray
    state: np.ndarray

    def __len__(self) -> int:
        return len(self.ks)

    @property
    def has_k_derivative(self) -> bool:
        return self.state.shape[1] == 4

    def sample(self, i: int) -> SolutionSample:
        row = self.state[i]
        return SolutionSample(
            r=self.r,
            k=complex(self.ks[i]),
            exponent=float(self.exponent[i]),
            y_m=complex(row[0]),
            dy_m=complex(row[1]),
            dk_y_m=complex(row[2]) if self.has_k_derivative else None,
            dk_dy_m=complex(row[3]) if self.has_k_derivative else None,
        )


def _radial_rhs(profile: RadialProfile, ks: np.ndarray, ncomp: int):
    """Right-hand side of the stacked first-order system for ``solve_ivp``."""
    k2 = ks**2

    def rhs(r, u):
        state = u.reshape(len(ks), ncomp)
        n = float(profile.index(r))
        out = np.empty_like(state)
        out[:, 0] = state[:, 1]
        out[:, 1] = -k2 * n * state[:, 0]
        if ncomp == 4:
            out[:, 2] = state[:, 3]
            out[:, 3] = -k2 * n * state[:, 2] - 2.0 * ks * n * state[:, 0]
        return out.ravel()

    return rhs


def _segments(profile: RadialProfile, ks: np.ndarray, r_end: float) -> np.ndarray:
    nmax = float(np.max(profile.index(np.linspace(0.0, r_end, 65))))
    growth = float(np.max(np.abs(ks.imag))) * math.sqrt(nmax) * r_end
    count = max(_MIN_SEGMENTS, int(math.ceil(growth / _SEGMENT_GROWTH)))
    return np.linspace(0.0, r_end, count + 1)


def integrate_batch(
    profile: RadialProfile,
    ks,
    r_end: float = 1.0,
    cfg: Optional[IntegratorConfig] = None,
    with_k_derivative: bool = False,
) -> SolutionBatch:
    """Integrate the radial equation from 0 to ``r_end`` for an array of k.

    The wavenumbers share one step sequence. The relative tolerance handed to
    ``solve_ivp`` is divided by the square root of the number of components, so
    its root-mean-square error norm still bounds every component by ``rel_tol``;
    a batched result agrees with a single integration to that tolerance.

    Parameters
    ----------
    profile
        The refractive index.
    ks
        Complex wavenumbers (any shape; flattened).
    r_end
        End radius in (0, 1].
    cfg
        Integrator tolerances. Defaults to ``IntegratorConfig()``.
    with_k_derivative
        Also integrate the variational equation for dy/dk and dy'/dk.

    Returns
    -------
    SolutionBatch
    """
    cfg = cfg or IntegratorConfig()
    if not 0.0 < r_end <= 1.0:
        fatal_and_log(f"r_end must lie in (0, 1], got {r_end}", DomainError)
    ks = np.atleast_1d(np.asarray(ks, dtype=complex)).ravel()
    if not np.all(np.isfinite(ks)):
        fatal_and_log("Wavenumbers must be finite", DomainError)

    ncomp = 4 if with_k_derivative else 2
    nk = len(ks)
    state = np.zeros((nk, ncomp), dtype=complex)
    state[:, 1] = 1.0
    exponent = np.zeros(nk)

    # k = 0: y'' = 0 exactly, and dy/dk = 0 by evenness
    state[ks == 0, 0] = r_end
    active = np.flatnonzero(ks != 0)
    if not len(active):
        return SolutionBatch(r=r_end, ks=ks, exponent=exponent, state=state)

    sub = ks[active]
    current = state[active]
    sub_exponent = np.zeros(len(sub))
    abs_k = np.abs(sub)
    worst = complex(sub[np.argmax(abs_k)])
    rhs = _radial_rhs(profile, sub, ncomp)
    max_step = cfg.step_ceiling / (1.0 + float(abs_k.max()))
    rtol = max(cfg.rel_tol / math.sqrt(current.size), _RTOL_FLOOR)
    # y is O(1/|k|) where y' is O(1)
    scale = np.ones((len(sub), ncomp))
    scale[:, 0::2] = 1.0 / np.maximum(1.0, abs_k)[:, None]

    steps = 0
    edges = _segments(profile, sub, r_end)
    for r0, r1 in zip(edges[:-1], edges[1:]):
        if steps > cfg.max_steps:
            fatal_and_log(
                f"Radial integration for k = {worst} exhausted {cfg.max_steps} "
                f"steps at r = {r0:.6g}",
                NonConvergence,
                detail={"k": worst, "reached_radius": float(r0)},
            )
        with np.errstate(under="ignore"):
            atol = cfg.abs_tol * np.exp(-sub_exponent)[:, None] * scale
        sol = solve_ivp(
            rhs,
            (float(r0), float(r1)),
            current.ravel(),
            method=cfg.method,
            rtol=rtol,
            atol=np.maximum(atol, 1e-300).ravel(),
            max_step=max_step,
        )
        if not sol.success:
            fatal_and_log(
                f"Radial integration for k = {worst} stopped at "
                f"r = {sol.t[-1]:.6g}: {sol.message}",
                NonConvergence,
                detail={"k": worst, "reached_radius": float(sol.t[-1])},
            )
        steps += len(sol.t) - 1
        current = sol.y[:, -1].reshape(len(sub), ncomp)
        if not np.all(np.isfinite(current)):
            fatal_and_log(
                "Non-finite state in radial integration; scaling invariant violated",
                InvariantViolation,
            )

        # fold growth into the exponent
        mag = np.max(np.abs(current), axis=1)
        grow = np.log(mag) > cfg.renorm_threshold
        if np.any(grow):
            current[grow] /= mag[grow][:, None]
            sub_exponent[grow] += np.log(mag[grow])

    state[active] = current
    exponent[active] = sub_exponent
    log.debug(
        f"Integrated {nk} wavenumber(s) to r = {r_end} in {steps} steps over "
        f"{len(edges) - 1} segments"
    )
    return SolutionBatch(r=r_end, ks=ks, exponent=exponent, state=state)


def integrate(
    profile: RadialProfile,
    k: complex,
    r_end: float = 1.0,
    cfg: Optional[IntegratorConfig] = None,
) -> SolutionSample:
    """y(r_end; k) and y'(r_end; k) as scaled values sharing one exponent."""
    return integrate_batch(profile, [k], r_end, cfg).sample(0)


def integrate_with_k_derivative(
    profile: RadialProfile,
    k: complex,
    r_end: float = 1.0,
    cfg: Optional[IntegratorConfig] = None,
) -> SolutionSample:
    """Like :func:`integrate`, plus dy/dk and dy'/dk from the variational equation
    (dy/dk)'' + k^2 n (dy/dk) = -2 k n y with zero initial data.
    """
    return integrate_batch(profile, [k], r_end, cfg, with_k_derivative=True).sample(0)


def z_from_solution(
    lmap: LiouvilleMap, sample: SolutionSample
) -> Tuple[ScaledComplex, ScaledComplex]:
    """Map (y, y') at radius r to the Liouville variables (z, dz/dxi), scaled by
    n(0)^(1/4) so that the result starts like sin(k xi)/k.
    """
    n, dn, _ = lmap.profile.eval(sample.r)
    scale = lmap.n_quarter
    z = sample.y * (scale * n**0.25)
    dz = sample.dy * (scale * n**-0.25) + sample.y * (scale * 0.25 * n**-1.25 * dn)
    return z, dz


def asymptotic_z(
    lmap: LiouvilleMap,
    r: float,
    k: complex,
    order: int = 2,
    k_floor: float = 1.0,
    derived_bracket: bool = False,
) -> Tuple[ScaledComplex, ScaledComplex]:
    """Large-k expansion of (z, dz/dxi) at the travel time xi = xi(r).

    ``order`` 0 keeps the leading sine/cosine, 1 adds the Q/(2k) corrections and 2
    adds the bracket terms ``[p(xi) + p(0) - Q^2/2] / (4k^3)`` for z and
    ``[p(xi) - p(0) - Q^2/2] / (4k^2)`` for z'.

    Differentiating the z expansion term by term gives ``p(0) - p(xi)`` in the z'
    bracket instead; ``derived_bracket=True`` uses that sign.
    """
    if order not in (0, 1, 2):
        fatal_and_log(f"order must be 0, 1 or 2, got {order}", DomainError)
    k = complex(k)
    if abs(k) < k_floor:
        fatal_and_log(
            f"|k| = {abs(k):.3g} is below the asymptotic floor {k_floor}", DomainError
        )

    xi = lmap.travel_time(r)
    sin_m, cos_m, grow = scaled_sin_cos(k * xi)
    sin_m, cos_m, grow = complex(sin_m), complex(cos_m), float(grow)

    z_m = sin_m / k
    dz_m = cos_m
    if order >= 1:
        q = lmap.potential_moment(r)
        z_m -= cos_m * q / (2.0 * k**2)
        dz_m += sin_m * q / (2.0 * k)
    if order >= 2:
        p = float(lmap.profile.potential(r))
        p0 = lmap.p0
        z_m += sin_m * (p + p0 - q**2 / 2.0) / (4.0 * k**3)
        bracket = (p0 - p) if derived_bracket else (p - p0)
        dz_m += cos_m * (bracket - q**2 / 2.0) / (4.0 * k**2)

    return ScaledComplex(z_m, grow), ScaledComplex(dz_m, grow)
