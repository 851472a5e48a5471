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

"""Radial refractive index profiles and the quantities of the Liouville transform.

A profile is the index n(r) on [0, 1]; outside the unit ball the medium is the
background n = 1. The Liouville transform ``xi(r) = int_0^r sqrt(n)``,
``z = n**(1/4) y`` turns the radial equation into ``z'' + (k**2 - p(xi)) z = 0``,
and this module provides B = xi(1), the potential p and its integral Q.
"""

import abc
import enum
import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Tuple, Union

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import ConfigError, DomainError, NonConvergence
from .log import fatal_and_log, log

ArrayLike = Union[float, np.ndarray]

# dense grid used to check positivity at construction
_CHECK_POINTS = 2049
_BOUNDARY_TOL = 1e-12
_BOUNDARY_DERIVATIVE_WARN = 1e-6


class ProfileKind(str, enum.Enum):
    """The supported shapes of n(r)."""

    CONSTANT = "constant"
    SMOOTH_BUMP = "smooth_bump"
    SPLINE_GRID = "spline_grid"


class RadialProfile(abc.ABC):
    """The refractive index n(r) on the unit interval, with two derivatives."""

    kind: ProfileKind

    @abc.abstractmethod
    def _derivatives(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """n, n', n'' at radii already known to lie in [0, 1]."""

    @abc.abstractmethod
    def to_dict(self) -> dict:
        """The canonical config section describing this profile."""

    def index(self, r: np.ndarray) -> np.ndarray:
        """n(r) without domain checks, for the radial solver's right-hand side."""
        return self._derivatives(np.asarray(r, dtype=float))[0]

    def is_unit_index(self) -> bool:
        """Whether n == 1 identically, the one case where the determinant vanishes."""
        return False

    def eval(self, r: ArrayLike) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
        """Return (n, n', n'') at ``r``.

        Raises DomainError if any radius lies outside [0, 1].
        """
        arr = np.asarray(r, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            fatal_and_log(f"Radius {r} is outside [0, 1]", DomainError)
        n, dn, d2n = self._derivatives(arr)
        if arr.ndim == 0:
            return float(n), float(dn), float(d2n)
        return n, dn, d2n

    def potential(self, r: ArrayLike) -> ArrayLike:
        """The Liouville potential p = n''/(4 n^2) - (5/16) n'^2 / n^3 at the point
        xi(r), evaluated with the r-space formula.
        """
        n, dn, d2n = self.eval(r)
        return d2n / (4.0 * n**2) - 5.0 / 16.0 * dn**2 / n**3

    def fingerprint(self) -> str:
        """First 16 hex digits of the sha256 of the canonical profile JSON."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def _check(self):
        r = np.linspace(0.0, 1.0, _CHECK_POINTS)
        n, dn, d2n = self._derivatives(r)
        if not np.all(np.isfinite(n)) or np.min(n) <= 0.0:
            fatal_and_log(
                f"Profile {self.to_dict()} is not positive on [0, 1] "
                f"(min n = {np.min(n):.6g})",
                DomainError,
            )
        if self.kind != ProfileKind.CONSTANT:
            if abs(n[-1] - 1.0) > _BOUNDARY_TOL:
                fatal_and_log(
                    f"Profile must match the background at r = 1, got n(1) = {n[-1]!r}",
                    DomainError,
                )
            if max(abs(dn[-1]), abs(d2n[-1])) > _BOUNDARY_DERIVATIVE_WARN:
                log.warning(
                    "Profile is not C2 across r = 1: "
                    f"n'(1) = {dn[-1]:.3g}, n''(1) = {d2n[-1]:.3g}"
                )


@dataclass(frozen=True)
class ConstantProfile(RadialProfile):
    """n(r) = n0 everywhere inside the scatterer."""

    n0: float
    kind: ProfileKind = field(default=ProfileKind.CONSTANT, init=False, repr=False)

    def __post_init__(self):
        if not np.isfinite(self.n0) or self.n0 <= 0:
            fatal_and_log(
                f"Constant index must be positive, got {self.n0}", DomainError
            )

    def _derivatives(self, r):
        n = np.full_like(r, float(self.n0), dtype=float)
        zero = np.zeros_like(n)
        return n, zero, zero

    def is_unit_index(self) -> bool:
        return self.n0 == 1.0

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "n0": float(self.n0)}


@dataclass(frozen=True)
class SmoothBumpProfile(RadialProfile):
    """n(r) = 1 + amplitude * (1 - r^2)^power, with an integer power >= 3 so that n
    joins the background with two continuous derivatives.
    """

    amplitude: float
    power: int = 3
    kind: ProfileKind = field(default=ProfileKind.SMOOTH_BUMP, init=False, repr=False)

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 3:
            fatal_and_log(
                f"Bump power must be an integer >= 3, got {self.power}", DomainError
            )
        object.__setattr__(self, "power", int(self.power))
        self._check()

    def _derivatives(self, r):
        a, m = float(self.amplitude), self.power
        s = 1.0 - r**2
        n = 1.0 + a * s**m
        dn = -2.0 * a * m * r * s ** (m - 1)
        d2n = -2.0 * a * m * s ** (m - 1) + 4.0 * a * m * (m - 1) * r**2 * s ** (m - 2)
        return n, dn, d2n

    def is_unit_index(self) -> bool:
        return self.amplitude == 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "amplitude": float(self.amplitude),
            "power": self.power,
        }


class SplineBoundary(str, enum.Enum):
    NATURAL = "natural"
    CLAMPED = "clamped"


@dataclass(frozen=True)
class SplineGridProfile(RadialProfile):
    """A cubic spline through samples (r_i, n_i) with r_0 = 0 and r_M = 1.

    ``boundary="natural"`` sets n'' = 0 at both ends; ``"clamped"`` sets n' = 0,
    which is what a profile extended evenly through the origin and by n = 1
    outside the ball requires.
    """

    r: Tuple[float, ...]
    n: Tuple[float, ...]
    boundary: SplineBoundary = SplineBoundary.NATURAL
    kind: ProfileKind = field(default=ProfileKind.SPLINE_GRID, init=False, repr=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        n = np.asarray(self.n, dtype=float)
        if r.ndim != 1 or r.shape != n.shape or len(r) < 4:
            fatal_and_log(
                "Spline profile needs matching 1-D r and n arrays with at least 4 "
                "points",
                DomainError,
            )
        if r[0] != 0.0 or r[-1] != 1.0 or np.any(np.diff(r) <= 0):
            fatal_and_log(
                "Spline abscissae must increase strictly from 0 to 1", DomainError
            )
        if np.any(n <= 0):
            fatal_and_log("Spline samples must be positive", DomainError)
        object.__setattr__(self, "r", tuple(float(x) for x in r))
        object.__setattr__(self, "n", tuple(float(x) for x in n))
        object.__setattr__(self, "boundary", SplineBoundary(self.boundary))
        self._check()

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.r, self.n, bc_type=self.boundary.value)

    def _derivatives(self, r):
        spline = self._spline
        return spline(r), spline(r, 1), spline(r, 2)

    def is_unit_index(self) -> bool:
        return all(x == 1.0 for x in self.n)

    @property
    def knots(self) -> List[float]:
        return list(self.r)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "r": list(self.r),
            "n": list(self.n),
            "boundary": self.boundary.value,
        }


_PROFILE_KEYS = {
    ProfileKind.CONSTANT: {"kind", "n0"},
    ProfileKind.SMOOTH_BUMP: {"kind", "amplitude", "power"},
    ProfileKind.SPLINE_GRID: {"kind", "r", "n", "boundary"},
}


def profile_from_dict(spec: dict) -> RadialProfile:
    """Build a profile from its config section, rejecting unknown keys."""
    if not isinstance(spec, dict) or "kind" not in spec:
        fatal_and_log("profile section needs a 'kind'", ConfigError)
    try:
        kind = ProfileKind(spec["kind"])
    except ValueError:
        fatal_and_log(
            f"Unknown profile kind '{spec['kind']}', expected one of "
            f"{[k.value for k in ProfileKind]}",
            ConfigError,
        )

    unknown = set(spec) - _PROFILE_KEYS[kind]
    if unknown:
        fatal_and_log(f"Unknown key(s) profile.{sorted(unknown)}", ConfigError)

    try:
        if kind == ProfileKind.CONSTANT:
            return ConstantProfile(n0=float(spec["n0"]))
        if kind == ProfileKind.SMOOTH_BUMP:
            return SmoothBumpProfile(
                amplitude=float(spec["amplitude"]), power=spec.get("power", 3)
            )
        return SplineGridProfile(
            r=tuple(spec["r"]),
            n=tuple(spec["n"]),
            boundary=spec.get("boundary", SplineBoundary.NATURAL.value),
        )
    except KeyError as e:
        fatal_and_log(f"profile section is missing {e}", ConfigError)
    except (TypeError, ValueError) as e:
        # DomainError is a ValueError too; keep it as a config problem for the CLI
        raise ConfigError(f"Invalid profile section: {e}") from e


@dataclass
class LiouvilleMap:
    """The Liouville change of variables for one profile.

    All xi-space quantities are computed by r-space quadrature; xi(r) is never
    inverted.

    Parameters
    ----------
    profile
        The radial profile.
    eps_q
        Absolute accuracy target of every quadrature.
    """

    profile: RadialProfile
    eps_q: float = 1e-12

    def _quad(self, func, r: float, what: str) -> float:
        if r < 0.0 or r > 1.0:
            fatal_and_log(f"Radius {r} is outside [0, 1]", DomainError)
        if r == 0.0:
            return 0.0
        kwargs = {}
        if isinstance(self.profile, SplineGridProfile):
            breaks = [x for x in self.profile.knots if 0.0 < x < r]
            if breaks:
                kwargs["points"] = breaks
        value, abserr, *_ = quad(
            func,
            0.0,
            r,
            epsabs=self.eps_q,
            epsrel=0.0,
            limit=400,
            full_output=1,
            **kwargs,
        )
        if not np.isfinite(value) or abserr > self.eps_q:
            fatal_and_log(
                f"Quadrature of {what} to r = {r} did not reach {self.eps_q:g} "
                f"(achieved {abserr:.3g})",
                NonConvergence,
                detail={"achieved_error": abserr, "r": r},
            )
        return float(value)

    def _sqrt_n(self, rho: float) -> float:
        return float(np.sqrt(self.profile.index(rho)))

    def travel_time(self, r: float) -> float:
        """xi(r) = int_0^r sqrt(n(rho)) d rho."""
        return self._quad(self._sqrt_n, float(r), "sqrt(n)")

    def potential_moment(self, r: float) -> float:
        """Q(xi(r)) = int_0^r p(xi(rho)) sqrt(n(rho)) d rho."""
        return self._quad(
            lambda rho: float(self.profile.potential(rho)) * self._sqrt_n(rho),
            float(r),
            "p sqrt(n)",
        )

    @cached_property
    def B(self) -> float:
        """Total travel time xi(1)."""
        return self.travel_time(1.0)

    @cached_property
    def Q_B(self) -> float:
        return self.potential_moment(1.0)

    @property
    def p0(self) -> float:
        return float(self.profile.potential(0.0))

    @property
    def p_B(self) -> float:
        return float(self.profile.potential(1.0))

    @property
    def n_quarter(self) -> float:
        """n(0)^(1/4)."""
        return float(self.profile.eval(0.0)[0]) ** 0.25

    @property
    def boundary_quarter(self) -> float:
        """n(1)^(1/4); 1 for every profile that joins the background."""
        return float(self.profile.eval(1.0)[0]) ** 0.25
