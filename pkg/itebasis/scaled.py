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

"""Complex numbers carried as ``mantissa * exp(exponent)``.

The transmission determinant grows like exp((1 + B)|Im k|) and easily leaves the
double-precision range, so every value that can grow is kept in this form.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

# beyond this exponent gap the smaller addend is below double precision
_ADD_GAP = 60.0

Number = Union[int, float, complex]


def _normalize(mantissa: complex, exponent: float) -> Tuple[complex, float]:
    if mantissa == 0:
        return 0j, 0.0
    mag = abs(mantissa)
    shift = math.floor(math.log(mag))
    mantissa = mantissa * math.exp(-shift)
    exponent = exponent + shift
    # floor(log) can be off by one ulp at the interval ends
    mag = abs(mantissa)
    if mag >= math.e:
        mantissa, exponent = mantissa / math.e, exponent + 1.0
    elif mag < 1.0:
        mantissa, exponent = mantissa * math.e, exponent - 1.0
    return mantissa, exponent


@dataclass(frozen=True)
class ScaledComplex:
    """A complex value ``mantissa * e**exponent`` with ``1 <= |mantissa| < e``.

    Parameters
    ----------
    mantissa
        Complex mantissa. Zero is represented with a zero exponent.
    exponent
        Natural-log scale.
    """

    mantissa: complex
    exponent: float = 0.0

    def __post_init__(self):
        m, e = _normalize(complex(self.mantissa), float(self.exponent))
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def from_complex(cls, value: Number) -> "ScaledComplex":
        return cls(complex(value), 0.0)

    @classmethod
    def coerce(cls, value: Union["ScaledComplex", Number]) -> "ScaledComplex":
        if isinstance(value, ScaledComplex):
            return value
        return cls.from_complex(value)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def log_abs(self) -> float:
        """log|value|, or -inf for zero."""
        if self.is_zero:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent

    def phase(self) -> float:
        return cmath.phase(self.mantissa)

    def to_complex(self) -> complex:
        """The plain complex value. Overflows to inf for huge exponents."""
        if self.is_zero:
            return 0j
        if self.exponent > 709.0:
            re, im = self.mantissa.real, self.mantissa.imag
            return complex(
                math.copysign(math.inf, re) if re else 0.0,
                math.copysign(math.inf, im) if im else 0.0,
            )
        return self.mantissa * math.exp(self.exponent)

    def scaled_abs(self, log_envelope: float) -> float:
        """|value| * exp(-log_envelope), computed without overflow."""
        if self.is_zero:
            return 0.0
        return abs(self.mantissa) * math.exp(self.exponent - log_envelope)

    def conj(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.conjugate(), self.exponent)

    def __neg__(self) -> "ScaledComplex":
        return ScaledComplex(-self.mantissa, self.exponent)

    def __mul__(self, other) -> "ScaledComplex":
        other = ScaledComplex.coerce(other)
        return ScaledComplex(
            self.mantissa * other.mantissa, self.exponent + other.exponent
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledComplex":
        other = ScaledComplex.coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by a zero ScaledComplex")
        return ScaledComplex(
            self.mantissa / other.mantissa, self.exponent - other.exponent
        )

    def __add__(self, other) -> "ScaledComplex":
        other = ScaledComplex.coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        big, small = (self, other) if self.exponent >= other.exponent else (other, self)
        gap = big.exponent - small.exponent
        if gap > _ADD_GAP:
            return big
        return ScaledComplex(
            big.mantissa + small.mantissa * math.exp(-gap), big.exponent
        )

    __radd__ = __add__

    def __sub__(self, other) -> "ScaledComplex":
        return self + (-ScaledComplex.coerce(other))

    def __rsub__(self, other) -> "ScaledComplex":
        return ScaledComplex.coerce(other) - self

    def isclose(self, other, rel_tol: float = 1e-12, abs_tol: float = 0.0) -> bool:
        """Compare represented values without leaving the scaled form."""
        other = ScaledComplex.coerce(other)
        diff = self - other
        if diff.is_zero:
            return True
        ref = max(self.log_abs(), other.log_abs())
        if abs_tol > 0 and diff.log_abs() <= math.log(abs_tol):
            return True
        return ref > -math.inf and diff.log_abs() <= math.log(rel_tol) + ref

    def to_pair(self) -> Tuple[float, float]:
        """[re, im] of the value for reports; non-finite parts become None later."""
        value = self.to_complex()
        return value.real, value.imag


def normalize_arrays(
    mantissa: np.ndarray, exponent: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized normalization of mantissa/exponent arrays into ``[1, e)``."""
    mantissa = np.asarray(mantissa, dtype=complex)
    exponent = np.asarray(exponent, dtype=float)
    mag = np.abs(mantissa)
    nonzero = mag > 0
    shift = np.zeros_like(exponent)
    shift[nonzero] = np.floor(np.log(mag[nonzero]))
    mantissa = np.where(nonzero, mantissa * np.exp(-shift), 0j)
    exponent = np.where(nonzero, exponent + shift, 0.0)
    return mantissa, exponent


def log_abs_arrays(mantissa: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    """log|mantissa * e**exponent| elementwise, -inf where the mantissa is zero."""
    mag = np.abs(mantissa)
    with np.errstate(divide="ignore"):
        logs = np.log(np.where(mag > 0, mag, 1.0)) + exponent
        return np.where(mag > 0, logs, -np.inf)


def scaled_sin_cos(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """sin t and cos t for complex t as mantissas sharing the exponent |Im t|.

    Returns ``(sin_m, cos_m, exponent)`` with ``sin t = sin_m * e**exponent``.
    """
    t = np.asarray(t, dtype=complex)
    grow = np.abs(t.imag)
    with np.errstate(over="ignore", invalid="ignore"):
        # np.sin keeps full relative accuracy near t = 0
        direct = grow < 300.0
        damp = np.exp(-grow)
        up = np.exp(1j * t - grow)
        down = np.exp(-1j * t - grow)
        sin_m = np.where(direct, np.sin(t) * damp, (up - down) / 2j)
        cos_m = np.where(direct, np.cos(t) * damp, (up + down) / 2.0)
    return sin_m, cos_m, grow
