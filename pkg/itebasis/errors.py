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

"""Exception hierarchy. Every error knows the exit code the CLI reports for it."""

from typing import Optional


class ItebasisError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1

    def __init__(self, msg: str = "", detail: Optional[dict] = None):
        super().__init__(msg)
        self.detail = detail or {}


class ConfigError(ItebasisError, ValueError):
    """The run configuration could not be parsed or failed validation."""

    exit_code = 2


class DomainError(ItebasisError, ValueError):
    """An argument lies outside the domain where an operation is defined."""

    exit_code = 2


class NotAnEigenvalue(ItebasisError, ValueError):
    """The requested wavenumber is not a zero of the determinant."""

    exit_code = 2


class NonConvergence(ItebasisError, ArithmeticError):
    """A quadrature, integration, Newton or eigenvalue procedure did not converge."""

    exit_code = 3


class ConditioningError(NonConvergence):
    """A Gram system is numerically singular."""


class BoundaryCollision(ItebasisError):
    """A zero of the determinant keeps landing on a counting contour."""

    exit_code = 4


class DegenerateDeterminant(ItebasisError):
    """The determinant vanishes identically, which happens exactly when n == 1."""

    exit_code = 5


class InvariantViolation(ItebasisError, AssertionError):
    """Internal state became non-finite. This is a bug, not a user error."""

    exit_code = 1
