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

import math

import numpy as np
import pytest
from _pytest.logging import LogCaptureFixture

from itebasis import riesz
from itebasis.errors import ConditioningError, DomainError, NonConvergence
from itebasis.riesz import (
    ExponentialSystem,
    build_system,
    completeness_density,
    expand,
    frame_bounds,
    gram,
    grid_weights,
    quadrature_grid,
)
from itebasis.zeros import Box, Spectrum, ZeroRecord


def _fourier_system(M: int = 5, a: float = 2.0) -> ExponentialSystem:
    """exp(i j pi r / a) for |j| <= M, orthogonal on (-a, a)."""
    js = np.arange(-M, M + 1)
    return ExponentialSystem(
        nodes=js * math.pi / a + 0j, powers=np.zeros(len(js), dtype=int), a=a
    )


class TestBuildSystem:
    def test_mirror_and_order(self):
        records = [
            ZeroRecord(3.0 + 0j, 0.0),
            ZeroRecord(1.0 - 0.5j, 0.0, multiplicity=2),
        ]
        spectrum = Spectrum(records, Box(0.5, 5.0, -1.0, 1.0), "fp", B=1.5)
        system = build_system(spectrum)
        assert system.a == 2.5
        assert system.B == 1.5
        assert system.fingerprint == "fp"
        assert system.nodes.tolist() == [
            1.0 - 0.5j,
            1.0 - 0.5j,
            -1.0 + 0.5j,
            -1.0 + 0.5j,
            3.0,
            -3.0,
        ]
        assert system.powers.tolist() == [0, 1, 0, 1, 0, 0]
        assert not system.is_plain

    def test_symmetric_region_is_not_mirrored(self):
        records = [ZeroRecord(-2.0 + 0j, 0.0), ZeroRecord(2.0 + 0j, 0.0)]
        spectrum = Spectrum(records, Box(-3.0, 3.0, -1.0, 1.0), "", B=1.0)
        system = build_system(spectrum)
        assert system.nodes.tolist() == [2.0, -2.0]
        assert system.is_plain

    def test_incomplete_spectrum(self, caplog: LogCaptureFixture):
        records = [ZeroRecord(2.0 + 0j, 0.0)]
        spectrum = Spectrum(records, Box(1.0, 3.0, -1.0, 1.0), "", 1.0, complete=False)
        system = build_system(spectrum)
        assert "incomplete" in system.warnings[0]
        assert "incomplete spectrum" in caplog.text

    def test_no_zeros(self):
        spectrum = Spectrum([], Box(1.0, 3.0, -1.0, 1.0), "", B=1.0)
        with pytest.raises(DomainError, match="no zeros"):
            build_system(spectrum)

    def test_truncate(self):
        system = _fourier_system()
        assert len(system.truncate(3)) == 3
        for N in (0, 12):
            with pytest.raises(DomainError, match="Truncation"):
                system.truncate(N)


class TestGram:
    def test_fourier_control(self):
        system = _fourier_system()
        G = gram(system)
        assert G.closed_form
        assert np.allclose(G.matrix, 4.0 * np.eye(11), atol=1e-12)

    def test_normalized(self):
        G = gram(_fourier_system(), 4, normalize=True)
        assert G.N == 4
        assert np.allclose(np.diag(G.matrix), 1.0)
        assert np.allclose(G.scale, 0.5)

    def test_closed_form_matches_quadrature(self):
        system = ExponentialSystem(
            nodes=np.array([1.0 + 0.3j, 2.5 + 0j, -0.7 - 0.2j]),
            powers=np.zeros(3, dtype=int),
            a=1.8,
        )
        r, w = quadrature_grid(system.a, 80)
        E = system.evaluate(r)
        assert np.allclose(gram(system).matrix, (E.T * w) @ E.conj(), atol=1e-12)

    def test_generalized_by_quadrature(self):
        system = ExponentialSystem(
            nodes=np.array([2.0 + 0j, 2.0 + 0j]), powers=np.array([0, 1]), a=2.0
        )
        G = gram(system)
        assert not G.closed_form
        assert np.allclose(G.matrix, np.diag([4.0, 16.0 / 3.0]), atol=1e-12)

    def test_hermitian(self):
        system = ExponentialSystem(
            nodes=np.array([1.0 + 0.5j, 1.0 + 0.5j, -3.0 + 0j]),
            powers=np.array([0, 1, 0]),
            a=2.0,
        )
        G = gram(system).matrix
        assert np.array_equal(G, G.conj().T)


class TestFrameBounds:
    def test_fourier(self):
        report = frame_bounds(_fourier_system(), [5, 3, 100])
        assert [row.N for row in report.rows] == [3, 5]
        for row in report.rows:
            assert row.lambda_min == pytest.approx(4.0)
            assert row.lambda_max == pytest.approx(4.0)
            assert row.cond == pytest.approx(1.0)
        assert report.lower_bounded and report.upper_bounded

    def test_no_truncation_fits(self):
        with pytest.raises(DomainError, match="No truncation"):
            frame_bounds(_fourier_system(), [50])

    def test_inaccurate_eigensolver(self, monkeypatch: pytest.MonkeyPatch):
        def off(G):
            return np.full(len(G), 1e3), np.eye(len(G), dtype=complex)

        monkeypatch.setattr(riesz.sla, "eigh", off)
        with pytest.raises(NonConvergence, match="eigensolver residual"):
            frame_bounds(_fourier_system(), [5])


class TestGridWeights:
    def test_gauss_legendre(self):
        r, w = quadrature_grid(2.0, 20)
        assert np.array_equal(grid_weights(r, 2.0), w)
        assert np.sum(w) == pytest.approx(4.0)

    def test_trapezoid(self):
        assert grid_weights(np.array([0.0, 1.0, 2.0]), 2.0).tolist() == [
            0.5,
            1.0,
            0.5,
        ]

    def test_not_increasing(self):
        with pytest.raises(DomainError, match="increasing"):
            grid_weights(np.array([0.0, 1.0, 1.0]), 2.0)

    def test_bad_grid(self):
        with pytest.raises(DomainError, match="quadrature_grid"):
            quadrature_grid(-1.0, 4)


class TestExpand:
    def test_member_is_recovered(self):
        system = _fourier_system()
        r, _ = quadrature_grid(system.a, 64)
        j = 7
        f = np.exp(1j * system.nodes[j] * r)
        result = expand(r, f, system, len(system))
        expected = np.zeros(len(system), dtype=complex)
        expected[j] = 1.0
        assert np.allclose(result.coefficients, expected, atol=1e-10)
        assert result.relative_residual < 1e-10
        assert result.quadrature_error < 1e-8
        assert result.condition == pytest.approx(1.0)

    def test_generalized_member(self):
        system = ExponentialSystem(
            nodes=np.array([2.0 + 0j, 2.0 + 0j, -1.0 + 0j]),
            powers=np.array([0, 1, 0]),
            a=2.0,
        )
        r, _ = quadrature_grid(system.a, 48)
        f = r * np.exp(2j * r) + 0.5 * np.exp(-1j * r)
        result = expand(r, f, system, 3)
        assert np.allclose(result.coefficients, [0.0, 1.0, 0.5], atol=1e-9)

    def test_ill_conditioned(self):
        system = ExponentialSystem(
            nodes=np.array([1.0 + 0j, 1.0 + 1e-9 + 0j]),
            powers=np.zeros(2, dtype=int),
            a=1.0,
        )
        r, _ = quadrature_grid(system.a, 16)
        with pytest.raises(ConditioningError, match="ill-conditioned"):
            expand(r, np.ones(16), system, 2)

    def test_unresolved_grid(self):
        system = _fourier_system(M=20)
        r, _ = quadrature_grid(system.a, 10)
        with pytest.raises(DomainError, match="do not resolve"):
            expand(r, np.ones(10), system, len(system))

    def test_samples_outside(self):
        system = _fourier_system(M=1)
        r = np.linspace(-3.0, 3.0, 40)
        with pytest.raises(DomainError, match="outside"):
            expand(r, np.ones(40), system, 3)

    def test_shape_mismatch(self):
        system = _fourier_system(M=1)
        with pytest.raises(DomainError, match="equal length"):
            expand(np.linspace(-1, 1, 40), np.ones(39), system, 3)


class TestCompleteness:
    def test_fourier_counts(self):
        report = completeness_density(_fourier_system(), [10.0, 5.0])
        assert report.radii == [5.0, 10.0]
        assert report.counts == [7, 11]
        assert report.estimates[0] == pytest.approx(1.4)
        assert report.target == pytest.approx(4.0 / math.pi)
        assert any("exceeds the largest node" in c for c in report.caveats)

    def test_bad_radii(self):
        with pytest.raises(DomainError, match="positive radii"):
            completeness_density(_fourier_system(), [0.0])
