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

"""Zeros of D0 in a rectangle of the complex plane.

Zeros are counted with the argument principle: the phase of D0 is followed around
the box boundary with adaptive sampling. Boxes are subdivided recursively until
each leaf is small. The zeros in a leaf are then recovered from the contour
moments of D0'/D0, and simple zeros are polished by Newton's method. The module
also reports angular densities, strip counts and separation of a spectrum.
"""

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import legendre
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import brentq
from scipy.spatial.distance import pdist, squareform

from .determinant import Determinant
from .errors import BoundaryCollision, DomainError, NonConvergence
from .log import fatal_and_log, log
from .profile import RadialProfile

# phase steps along a contour must stay below this
_MAX_PHASE_STEP = math.pi / 2.0
_MAX_REFINE_ROUNDS = 40
_MAX_LOG_STEP = 1.0
_MIN_EDGE_SAMPLES = 8
_SNAP_IMAG = 1e-10
_PANEL_NODES = 16


@dataclass(frozen=True)
class Box:
    """A closed rectangle [re_min, re_max] x [im_min, im_max]."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            fatal_and_log(f"Box {self} has an empty interior", DomainError)

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def side(self) -> float:
        return max(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(
            (self.re_min + self.re_max) / 2.0, (self.im_min + self.im_max) / 2.0
        )

    @property
    def aspect(self) -> float:
        return max(self.width / self.height, self.height / self.width)

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.height)

    def contains(self, k: complex, pad: float = 0.0) -> bool:
        return (
            self.re_min - pad <= k.real <= self.re_max + pad
            and self.im_min - pad <= k.imag <= self.im_max + pad
        )

    def inflate(self, left: float, right: float, bottom: float, top: float) -> "Box":
        return Box(
            self.re_min - left,
            self.re_max + right,
            self.im_min - bottom,
            self.im_max + top,
        )

    def edges(self) -> List[Tuple[complex, complex]]:
        """The boundary as four counter-clockwise segments."""
        a = complex(self.re_min, self.im_min)
        b = complex(self.re_max, self.im_min)
        c = complex(self.re_max, self.im_max)
        d = complex(self.re_min, self.im_max)
        return [(a, b), (b, c), (c, d), (d, a)]

    def point_at(self, t: np.ndarray) -> np.ndarray:
        """Boundary point at parameter t in [0, 4]; each unit of t is one edge."""
        t = np.asarray(t, dtype=float)
        edge = np.minimum(np.floor(t).astype(int), 3)
        frac = t - edge
        starts = np.array([e[0] for e in self.edges()])
        ends = np.array([e[1] for e in self.edges()])
        return starts[edge] + frac * (ends[edge] - starts[edge])

    def closest_distance_to_origin(self) -> float:
        dx = max(self.re_min, 0.0, -self.re_max)
        dy = max(self.im_min, 0.0, -self.im_max)
        return math.hypot(dx, dy)

    def to_dict(self) -> dict:
        return {
            "re_min": self.re_min,
            "re_max": self.re_max,
            "im_min": self.im_min,
            "im_max": self.im_max,
        }


@dataclass
class SearchConfig:
    """Tolerances and budgets of the zero search.

    Parameters
    ----------
    zero_tol
        Largest envelope-normalized |D0| accepted at a reported zero.
    merge_tol
        Zeros closer than this are the same zero.
    boundary_tol
        A contour sample with normalized |D0| below this is a collision.
    cluster_tol
        Roots of one leaf closer than this form one multiple zero.
    leaf_size
        Boxes with both sides at most this are solved by contour moments.
    tile_size
        Largest side of the first level of boxes under the search region.
    max_boxes
        Budget of winding counts; exhausting it returns a partial spectrum.
    max_im
        Largest |Im k| a search region may reach.
    origin_exclusion
        Radius of the disk around k = 0 no search region may touch.
    min_box
        Boxes are not split below this side; their winding count becomes one
        cluster record.
    leaf_max_winding
        Largest winding count solved by moments in one leaf.
    max_jitter
        Retries with moved contours before a collision is fatal.
    seed
        Seed of the contour jitter.
    workers
        Threads working on independent subtrees.
    """

    zero_tol: float = 1e-10
    merge_tol: float = 1e-6
    boundary_tol: float = 1e-9
    cluster_tol: float = 5e-3
    leaf_size: float = 1.0
    tile_size: float = 4.0
    max_boxes: int = 20000
    max_im: float = 20.0
    origin_exclusion: float = 0.1
    min_box: float = 1e-8
    leaf_max_winding: int = 6
    max_jitter: int = 5
    seed: int = 0
    workers: int = 1


@dataclass
class ZeroRecord:
    """A located zero of D0."""

    k: complex
    residual: float
    multiplicity: int = 1
    newton_iters: int = 0
    origin_box: Optional[Box] = None

    def to_dict(self) -> dict:
        return {
            "k": [self.k.real, self.k.imag],
            "residual": self.residual,
            "multiplicity": self.multiplicity,
            "newton_iters": self.newton_iters,
            "origin_box": self.origin_box.to_dict() if self.origin_box else None,
        }


def _sort_key(record: ZeroRecord) -> Tuple[float, float]:
    return (record.k.real, record.k.imag)


@dataclass
class Spectrum:
    """Zeros of D0 found in a search region.

    ``records`` are ordered by real part, then imaginary part. ``winding`` is the
    winding count of the whole region, which equals the sum of multiplicities.
    """

    records: List[ZeroRecord]
    region: Box
    fingerprint: str
    B: float
    complete: bool = True
    winding: Optional[int] = None
    boxes_used: int = 0

    def __post_init__(self):
        self.records = sorted(self.records, key=_sort_key)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def ks(self) -> np.ndarray:
        return np.array([r.k for r in self.records], dtype=complex)

    @property
    def total_multiplicity(self) -> int:
        return sum(r.multiplicity for r in self.records)

    def full_plane(self) -> List[Tuple[complex, int]]:
        """Zeros with multiplicity, completed by the symmetries k -> conj(k),
        k -> -k and k -> -conj(k).

        An image is skipped when an earlier symmetry maps it back into the region,
        so a region holding both k and conj(k) yields each image once.
        """
        symmetries = (
            lambda z: z,
            lambda z: z.conjugate(),
            lambda z: -z,
            lambda z: -z.conjugate(),
        )
        out = []
        for rec in self.records:
            for i, g in enumerate(symmetries):
                image = complex(g(rec.k))
                # every symmetry is an involution
                if any(self.region.contains(h(image)) for h in symmetries[:i]):
                    continue
                out.append((image, rec.multiplicity))
        return sorted(out, key=lambda item: (item[0].real, item[0].imag))

    def to_dict(self) -> dict:
        return {
            "region": self.region.to_dict(),
            "fingerprint": self.fingerprint,
            "B": self.B,
            "complete": self.complete,
            "winding": self.winding,
            "total_multiplicity": self.total_multiplicity,
            "boxes_used": self.boxes_used,
            "zeros": [r.to_dict() for r in self.records],
        }


def _box_rng(box: Box, seed: int, attempt: int) -> np.random.Generator:
    """A generator seeded by the box coordinates, so jitter does not depend on the
    order in which boxes are processed.
    """
    coords = np.array([box.re_min, box.re_max, box.im_min, box.im_max], dtype=float)
    words = np.frombuffer(coords.tobytes(), dtype=np.uint32).tolist()
    return np.random.default_rng([int(seed), int(attempt), *words])


class _Counter:
    """Thread-safe budget of winding counts."""

    def __init__(self, budget: int):
        self.budget = budget
        self.used = 0
        self.exhausted = False
        self._lock = threading.Lock()

    def take(self, n: int) -> bool:
        with self._lock:
            if self.used + n > self.budget:
                self.exhausted = True
                return False
            self.used += n
            return True


class ZeroFinder:
    """Argument-principle zero search for one determinant.

    Parameters
    ----------
    det
        The determinant.
    cfg
        Search tolerances and budgets.
    """

    def __init__(self, det: Determinant, cfg: Optional[SearchConfig] = None):
        self.det = det
        self.cfg = cfg or SearchConfig()
        self._counter = _Counter(self.cfg.max_boxes)

    # ------------------------------------------------------------------ winding

    def _initial_params(self, box: Box) -> np.ndarray:
        ts = [np.array([0.0])]
        for i, (a, b) in enumerate(box.edges()):
            n = max(
                _MIN_EDGE_SAMPLES,
                int(math.ceil(2.0 * abs(b - a) * self.det.exponential_type)) + 2,
            )
            ts.append(i + np.arange(1, n + 1) / n)
        return np.concatenate(ts)

    def winding_counts(self, boxes: Sequence[Box]) -> List[Optional[int]]:
        """Winding numbers of D0 around several boxes, sampled in shared batches.

        A contour step is accepted when its phase change stays below pi/2 and its
        length times |D0'/D0| at both ends stays below one; any other step is
        bisected. An entry is None when a boundary sample came within
        boundary_tol of a zero.
        """
        params = [self._initial_params(b) for b in boxes]
        values: List[Optional[np.ndarray]] = [None] * len(boxes)
        rates: List[Optional[np.ndarray]] = [None] * len(boxes)
        pending = list(range(len(boxes)))
        # evaluate every new parameter of every pending box in one batch
        new = {i: params[i] for i in pending}
        result: List[Optional[int]] = [None] * len(boxes)

        for _ in range(_MAX_REFINE_ROUNDS):
            if not pending:
                break
            ks = np.concatenate([boxes[i].point_at(new[i]) for i in pending])
            mantissa, deriv, exponent = self.det.evaluate_with_derivative(ks)
            normalized = np.abs(mantissa) * np.exp(
                exponent - self.det.log_envelope(ks)
            )
            with np.errstate(divide="ignore", invalid="ignore"):
                log_rate = np.abs(deriv / mantissa)
            offset = 0
            still = []
            for i in pending:
                count = len(new[i])
                m = mantissa[offset : offset + count]
                rate = log_rate[offset : offset + count]
                low = normalized[offset : offset + count]
                offset += count
                if np.any(low < self.cfg.boundary_tol) or not np.all(
                    np.isfinite(rate)
                ):
                    log.debug(f"Contour of {boxes[i]} passes close to a zero")
                    result[i] = None
                    continue
                if values[i] is None:
                    ts, vs, rs = new[i], m, rate
                else:
                    ts = np.concatenate([params[i], new[i]])
                    vs = np.concatenate([values[i], m])
                    rs = np.concatenate([rates[i], rate])
                order = np.argsort(ts, kind="stable")
                params[i], values[i], rates[i] = ts[order], vs[order], rs[order]
                # the contour is closed: t = 4 is the same point as t = 0
                closed = np.append(values[i], values[i][0])
                closed_rate = np.append(rates[i], rates[i][0])
                closed_t = np.append(params[i], 4.0)
                points = boxes[i].point_at(closed_t)
                steps = np.angle(closed[1:] / closed[:-1])
                lengths = np.abs(np.diff(points))
                spread = lengths * np.maximum(closed_rate[1:], closed_rate[:-1])
                bad = (np.abs(steps) >= _MAX_PHASE_STEP) | (spread > _MAX_LOG_STEP)
                if np.any(bad):
                    new[i] = (closed_t[:-1][bad] + closed_t[1:][bad]) / 2.0
                    still.append(i)
                else:
                    turns = float(np.sum(steps)) / (2.0 * math.pi)
                    result[i] = int(round(turns))
            pending = still
        else:
            if pending:
                fatal_and_log(
                    "Phase sampling did not resolve the contour of "
                    f"{boxes[pending[0]]}",
                    NonConvergence,
                )
        return result

    def winding_count(self, box: Box) -> int:
        """Winding number of D0 around ``box``.

        On a boundary collision the box is inflated outward by a seeded jitter of
        at most 1% of its smaller side and recounted, up to ``max_jitter`` times.
        """
        return self._jittered_region(box)[1]

    def _jittered_region(self, box: Box) -> Tuple[Box, int]:
        current = box
        for attempt in range(self.cfg.max_jitter + 1):
            count = self.winding_counts([current])[0]
            if count is not None:
                return current, count
            rng = _box_rng(box, self.cfg.seed, attempt)
            pad = 0.01 * min(box.width, box.height) * rng.uniform(0.2, 1.0, size=4)
            current = box.inflate(*pad)
            log.debug(f"Retrying winding count on jittered box {current}")
        fatal_and_log(
            f"A zero of D0 stays on the contour of {box} after "
            f"{self.cfg.max_jitter} jitters",
            BoundaryCollision,
        )

    # ------------------------------------------------------------- subdivision

    def _cuts(self, lo: float, hi: float, pieces: int, rng, avoid_zero: bool):
        """Interior cut positions near the equal split, moved by up to 5% of the
        piece length, and kept 10% of a piece away from 0 when ``avoid_zero``.
        """
        length = (hi - lo) / pieces
        cuts = lo + length * np.arange(1, pieces)
        cuts = cuts + length * rng.uniform(-0.05, 0.05, size=len(cuts))
        if avoid_zero:
            near = np.abs(cuts) < 0.1 * length
            for j in np.flatnonzero(near):
                up, down = 0.1 * length, -0.1 * length
                cuts[j] = up if up < hi - 0.05 * length else down
        return cuts

    def _split(self, box: Box, attempt: int, tiles: bool = False) -> List[Box]:
        if tiles:
            nx = max(1, int(math.ceil(box.width / self.cfg.tile_size)))
            ny = max(1, int(math.ceil(box.height / self.cfg.tile_size)))
        elif box.width > 2.0 * box.height:
            nx, ny = 2, 1
        elif box.height > 2.0 * box.width:
            nx, ny = 1, 2
        else:
            nx, ny = 2, 2
        rng = _box_rng(box, self.cfg.seed, attempt)
        x_cuts = self._cuts(box.re_min, box.re_max, nx, rng, False)
        y_cuts = self._cuts(box.im_min, box.im_max, ny, rng, True)
        xs = np.concatenate([[box.re_min], x_cuts, [box.re_max]])
        ys = np.concatenate([[box.im_min], y_cuts, [box.im_max]])
        return [
            Box(float(xs[i]), float(xs[i + 1]), float(ys[j]), float(ys[j + 1]))
            for i in range(nx)
            for j in range(ny)
        ]

    def _children(self, box: Box, winding: int, tiles: bool = False):
        """Split ``box`` and count its children, moving the cut lines on collisions
        or when the children do not add up to the parent.
        """
        for attempt in range(self.cfg.max_jitter + 1):
            children = self._split(box, attempt, tiles)
            if not self._counter.take(len(children)):
                return None
            counts = self.winding_counts(children)
            if all(c is not None for c in counts) and sum(counts) == winding:
                return list(zip(children, counts))
            log.debug(f"Re-cutting {box}: child counts {counts}, parent {winding}")
        fatal_and_log(
            f"Could not cut {box} without a zero on a cut line after "
            f"{self.cfg.max_jitter} attempts",
            BoundaryCollision,
        )

    # ---------------------------------------------------------------- leaves

    def _moments(self, box: Box, winding: int) -> Optional[np.ndarray]:
        """Power sums of the zeros in ``box``, in the coordinate u = (k - c)/rho.

        Composite Gauss-Legendre on each edge; the panel count doubles until the
        zeroth moment matches the winding count and the others settle.
        """
        c = box.center
        rho = box.side / 2.0
        x, w = legendre.leggauss(_PANEL_NODES)
        previous = None
        panels = max(2, int(math.ceil(box.side * self.det.exponential_type)))
        for _ in range(7):
            nodes, weights = [], []
            for a, b in box.edges():
                edges = np.linspace(0.0, 1.0, panels + 1)
                for p in range(panels):
                    t0, t1 = edges[p], edges[p + 1]
                    t = t0 + (t1 - t0) * (x + 1.0) / 2.0
                    nodes.append(a + t * (b - a))
                    weights.append(w * (t1 - t0) / 2.0 * (b - a))
            nodes = np.concatenate(nodes)
            weights = np.concatenate(weights)
            value, deriv, _ = self.det.evaluate_with_derivative(nodes)
            if np.any(value == 0):
                return None
            ratio = deriv / value
            u = (nodes - c) / rho
            powers = u[None, :] ** np.arange(winding + 1)[:, None]
            # ds = dk, and int u^p D'/D dk / (2 pi i)
            sums = (powers * ratio[None, :]) @ weights / (2j * math.pi)
            if abs(sums[0] - winding) < 1e-6 and previous is not None:
                if np.max(np.abs(sums - previous)) < 1e-9:
                    return sums
            previous = sums
            panels *= 2
        return None

    @staticmethod
    def _roots_from_power_sums(sums: np.ndarray) -> np.ndarray:
        """Roots from power sums via the Newton identities."""
        w = len(sums) - 1
        e = np.zeros(w + 1, dtype=complex)
        e[0] = 1.0
        for m in range(1, w + 1):
            acc = 0j
            for i in range(1, m + 1):
                acc += (-1) ** (i - 1) * e[m - i] * sums[i]
            e[m] = acc / m
        coeffs = e * (-1.0) ** np.arange(w + 1)
        return np.roots(coeffs)

    def _clusters(self, roots: np.ndarray) -> List[np.ndarray]:
        if len(roots) == 1:
            return [roots]
        points = np.column_stack([roots.real, roots.imag])
        tree = linkage(points, method="single")
        labels = fcluster(tree, t=self.cfg.cluster_tol, criterion="distance")
        return [roots[labels == label] for label in np.unique(labels)]

    def _solve_leaf(self, box: Box, winding: int) -> Optional[List[ZeroRecord]]:
        sums = self._moments(box, winding)
        if sums is None:
            return None
        roots = box.center + (box.side / 2.0) * self._roots_from_power_sums(sums)
        records = []
        for cluster in self._clusters(roots):
            if len(cluster) == 1:
                k0 = complex(cluster[0])
                try:
                    rec = self.refine(k0, box=box)
                except NonConvergence:
                    log.debug(f"Newton did not settle near {k0} in {box}; splitting")
                    return None
            else:
                rec = self._record(complex(np.mean(cluster)), len(cluster), 0, box)
            rec.origin_box = box
            records.append(rec)
        return records

    def _record(
        self, k: complex, multiplicity: int, iters: int, box: Optional[Box]
    ) -> ZeroRecord:
        if abs(k.imag) < _SNAP_IMAG:
            k = complex(k.real, 0.0)
        residual = float(self.det.normalized_abs([k])[0])
        return ZeroRecord(
            k=k,
            residual=residual,
            multiplicity=multiplicity,
            newton_iters=iters,
            origin_box=box,
        )

    # ------------------------------------------------------------------ refine

    def refine(self, k0: complex, box: Optional[Box] = None) -> ZeroRecord:
        """Newton iteration k <- k - m D0/D0' from ``k0``.

        Stops when |dk| <= 1e-12 max(1, |k|) or the normalized residual is below
        1e-3 zero_tol, after at most 50 iterations. The multiplicity m starts at 1
        and is raised when successive steps shrink at the linear rate
        (m - 1)/m of a multiple zero. A real start that leaves ``box`` falls back
        to bisection on the real axis inside the box. When the iteration runs out,
        the iterate with the smallest residual is kept if it is below zero_tol.
        """
        k = complex(k0)
        target = 1e-3 * self.cfg.zero_tol
        value, deriv, exponent = self.det.evaluate_with_derivative([k])
        residual = self._normalized(value[0], exponent[0], k)
        if residual <= target:
            return self._record(k, 1, 0, box)

        trace = [k]
        steps: List[float] = []
        mult = 1
        best_k, best_residual = k, residual
        for it in range(1, 51):
            if deriv[0] == 0:
                break
            step = mult * value[0] / deriv[0]
            k_new = k - step
            if box is not None and not box.contains(k_new, pad=0.5 * box.side):
                if abs(k0.imag) < _SNAP_IMAG:
                    return self._bisect(box, it)
                break
            k = k_new
            trace.append(k)
            steps.append(abs(step))
            value, deriv, exponent = self.det.evaluate_with_derivative([k])
            residual = self._normalized(value[0], exponent[0], k)
            if abs(step) <= 1e-12 * max(1.0, abs(k)) or residual <= target:
                return self._record(k, 1, it, box)
            if residual < best_residual:
                best_k, best_residual = k, residual
            if len(steps) >= 3 and mult == 1:
                r1, r2 = steps[-1] / steps[-2], steps[-2] / steps[-3]
                if 0.3 < r1 < 0.95 and abs(r1 - r2) < 0.05:
                    mult = max(1, int(round(1.0 / (1.0 - r1))))
        # multiple zeros stall at the noise floor of D0; accept the best iterate
        if best_residual <= self.cfg.zero_tol:
            return self._record(best_k, 1, len(trace) - 1, box)
        fatal_and_log(
            f"Newton refinement from k0 = {k0} did not converge "
            f"(last k = {k}, residual {residual:.3g})",
            NonConvergence,
            detail={"trace": [[z.real, z.imag] for z in trace]},
        )

    def _normalized(self, mantissa: complex, exponent: float, k: complex) -> float:
        return abs(mantissa) * math.exp(
            exponent - self.det.exponential_type * abs(k.imag)
        )

    def _bisect(self, box: Box, iters: int) -> ZeroRecord:
        def f(x):
            return float(self.det.evaluate([x])[0][0].real)

        a, b = box.re_min, box.re_max
        if f(a) * f(b) > 0:
            fatal_and_log(
                f"Newton left {box} and D0 has no sign change on [{a}, {b}]",
                NonConvergence,
            )
        root = brentq(f, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        return self._record(complex(root, 0.0), 1, iters, box)

    # ------------------------------------------------------------------ locate

    def _check_region(self, region: Box):
        if max(abs(region.im_min), abs(region.im_max)) > self.cfg.max_im:
            fatal_and_log(
                f"Region {region} leaves the strip |Im k| <= {self.cfg.max_im}",
                DomainError,
            )
        if region.closest_distance_to_origin() < self.cfg.origin_exclusion:
            fatal_and_log(
                f"Region {region} touches the disk |k| < {self.cfg.origin_exclusion} "
                "around the origin",
                DomainError,
            )

    def _subtree(self, box: Box, winding: int) -> List[ZeroRecord]:
        if winding == 0:
            return []
        leaf = box.side <= self.cfg.leaf_size and winding <= self.cfg.leaf_max_winding
        if leaf or box.side <= self.cfg.min_box:
            records = self._solve_leaf(box, winding) if leaf else None
            if records is not None:
                return records
            if box.side <= 4 * self.cfg.min_box:
                return [self._record(box.center, winding, 0, box)]
        children = self._children(box, winding)
        if children is None:
            return []
        out = []
        for child, count in children:
            out += self._subtree(child, count)
        return out

    def _merge(self, records: List[ZeroRecord]) -> List[ZeroRecord]:
        records = sorted(records, key=_sort_key)
        merged: List[ZeroRecord] = []
        for rec in records:
            same = [m for m in merged if abs(m.k - rec.k) <= self.cfg.merge_tol]
            if same:
                keep = same[0]
                keep.multiplicity = max(keep.multiplicity, rec.multiplicity)
                continue
            merged.append(rec)
        return merged

    def locate(self, region: Box, fingerprint: str = "") -> Spectrum:
        """All zeros of D0 in ``region``.

        The region is first cut into tiles of at most ``tile_size``; tiles are
        processed by ``workers`` threads and their zero lists merged in order.
        """
        self._check_region(region)
        self.det.check_degenerate()
        region, total = self._jittered_region(region)
        log.info(f"Region {region.to_dict()} has winding count {total}")

        records: List[ZeroRecord] = []
        complete = True
        if total > 0:
            tiles = self._children(region, total, tiles=True)
            if tiles is None:
                tiles = []
                complete = False
            nonempty = [(t, c) for t, c in tiles if c > 0]
            workers = max(1, int(self.cfg.workers))
            if workers > 1 and len(nonempty) > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    parts = list(pool.map(lambda tc: self._subtree(*tc), nonempty))
            else:
                parts = [self._subtree(t, c) for t, c in nonempty]
            for part in parts:
                records += part

        records = self._merge(records)
        found = sum(r.multiplicity for r in records)
        if self._counter.exhausted:
            complete = False
            log.warning(
                f"Box budget of {self.cfg.max_boxes} exhausted; "
                "the spectrum is partial "
                f"({found} of {total} zeros)"
            )
        elif found != total:
            complete = False
            log.warning(
                f"Located multiplicities add up to {found}, winding count is {total}"
            )
        unrefined = [r for r in records if r.residual > self.cfg.zero_tol]
        for rec in unrefined:
            log.warning(
                f"Zero at {rec.k} has residual {rec.residual:.3g} above zero_tol"
            )
        if unrefined:
            complete = False

        log.info(f"Located {len(records)} distinct zero(s), total multiplicity {found}")
        return Spectrum(
            records=records,
            region=region,
            fingerprint=fingerprint or self.det.profile.fingerprint(),
            B=self.det.B,
            complete=complete,
            winding=total,
            boxes_used=self._counter.used,
        )


def _determinant(source: Union[Determinant, RadialProfile]) -> Determinant:
    if isinstance(source, Determinant):
        return source
    return Determinant(source)


def winding_count(
    source: Union[Determinant, RadialProfile],
    box: Box,
    cfg: Optional[SearchConfig] = None,
) -> int:
    """Number of zeros of D0 inside ``box``, counted with multiplicity."""
    return ZeroFinder(_determinant(source), cfg).winding_count(box)


def locate(
    source: Union[Determinant, RadialProfile],
    region: Box,
    cfg: Optional[SearchConfig] = None,
) -> Spectrum:
    """All zeros of D0 in ``region`` as a Spectrum."""
    return ZeroFinder(_determinant(source), cfg).locate(region)


def refine(
    source: Union[Determinant, RadialProfile],
    k0: complex,
    cfg: Optional[SearchConfig] = None,
    box: Optional[Box] = None,
) -> ZeroRecord:
    """Newton-polish a zero of D0 starting from ``k0``."""
    return ZeroFinder(_determinant(source), cfg).refine(complex(k0), box=box)


# ------------------------------------------------------------------ densities


def default_sectors(epsilon: float = 0.1) -> List[Tuple[float, float]]:
    """The two real-axis sectors and the two sectors between them."""
    return [
        (-epsilon, epsilon),
        (epsilon, math.pi - epsilon),
        (math.pi - epsilon, math.pi + epsilon),
        (math.pi + epsilon, 2.0 * math.pi - epsilon),
    ]


def _in_sector(phi: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    return np.mod(phi - alpha, 2.0 * math.pi) < (beta - alpha)


def _sector_target(alpha: float, beta: float, B: float) -> float:
    for axis in (0.0, math.pi):
        if _in_sector(np.array([axis]), alpha, beta)[0]:
            return (1.0 + B) / math.pi
    return 0.0


@dataclass
class DensityReport:
    """Angular zero counts n(alpha, beta, r) and the order-one estimates n/r.

    ``counts[i][j]`` and ``estimates[i][j]`` belong to ``sectors[i]`` at
    ``radii[j]``.
    """

    sectors: List[Tuple[float, float]]
    radii: List[float]
    counts: List[List[int]]
    estimates: List[List[float]]
    targets: List[float]
    B: float
    order: int = 1
    caveats: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sectors": [list(s) for s in self.sectors],
            "radii": list(self.radii),
            "counts": self.counts,
            "estimates": self.estimates,
            "targets": self.targets,
            "B": self.B,
            "order": self.order,
            "caveats": self.caveats,
        }


def _covered(region: Box, alpha: float, beta: float, r: float) -> bool:
    """Whether the sector of radius r lies in the region closed under k -> -k and
    k -> conj(k).
    """
    re_max = max(abs(region.re_min), abs(region.re_max))
    im_max = max(abs(region.im_min), abs(region.im_max))
    phi = np.linspace(alpha, beta, 129)
    points = r * np.exp(1j * phi)
    inside = (np.abs(points.real) <= re_max) & (np.abs(points.imag) <= im_max)
    return bool(np.all(inside))


def density(
    spectrum: Spectrum,
    sectors: Optional[Sequence[Tuple[float, float]]] = None,
    radii: Sequence[float] = (10.0, 20.0, 40.0),
    epsilon: float = 0.1,
) -> DensityReport:
    """Count zeros (with multiplicity, symmetric images included) by sector and
    radius.

    Sector (alpha, beta) holds the angles phi with (phi - alpha) mod 2 pi below
    beta - alpha. The target density is (1 + B)/pi for sectors containing the
    real axis and 0 otherwise.
    """
    sectors = [tuple(map(float, s)) for s in (sectors or default_sectors(epsilon))]
    radii = sorted(float(r) for r in radii)
    for alpha, beta in sectors:
        if not 0 < beta - alpha <= 2.0 * math.pi:
            fatal_and_log(f"Sector ({alpha}, {beta}) is empty or wraps", DomainError)
    if not radii or radii[0] <= 0:
        fatal_and_log("density needs at least one positive radius", DomainError)

    zeros = spectrum.full_plane()
    ks = np.array([k for k, _ in zeros], dtype=complex)
    mult = np.array([m for _, m in zeros], dtype=int)
    phi = np.angle(ks) if len(ks) else np.zeros(0)
    caveats = []
    if not spectrum.complete:
        caveats.append("spectrum is incomplete; counts are lower bounds")

    counts, estimates = [], []
    for alpha, beta in sectors:
        inside = _in_sector(phi, alpha, beta)
        row_c, row_e = [], []
        for r in radii:
            n = int(np.sum(mult[inside & (np.abs(ks) <= r)]))
            row_c.append(n)
            row_e.append(n / r)
            if not _covered(spectrum.region, alpha, beta, r):
                caveats.append(
                    f"sector ({alpha:.4g}, {beta:.4g}) at r = {r:g} extends beyond "
                    "the searched region"
                )
        counts.append(row_c)
        estimates.append(row_e)

    report = DensityReport(
        sectors=sectors,
        radii=radii,
        counts=counts,
        estimates=estimates,
        targets=[_sector_target(a, b, spectrum.B) for a, b in sectors],
        B=spectrum.B,
        caveats=caveats,
    )
    for (alpha, beta), est, target in zip(sectors, estimates, report.targets):
        log.info(
            f"Sector ({alpha:.3f}, {beta:.3f}): n/r = {est[-1]:.4f} at "
            f"r = {radii[-1]:g}, target {target:.4f}"
        )
    return report


# --------------------------------------------------------------------- strips


@dataclass
class StripReport:
    """Zeros in the window [T, T + s] x [-K, K] against the count s(1 + B)/pi.

    Each zero is attached to the nearer of the grids j pi/(1 + B) ("near") and
    j pi/|1 - B| ("far"). Equidistant zeros are unclassified, and for B = 1 the
    far grid degenerates and no zero is classified.
    """

    T: float
    s: float
    K: float
    B: float
    total: int
    predicted: float
    family_near: int = 0
    family_far: int = 0
    unclassified: int = 0
    predicted_near: float = 0.0
    predicted_far: float = 0.0
    classification_enabled: bool = True

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "s": self.s,
            "K": self.K,
            "B": self.B,
            "total": self.total,
            "predicted": self.predicted,
            "family_near": self.family_near,
            "family_far": self.family_far,
            "unclassified": self.unclassified,
            "predicted_near": self.predicted_near,
            "predicted_far": self.predicted_far,
            "classification_enabled": self.classification_enabled,
        }


def _grid_distance(x: float, spacing: float) -> float:
    return abs(x - spacing * round(x / spacing))


def strip_report(spectrum: Spectrum, T: float, s: float, K: float) -> StripReport:
    """Count the zeros of ``spectrum`` in a window of the real strip."""
    region = spectrum.region
    if s < 0 or K <= 0:
        fatal_and_log(
            f"Strip window needs s >= 0 and K > 0, got s={s}, K={K}", DomainError
        )
    if not (
        region.re_min <= T
        and T + s <= region.re_max
        and region.im_min <= -K
        and K <= region.im_max
    ):
        fatal_and_log(
            f"Strip window [{T}, {T + s}] x [{-K}, {K}] is not inside the searched "
            f"region {region.to_dict()}",
            DomainError,
        )
    B = spectrum.B
    enabled = abs(1.0 - B) > 1e-12
    report = StripReport(
        T=T,
        s=s,
        K=K,
        B=B,
        total=0,
        predicted=s * (1.0 + B) / math.pi,
        predicted_near=2.0 * s * min(1.0, B) / math.pi,
        predicted_far=s * abs(1.0 - B) / math.pi,
        classification_enabled=enabled,
    )
    for rec in spectrum.records:
        if not (T <= rec.k.real <= T + s and abs(rec.k.imag) <= K):
            continue
        report.total += rec.multiplicity
        if not enabled:
            report.unclassified += rec.multiplicity
            continue
        near = _grid_distance(rec.k.real, math.pi / (1.0 + B))
        far = _grid_distance(rec.k.real, math.pi / abs(1.0 - B))
        if abs(near - far) <= 1e-9:
            report.unclassified += rec.multiplicity
        elif near < far:
            report.family_near += rec.multiplicity
        else:
            report.family_far += rec.multiplicity

    if not enabled:
        log.warning("B = 1: the far grid degenerates, family classification disabled")
    log.info(
        f"Strip [{T}, {T + s}] x [-{K}, {K}]: {report.total} zeros, "
        f"predicted {report.predicted:.2f}"
    )
    return report


# ----------------------------------------------------------------- separation


@dataclass
class SeparationReport:
    """Half the minimum distance between zeros outside the exclusion disk.

    ``delta`` is None when fewer than two zeros lie outside the disk.
    """

    delta: Optional[float]
    exclusion_radius: float
    near_collision: float
    considered: int
    violations: List[Tuple[complex, complex, float]] = field(default_factory=list)
    anomalies: List[ZeroRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "exclusion_radius": self.exclusion_radius,
            "near_collision": self.near_collision,
            "considered": self.considered,
            "violations": [
                {"a": [a.real, a.imag], "b": [b.real, b.imag], "distance": d}
                for a, b, d in self.violations
            ],
            "anomalies": [r.to_dict() for r in self.anomalies],
        }


def separation(
    spectrum: Spectrum,
    exclusion_radius: Optional[float] = None,
    near_collision: float = 1e-3,
) -> SeparationReport:
    """Separation of the zeros with |k| > ``exclusion_radius``.

    The radius defaults to 3 pi/(1 + B). Pairs closer than ``near_collision`` are
    violations, and multiple zeros beyond the radius are anomalies.
    """
    if exclusion_radius is None:
        exclusion_radius = 3.0 * math.pi / (1.0 + spectrum.B)
    far = [r for r in spectrum.records if abs(r.k) > exclusion_radius]
    report = SeparationReport(
        delta=None,
        exclusion_radius=float(exclusion_radius),
        near_collision=float(near_collision),
        considered=len(far),
    )
    for rec in far:
        if rec.multiplicity > 1:
            log.warning(
                f"Zero at {rec.k} beyond |k| = {exclusion_radius:.4g} has "
                f"multiplicity {rec.multiplicity}"
            )
            report.anomalies.append(rec)
    if len(far) < 2:
        log.warning(
            f"Separation undefined: {len(far)} zero(s) beyond |k| = "
            f"{exclusion_radius:.4g}"
        )
        return report

    points = np.array([[r.k.real, r.k.imag] for r in far])
    distances = pdist(points)
    report.delta = float(np.min(distances)) / 2.0
    square = squareform(distances)
    for i, j in zip(*np.nonzero(np.triu(square < near_collision, k=1))):
        report.violations.append((far[i].k, far[j].k, float(square[i, j])))
    log.info(
        f"Separation delta = {report.delta:.6g} over {len(far)} zeros, "
        f"{len(report.violations)} near collision(s)"
    )
    return report
