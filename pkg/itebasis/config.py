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

"""Run configuration: one JSON document parsed into a tree of dataclasses.

Every section has defaults, so ``{}`` is a valid configuration. Unknown keys are
errors and are reported with their dotted path.
"""

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Sequence

from .errors import ConfigError
from .log import fatal_and_log, log
from .profile import RadialProfile, profile_from_dict
from .radial_solver import IntegratorConfig
from .zeros import Box, SearchConfig


def _positive(path: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        fatal_and_log(f"{path} must be a number, got {value!r}", ConfigError)
    if not (math.isfinite(value) and value > 0):
        fatal_and_log(f"{path} must be positive, got {value}", ConfigError)
    return float(value)


def _positive_list(path: str, values) -> List[float]:
    if not isinstance(values, list) or not values:
        fatal_and_log(f"{path} must be a non-empty list, got {values!r}", ConfigError)
    return [_positive(f"{path}[{i}]", v) for i, v in enumerate(values)]


@dataclass
class SearchSection:
    re_min: float = 0.1
    re_max: float = 20.0
    im_min: float = -6.0
    im_max: float = 6.0
    zero_tol: float = 1e-10
    merge_tol: float = 1e-6
    boundary_tol: float = 1e-9
    cluster_tol: float = 5e-3
    leaf_size: float = 1.0
    tile_size: float = 4.0
    max_boxes: int = 20000
    max_im: float = 20.0
    origin_exclusion: float = 0.1

    def __post_init__(self):
        for name in (
            "zero_tol",
            "merge_tol",
            "boundary_tol",
            "cluster_tol",
            "leaf_size",
            "tile_size",
            "max_im",
            "origin_exclusion",
        ):
            setattr(self, name, _positive(f"search.{name}", getattr(self, name)))
        self.max_boxes = int(_positive("search.max_boxes", self.max_boxes))
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            fatal_and_log(
                f"search region [{self.re_min}, {self.re_max}] x "
                f"[{self.im_min}, {self.im_max}] is empty",
                ConfigError,
            )

    def box(self) -> Box:
        return Box(self.re_min, self.re_max, self.im_min, self.im_max)

    def search_config(self, workers: int, seed: int) -> SearchConfig:
        return SearchConfig(
            zero_tol=self.zero_tol,
            merge_tol=self.merge_tol,
            boundary_tol=self.boundary_tol,
            cluster_tol=self.cluster_tol,
            leaf_size=self.leaf_size,
            tile_size=self.tile_size,
            max_boxes=self.max_boxes,
            max_im=self.max_im,
            origin_exclusion=self.origin_exclusion,
            seed=seed,
            workers=workers,
        )


@dataclass
class EvalSection:
    k: List[float] = field(default_factory=lambda: [1.0, 0.0])

    def __post_init__(self):
        if (
            not isinstance(self.k, list)
            or len(self.k) != 2
            or not all(isinstance(x, (int, float)) for x in self.k)
        ):
            fatal_and_log(f"eval.k must be [re, im], got {self.k!r}", ConfigError)

    @property
    def wavenumber(self) -> complex:
        return complex(self.k[0], self.k[1])


@dataclass
class DensitySection:
    radii: List[float] = field(default_factory=lambda: [10.0, 20.0, 40.0])
    epsilon: float = 0.1

    def __post_init__(self):
        self.radii = _positive_list("density.radii", self.radii)
        self.epsilon = _positive("density.epsilon", self.epsilon)
        if self.epsilon >= math.pi / 2:
            fatal_and_log("density.epsilon must be below pi/2", ConfigError)


@dataclass
class StripsSection:
    T: float = 20.0
    s: float = 20.0
    K: float = 1.0

    def __post_init__(self):
        self.T = _positive("strips.T", self.T)
        self.s = _positive("strips.s", self.s)
        self.K = _positive("strips.K", self.K)


@dataclass
class IndicatorSection:
    thetas: List[float] = field(default_factory=lambda: [math.pi / 2, math.pi / 4])
    radii: List[float] = field(default_factory=lambda: [10.0, 20.0, 40.0])
    max_radius: float = 80.0

    def __post_init__(self):
        if not isinstance(self.thetas, list) or not self.thetas:
            fatal_and_log("indicator.thetas must be a non-empty list", ConfigError)
        self.thetas = [float(t) for t in self.thetas]
        self.radii = _positive_list("indicator.radii", self.radii)
        self.max_radius = _positive("indicator.max_radius", self.max_radius)


@dataclass
class BasisSection:
    N: List[int] = field(default_factory=lambda: [20, 40, 80, 160])
    normalize: bool = False
    radii: List[float] = field(default_factory=lambda: [10.0, 20.0, 40.0])

    def __post_init__(self):
        self.N = [int(n) for n in _positive_list("basis.N", self.N)]
        if not isinstance(self.normalize, bool):
            fatal_and_log("basis.normalize must be true or false", ConfigError)
        self.radii = _positive_list("basis.radii", self.radii)


@dataclass
class ExpandSection:
    N: int = 40
    samples: Optional[str] = None

    def __post_init__(self):
        self.N = int(_positive("expand.N", self.N))


@dataclass
class GridSection:
    points: int = 2048

    def __post_init__(self):
        self.points = int(_positive("grid.points", self.points))


@dataclass
class SeparationSection:
    exclusion_radius: Optional[float] = None
    near_collision: float = 1e-3

    def __post_init__(self):
        radius = self.exclusion_radius
        if radius is not None:
            if isinstance(radius, bool) or not isinstance(radius, (int, float)):
                fatal_and_log(
                    "separation.exclusion_radius must be a number", ConfigError
                )
            if radius < 0:
                fatal_and_log("separation.exclusion_radius must be >= 0", ConfigError)
            self.exclusion_radius = float(radius)
        self.near_collision = _positive(
            "separation.near_collision", self.near_collision
        )


@dataclass
class OutputSection:
    csv: Optional[str] = None
    json: Optional[str] = None


_DEFAULT_PROFILE = {"kind": "smooth_bump", "amplitude": 3.0, "power": 3}

_SECTIONS = {
    "integrator": IntegratorConfig,
    "search": SearchSection,
    "eval": EvalSection,
    "density": DensitySection,
    "strips": StripsSection,
    "indicator": IndicatorSection,
    "basis": BasisSection,
    "expand": ExpandSection,
    "grid": GridSection,
    "separation": SeparationSection,
    "output": OutputSection,
}


def _section(cls, data: Any, path: str):
    if not isinstance(data, dict):
        fatal_and_log(f"{path} must be an object, got {data!r}", ConfigError)
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            fatal_and_log(f"Unknown config key '{path}.{key}'", ConfigError)
    try:
        return cls(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid {path} section: {e}") from e


@dataclass
class RunConfig:
    """A parsed run configuration.

    Parameters
    ----------
    profile
        The raw profile section; ``build_profile()`` turns it into a profile.
    workers
        Threads for the zero search, or None to fall back to the environment.
    seed
        Seed of every randomized choice (contour jitter).

    Environment variables
    ---------------------
    ITEBASIS_WORKERS
        Worker count used when neither ``--workers`` nor ``workers`` is set.
    """

    profile: Dict[str, Any] = field(default_factory=lambda: dict(_DEFAULT_PROFILE))
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    search: SearchSection = field(default_factory=SearchSection)
    eval: EvalSection = field(default_factory=EvalSection)
    density: DensitySection = field(default_factory=DensitySection)
    strips: StripsSection = field(default_factory=StripsSection)
    indicator: IndicatorSection = field(default_factory=IndicatorSection)
    basis: BasisSection = field(default_factory=BasisSection)
    expand: ExpandSection = field(default_factory=ExpandSection)
    grid: GridSection = field(default_factory=GridSection)
    separation: SeparationSection = field(default_factory=SeparationSection)
    output: OutputSection = field(default_factory=OutputSection)
    workers: Optional[int] = None
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            fatal_and_log("The configuration must be a JSON object", ConfigError)
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                fatal_and_log(f"Unknown config key '{key}'", ConfigError)
        kwargs = {}
        for name, section_cls in _SECTIONS.items():
            if name in data:
                kwargs[name] = _section(section_cls, data[name], name)
        if "profile" in data:
            kwargs["profile"] = data["profile"]
        for name in ("workers", "seed"):
            if name in data and data[name] is not None:
                value = data[name]
                if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                    fatal_and_log(
                        f"{name} must be a non-negative integer, got {value!r}",
                        ConfigError,
                    )
                kwargs[name] = value
        config = cls(**kwargs)
        if config.workers == 0:
            fatal_and_log("workers must be at least 1", ConfigError)
        # fail early on a bad profile
        config.build_profile()
        return config

    def build_profile(self) -> RadialProfile:
        return profile_from_dict(self.profile)

    def resolved_workers(self, flag: Optional[int] = None) -> int:
        """``--workers`` flag, then config, then ITEBASIS_WORKERS, then 1."""
        if flag is not None:
            return max(1, int(flag))
        if self.workers is not None:
            return self.workers
        env = os.getenv("ITEBASIS_WORKERS")
        if env:
            try:
                return max(1, int(env))
            except ValueError:
                fatal_and_log(
                    f"ITEBASIS_WORKERS must be an integer, got '{env}'", ConfigError
                )
        return 1

    def search_config(self, workers: Optional[int] = None) -> SearchConfig:
        return self.search.search_config(self.resolved_workers(workers), self.seed)

    def to_dict(self) -> dict:
        """Canonical echo of the configuration, defaults filled in."""
        out = asdict(self)
        out["profile"] = self.build_profile().to_dict()
        return out


def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply ``dotted.key=<json value>`` overrides to a raw configuration dict.

    The value is parsed as JSON; if that fails it is taken as a string.
    """
    data = json.loads(json.dumps(data))
    for item in overrides:
        if "=" not in item:
            fatal_and_log(
                f"Override '{item}' is not of the form key=value", ConfigError
            )
        dotted, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        keys = dotted.strip().split(".")
        if not all(keys):
            fatal_and_log(f"Override key '{dotted}' is malformed", ConfigError)
        node = data
        for key in keys[:-1]:
            child = node.setdefault(key, {})
            if not isinstance(child, dict):
                fatal_and_log(f"Override '{dotted}' descends into a value", ConfigError)
            node = child
        node[keys[-1]] = value
        log.debug(f"Config override {dotted} = {value!r}")
    return data


def load_config(
    path: Optional[str] = None, overrides: Sequence[str] = ()
) -> RunConfig:
    """Read a JSON configuration file (or start from defaults) and apply overrides."""
    data: Dict[str, Any] = {}
    if path:
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except OSError as e:
            fatal_and_log(f"Could not read config file '{path}': {e}", ConfigError)
        except json.JSONDecodeError as e:
            fatal_and_log(f"Config file '{path}' is not valid JSON: {e}", ConfigError)
    return RunConfig.from_dict(apply_overrides(data, overrides))
