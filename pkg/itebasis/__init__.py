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

from ._version import __version__
from .determinant import Determinant, d0, d0_derivative
from .profile import (
    ConstantProfile,
    LiouvilleMap,
    SmoothBumpProfile,
    SplineGridProfile,
    profile_from_dict,
)
from .riesz import build_system, expand, frame_bounds, gram
from .zeros import Box, Spectrum, locate, refine, winding_count

__all__ = [
    "__version__",
    "Box",
    "ConstantProfile",
    "Determinant",
    "LiouvilleMap",
    "SmoothBumpProfile",
    "Spectrum",
    "SplineGridProfile",
    "build_system",
    "d0",
    "d0_derivative",
    "expand",
    "frame_bounds",
    "gram",
    "locate",
    "profile_from_dict",
    "refine",
    "winding_count",
]
