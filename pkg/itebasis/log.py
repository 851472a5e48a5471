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

import logging
from typing import Optional, Type, Union

logging.basicConfig(
    format="%(levelname)s [%(asctime)s] %(message)s", level=logging.INFO
)
log = logging.getLogger("itebasis")


def set_log_level(level: Union[str, int]):
    """Set the level of the package logger, e.g. from the ``--log-level`` flag."""
    if isinstance(level, str):
        level = level.upper()
    log.setLevel(level)


def fatal_and_log(
    msg: str, etype: Type[BaseException] = ValueError, detail: Optional[dict] = None
):
    """If an error occurs, log the message and raise an exception.

    ``detail`` is forwarded to exception types that carry structured context (the
    reached radius of a failed integration, a Newton trace, ...).
    """
    log.error(msg)
    if detail is not None:
        raise etype(msg, detail=detail)
    raise etype(msg)
