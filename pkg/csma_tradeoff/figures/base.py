# Copyright 2025, Adria Cloud Services.
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

from csma_tradeoff.common import utils
from csma_tradeoff.common.exceptions import DomainError

LOG = logging.getLogger(__name__)


class FigureBase:
    """Data table behind one figure.

    DEFAULTS lists the parameters a figure accepts; a scalar override of a
    tuple-valued default becomes a one-element tuple.
    """

    FIGURE_NAME = None
    HEADER = ()
    ARGMAX_HEADER = None
    DEFAULTS = {}

    def __init__(self, **overrides):
        self.params = dict(self.DEFAULTS)
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in self.DEFAULTS:
                raise DomainError(f"{self.FIGURE_NAME} does not take a '{key}' parameter")
            if isinstance(self.DEFAULTS[key], tuple) and not isinstance(value, (tuple, list)):
                value = (value,)
            self.params[key] = value
        LOG.debug("%s parameters: %s", self.FIGURE_NAME, self.params)

    def rows(self) -> list[tuple]:
        raise NotImplementedError

    def argmax_rows(self) -> list[tuple]:
        """Best parameter per sweep point; only simulation figures provide it."""
        raise DomainError(f"{self.FIGURE_NAME} has no empirical argmax table")

    def write(self, out: str | None = None, argmax: bool = False) -> None:
        if argmax:
            utils.write_csv(self.ARGMAX_HEADER, self.argmax_rows(), out)
        else:
            utils.write_csv(self.HEADER, self.rows(), out)
