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


class CsmaError(Exception):
    """Base class for all errors raised by csma_tradeoff."""


class DomainError(CsmaError, ValueError):
    """Parameters outside the domain where an operation is defined."""


class RootFindingError(CsmaError, ArithmeticError):
    """A root solver failed to converge or produced an invalid root set."""


class ConsistencyError(CsmaError, ArithmeticError):
    """Two independent evaluations of the same quantity disagree."""


class TopologyError(CsmaError):
    """A topology cannot be built, read or used for simulation."""


class ConfigError(CsmaError):
    """An experiment configuration is malformed or inconsistent."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
