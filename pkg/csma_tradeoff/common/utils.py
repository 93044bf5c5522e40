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

from collections.abc import Iterable, Sequence
import csv
import io
import logging
import math
import os
import sys

import numpy as np

LOG = logging.getLogger(__name__)

MAX_WORKERS_ENV = 'CSMA_MAX_WORKERS'


def path_writable(path: str, parent: bool = False) -> bool:
    """Identify if current or parent part is writable for the script"""
    if parent:
        path = os.path.dirname(os.path.abspath(path))

    return os.access(path, os.W_OK)


def max_workers() -> int:
    """Return the worker cap for parallel replications.

    Honours the CSMA_MAX_WORKERS environment variable and falls back to the
    number of CPUs.
    """
    value = os.environ.get(MAX_WORKERS_ENV)
    if value:
        try:
            workers = int(value)
        except ValueError:
            LOG.warning("Ignoring non-integer %s=%r", MAX_WORKERS_ENV, value)
        else:
            return max(1, workers)
    return os.cpu_count() or 1


def format_value(value) -> str:
    """Locale independent CSV cell; floats keep 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return format(value, '.17g')
    if value is None:
        return ''
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(cell) for cell in row])
    return buffer.getvalue()


def write_csv(header: Sequence[str], rows: Iterable[Sequence], out: str | None = None) -> None:
    """Write a CSV table to `out`, or to standard output when out is None."""
    text = render_csv(header, rows)
    if out is None or out == '-':
        sys.stdout.write(text)
        return
    if not path_writable(out, parent=True):
        raise OSError(f"Unable to write {out}: insufficient permissions to parent path")
    with open(out, 'w', newline='') as f:
        f.write(text)
    LOG.info("Wrote %s", out)


def log_grid(start: float, stop: float, num: int) -> list[float]:
    """Logarithmically spaced grid including both end points."""
    return [float(x) for x in np.logspace(math.log10(start), math.log10(stop), num)]


def linear_grid(start: float, stop: float, num: int) -> list[float]:
    return [float(x) for x in np.linspace(start, stop, num)]
