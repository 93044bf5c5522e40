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

from csma_tradeoff.analysis import optimize
from csma_tradeoff.common import utils
from csma_tradeoff.figures.base import FigureBase


class ThresholdWindow(FigureBase):
    """Continuous and finite optimal sensing range across the threshold window."""

    FIGURE_NAME = 'fig7'
    HEADER = optimize.SWEEP_HEADER
    DEFAULTS = {
        'eta': 5,
        'n': (15, 20, 25, 30),
        'sigma': tuple(utils.linear_grid(0.15, 0.19, 41)),
    }

    def rows(self):
        eta = int(self.params['eta'])
        rows = []
        for n in self.params['n']:
            rows.extend(optimize.threshold_sweep(eta, self.params['sigma'], int(n)))
        return rows
