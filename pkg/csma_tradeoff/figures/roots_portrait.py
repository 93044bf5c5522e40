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

from csma_tradeoff.analysis import roots
from csma_tradeoff.common import utils
from csma_tradeoff.figures.base import FigureBase


class RootPortrait(FigureBase):
    """All roots of lambda**(beta+1) - lambda**beta - sigma as sigma varies."""

    FIGURE_NAME = 'fig4'
    HEADER = ('beta', 'sigma', 'j', 're_lambda', 'im_lambda', 'method')
    DEFAULTS = {
        'beta': 4,
        'sigma': tuple(utils.log_grid(1e-3, 1e3, 61)),
    }

    def rows(self):
        return roots.root_portrait(int(self.params['beta']), self.params['sigma'])
