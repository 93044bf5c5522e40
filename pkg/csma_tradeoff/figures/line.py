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

"""Throughput tables for the line network."""

from csma_tradeoff.analysis.partition import ModelParams
from csma_tradeoff.analysis import throughput
from csma_tradeoff.common import utils
from csma_tradeoff.figures.base import FigureBase


class ThroughputVsSigma(FigureBase):
    """Infinite-line throughput against sigma, one curve per beta."""

    FIGURE_NAME = 'fig3'
    HEADER = ('eta', 'beta', 'sigma', 'theta', 'limit')
    DEFAULTS = {
        'eta': 7,
        'beta': (6.0, 7.0, 8.0, 9.0),
        'sigma': tuple(utils.log_grid(1e-2, 1e8, 101)),
    }

    def rows(self):
        eta = self.params['eta']
        rows = []
        for beta in self.params['beta']:
            limit = throughput.throughput_limit(beta, eta)
            for sigma in self.params['sigma']:
                theta = throughput.throughput_infinite(beta, eta, sigma).value
                rows.append((eta, beta, sigma, theta, limit))
        return rows


class FiniteVsInfiniteBeta(FigureBase):
    """theta_n and theta against beta for a fixed network size."""

    FIGURE_NAME = 'fig5'
    HEADER = ('n', 'eta', 'sigma', 'beta', 'theta_n', 'theta', 'abs_error')
    DEFAULTS = {
        'n': 100,
        'eta': 4,
        'sigma': (0.25, 5.0),
        'beta': tuple(range(1, 101)),
    }

    def rows(self):
        n, eta = self.params['n'], self.params['eta']
        rows = []
        for sigma in self.params['sigma']:
            for beta in self.params['beta']:
                if beta > n:
                    continue
                finite = throughput.throughput_finite(ModelParams(beta=beta, eta=eta, sigma=sigma, n=n)).value
                infinite = throughput.throughput_infinite(beta, eta, sigma).value
                rows.append((n, eta, sigma, beta, finite, infinite, abs(finite - infinite)))
        return rows


class FiniteVsInfiniteSize(FigureBase):
    """theta_n against n for a fixed sensing range, with the infinite limit."""

    FIGURE_NAME = 'fig6'
    HEADER = ('beta', 'eta', 'sigma', 'n', 'theta_n', 'theta', 'abs_error')
    DEFAULTS = {
        'beta': 16,
        'eta': 4,
        'sigma': (0.25, 5.0),
        'n': tuple(range(16, 201, 4)),
    }

    def rows(self):
        beta, eta = self.params['beta'], self.params['eta']
        rows = []
        for sigma in self.params['sigma']:
            infinite = throughput.throughput_infinite(beta, eta, sigma).value
            for n in self.params['n']:
                if n < max(beta, eta + 1):
                    continue
                finite = throughput.throughput_finite(ModelParams(beta=beta, eta=eta, sigma=sigma, n=n)).value
                rows.append((beta, eta, sigma, n, finite, infinite, abs(finite - infinite)))
        return rows
