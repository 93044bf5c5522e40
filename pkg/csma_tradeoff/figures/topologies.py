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

"""Simulated throughput on the wrapped grid and on a random network."""

import dataclasses

from csma_tradeoff.common import utils
from csma_tradeoff.figures.base import FigureBase
from csma_tradeoff.network import simulate as sim
from csma_tradeoff.network import topology as topology_lib


class SimulatedThroughput(FigureBase):
    """Average per-node throughput against sigma, one curve per beta."""

    HEADER = ('topology_id', 'beta', 'eta', 'sigma', 'seed', 'throughput', 'stderr')
    ARGMAX_HEADER = sim.EMPIRICAL_HEADER

    def build_topology(self) -> topology_lib.Topology:
        raise NotImplementedError

    def _template(self) -> sim.SimConfig:
        params = self.params
        return sim.SimConfig(beta=0.0, eta=params['eta'], sigma=1.0, horizon=params['horizon'],
                             seed=params['seed'], batches=params['batches'])

    def rows(self):
        params = self.params
        top = self.build_topology()
        template = self._template()
        tasks = []
        for beta in params['beta']:
            for sigma in params['sigma']:
                cfg = dataclasses.replace(template, beta=float(beta), sigma=float(sigma))
                tasks.append(((float(beta), float(sigma)), top, cfg))
        rows = []
        for (beta, sigma), stats in sim.run_replications(tasks):
            total = stats.aggregate
            rows.append((top.name, beta, params['eta'], sigma, params['seed'],
                         total.throughput_mean, total.throughput_stderr))
        return rows

    def argmax_rows(self):
        """Empirically best beta for each sigma, judged on the aggregate throughput."""
        params = self.params
        optima = sim.estimate_threshold_empirical(self.build_topology(), params['eta'], params['sigma'],
                                                  params['beta'], self._template())
        return [optimum.row() for optimum in optima]


class GridThroughput(SimulatedThroughput):

    FIGURE_NAME = 'fig8'
    DEFAULTS = {
        'eta': 1.0,
        'beta': (0.0, 1.0, 1.5, 2.0),
        'sigma': tuple(utils.log_grid(0.05, 20.0, 7)),
        'horizon': 1000.0,
        'batches': 20,
        'seed': 0,
    }

    def build_topology(self):
        return topology_lib.wrapped_grid(4, 4, 1.0, m=1.0)


class RandomThroughput(SimulatedThroughput):
    """16 nodes placed uniformly on a square; the seed fixes both placement and simulation."""

    FIGURE_NAME = 'fig10'
    DEFAULTS = {
        'eta': 1.6,
        'beta': (0.2, 0.3, 1.0, 1.3, 1.5),
        'sigma': tuple(utils.log_grid(0.05, 20.0, 7)),
        'horizon': 1000.0,
        'batches': 20,
        'seed': 7,
        'count': 16,
        'side': 3.0,
    }

    def build_topology(self):
        return topology_lib.random_topology(self.params['count'], self.params['side'], m=1.0,
                                            seed=self.params['seed'])
