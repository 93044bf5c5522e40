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

import dataclasses
import math
import os
import unittest

from csma_tradeoff.analysis import partition
from csma_tradeoff.analysis.partition import ModelParams
from csma_tradeoff.analysis import throughput
from csma_tradeoff.common.exceptions import ConsistencyError
from csma_tradeoff.common.exceptions import DomainError
from csma_tradeoff.network import simulate
from csma_tradeoff.network import topology

TOLERANCE_STDERRS = 3.0
SEEDS = (1, 2, 3)
LONG_HORIZON = 1e6
LONG_TESTS_ENV = 'CSMA_LONG_TESTS'


def isolated_pair():
    return topology.Topology([topology.Node(0, 0.0, 0.0), topology.Node(1, 1.0, 0.0, transmitter=False)],
                             m=1.0, name='pair')


def replicate(top, cfg, seeds=SEEDS):
    tasks = [((seed,), top, dataclasses.replace(cfg, seed=seed)) for seed in seeds]
    return [stats for _, stats in simulate.run_replications(tasks)]


def pooled(results, node_id=0):
    """Mean over replications of a node's throughput and the standard error of that mean."""
    nodes = [stats.nodes[node_id] for stats in results]
    mean = math.fsum(node.throughput_mean for node in nodes) / len(nodes)
    stderr = math.sqrt(math.fsum(node.throughput_stderr ** 2 for node in nodes)) / len(nodes)
    return mean, stderr


class TestSimulator(unittest.TestCase):

    def test_isolated_pair(self):
        cfg = simulate.SimConfig(beta=1, eta=1, sigma=1.0, horizon=20000.0)
        results = replicate(isolated_pair(), cfg)
        for stats in results:
            node = stats.nodes[0]
            self.assertEqual(node.collided_transmissions, 0)
            self.assertEqual(node.blocked_attempts, 0)
            self.assertEqual(node.attempts, node.successful_transmissions)
            self.assertAlmostEqual(stats.observed_time, 18000.0)
        mean, stderr = pooled(results)
        self.assertLess(abs(mean - 0.5), TOLERANCE_STDERRS * stderr)

    def test_collision_free_line(self):
        top = topology.line_topology(3)
        cfg = simulate.SimConfig(beta=2, eta=1, sigma=1.0, horizon=20000.0, debug=True)
        results = replicate(top, cfg)
        expected = throughput.throughput_finite(ModelParams(beta=2, eta=1, sigma=1.0, n=3)).value
        mean, stderr = pooled(results)
        self.assertLess(abs(mean - expected), TOLERANCE_STDERRS * stderr)
        for stats in results:
            for node in stats.nodes.values():
                self.assertEqual(node.collided_transmissions, 0)
                self.assertEqual(node.attempts,
                                 node.blocked_attempts + node.collided_transmissions + node.successful_transmissions)

    def test_line_with_hidden_nodes(self):
        top = topology.line_topology(5)
        cfg = simulate.SimConfig(beta=1, eta=2, sigma=1.0, horizon=20000.0)
        results = replicate(top, cfg)
        expected = throughput.throughput_finite(ModelParams(beta=1, eta=2, sigma=1.0, n=5)).value
        mean, stderr = pooled(results)
        self.assertLess(abs(mean - expected), TOLERANCE_STDERRS * stderr)
        for stats in results:
            self.assertGreater(stats.nodes[0].collided_transmissions, 0)
            self.assertEqual(stats.aggregate.attempts, sum(n.attempts for n in stats.nodes.values()))

    def test_psi_does_not_matter(self):
        top = topology.line_topology(3)
        estimates = []
        for psi in (0.2, 0.8):
            cfg = simulate.SimConfig(beta=1, eta=2, sigma=1.0, horizon=10000.0, psi=psi)
            estimates.append(pooled(replicate(top, cfg)))
        (first, first_err), (second, second_err) = estimates
        self.assertLess(abs(first - second), TOLERANCE_STDERRS * math.hypot(first_err, second_err))

    def test_occupancy_matches_product_form(self):
        top = topology.line_topology(2)
        for beta, sigma in ((1, 0.5), (2, 2.0)):
            distribution = partition.stationary_distribution(5, beta, sigma)
            for seed in (2, 3):
                cfg = simulate.SimConfig(beta=beta, eta=0, sigma=sigma, horizon=20000.0, seed=seed,
                                         occupancy_interval=10.0)
                stats = simulate.simulate(top, cfg)
                statistic, dof, threshold = simulate.chi_square_occupancy(stats.state_samples, distribution)
                self.assertEqual(dof, len(distribution) - 1)
                self.assertLess(statistic, threshold, (beta, sigma, seed))

    def test_deterministic(self):
        top = topology.wrapped_grid()
        cfg = simulate.SimConfig(beta=1.5, eta=1, sigma=2.0, horizon=300.0, seed=9, debug=True)
        self.assertEqual(simulate.simulate(top, cfg), simulate.simulate(top, cfg))
        other = simulate.simulate(top, dataclasses.replace(cfg, seed=10))
        self.assertNotEqual(other.aggregate, simulate.simulate(top, cfg).aggregate)

    def test_rows(self):
        top = topology.line_topology(1)
        stats = simulate.simulate(top, simulate.SimConfig(beta=1, eta=1, sigma=1.0, horizon=200.0))
        rows = stats.rows()
        self.assertEqual(len(rows), 4)
        self.assertEqual([row[5] for row in rows], [-1, 0, 1, simulate.ALL])
        for row in rows:
            self.assertEqual(len(row), len(simulate.RESULT_HEADER))
            self.assertEqual(row[0], 'line-n1')


class TestReplications(unittest.TestCase):

    def test_worker_count_does_not_change_results(self):
        top = topology.wrapped_grid()
        tasks = [((seed,), top, simulate.SimConfig(beta=1, eta=1, sigma=1.0, horizon=200.0, seed=seed))
                 for seed in (3, 1, 2)]
        serial = simulate.run_replications(tasks, max_workers=1)
        parallel = simulate.run_replications(tasks, max_workers=2)
        self.assertEqual([key for key, _ in serial], [(1,), (2,), (3,)])
        self.assertEqual(serial, parallel)


class TestEmpiricalThreshold(unittest.TestCase):

    def setUp(self):
        self.top = topology.wrapped_grid()
        self.betas = (0, 1, 1.5, 2)

    def test_small_sigma_prefers_no_sensing(self):
        cfg = simulate.SimConfig(beta=0, eta=1, sigma=0.05, horizon=20000.0, seed=1)
        [optimum] = simulate.estimate_threshold_empirical(self.top, 1, [0.05], self.betas, cfg)
        self.assertEqual(optimum.beta, 0)
        self.assertTrue(optimum.significant)

    def test_large_sigma_prefers_collision_free_sensing(self):
        cfg = simulate.SimConfig(beta=0, eta=1, sigma=20.0, horizon=2000.0, seed=1)
        [optimum] = simulate.estimate_threshold_empirical(self.top, 1, [20.0], self.betas, cfg)
        self.assertEqual(optimum.beta, 2)
        self.assertTrue(optimum.significant)
        self.assertEqual(len(optimum.row()), len(simulate.EMPIRICAL_HEADER))

    def test_collision_free_throughput_grows_with_sigma(self):
        results = [simulate.simulate(self.top, simulate.SimConfig(beta=2, eta=1, sigma=s, horizon=1000.0, seed=4))
                   for s in (5.0, 10.0, 20.0)]
        for low, high in zip(results, results[1:]):
            self.assertEqual(high.aggregate.collided_transmissions, 0)
            combined = math.hypot(low.aggregate.throughput_stderr, high.aggregate.throughput_stderr)
            self.assertGreater(high.aggregate.throughput_mean, low.aggregate.throughput_mean - 2 * combined)

    def test_single_beta_is_trivially_significant(self):
        cfg = simulate.SimConfig(beta=0, eta=1, sigma=1.0, horizon=100.0)
        [optimum] = simulate.estimate_threshold_empirical(self.top, 1, [1.0], [2], cfg, max_workers=1)
        self.assertEqual(optimum.beta, 2)
        self.assertIsNone(optimum.runner_up)

    def test_empty_grid(self):
        cfg = simulate.SimConfig(beta=0, eta=1, sigma=1.0, horizon=100.0)
        with self.assertRaises(DomainError):
            simulate.estimate_threshold_empirical(self.top, 1, [], self.betas, cfg)


class TestChiSquare(unittest.TestCase):

    def test_exact_counts(self):
        distribution = {(0,): 0.25, (1,): 0.75}
        statistic, dof, threshold = simulate.chi_square_occupancy({(0,): 25, (1,): 75}, distribution)
        self.assertEqual(statistic, 0.0)
        self.assertEqual(dof, 1)
        self.assertAlmostEqual(threshold, 10.828, places=3)

    def test_unexpected_state(self):
        with self.assertRaises(ConsistencyError):
            simulate.chi_square_occupancy({(1, 1): 3}, {(0, 0): 0.5, (1, 0): 0.5})

    def test_no_samples(self):
        with self.assertRaises(DomainError):
            simulate.chi_square_occupancy({}, {(0,): 1.0})


@unittest.skipUnless(os.environ.get(LONG_TESTS_ENV) == '1',
                     f"set {LONG_TESTS_ENV}=1 to run the full-horizon simulations")
class TestLongSimulations(unittest.TestCase):

    def test_line_throughput_per_seed(self):
        cases = ((3, 2, 1), (5, 1, 2))
        tasks = [((n, seed), topology.line_topology(n),
                  simulate.SimConfig(beta=beta, eta=eta, sigma=1.0, horizon=LONG_HORIZON, seed=seed))
                 for n, beta, eta in cases for seed in SEEDS]
        results = dict(simulate.run_replications(tasks))
        for n, beta, eta in cases:
            expected = throughput.throughput_finite(ModelParams(beta=beta, eta=eta, sigma=1.0, n=n)).value
            for seed in SEEDS:
                stats = results[(n, seed)]
                node = stats.nodes[0]
                self.assertLess(abs(node.throughput_mean - expected), TOLERANCE_STDERRS * node.throughput_stderr,
                                (n, seed))
                if beta >= eta + 1:
                    self.assertEqual(stats.aggregate.collided_transmissions, 0)
