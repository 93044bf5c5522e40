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

from concurrent import futures
import os
import tempfile
import unittest

import networkx as nx

from csma_tradeoff.analysis import throughput
from csma_tradeoff.common.exceptions import TopologyError
from csma_tradeoff.network import topology


class TestLineTopology(unittest.TestCase):

    def test_layout(self):
        top = topology.line_topology(1)
        self.assertEqual(len(top.nodes), 5)
        self.assertEqual([node.id for node in top.transmitters], [-1, 0, 1])
        self.assertEqual(top.name, 'line-n1')
        self.assertEqual(topology.line_topology(2).out_links(0), [-1, 1])
        self.assertEqual(topology.line_topology(3).blockers(0, 1), {-1, 1})

    def test_matches_index_sets(self):
        n = 6
        top = topology.line_topology(n)
        transmitters = {node.id for node in top.transmitters}
        for beta in range(4):
            for eta in range(4):
                sets = throughput.hidden_exposed_sets(beta, eta, n)
                self.assertEqual(top.blockers(0, beta) & transmitters, (sets.exposed | sets.blocking) - {0})
                self.assertEqual(top.interferers(1, eta) & transmitters, sets.hidden | sets.blocking)

    def test_invalid(self):
        with self.assertRaises(TopologyError):
            topology.line_topology(0)


class TestSharedTopology(unittest.TestCase):

    def test_lookups_do_not_mutate(self):
        top = topology.random_topology(count=20, side=3.0, seed=7)
        before = dict(vars(top))
        radii = (0.0, 0.5, 1.0, 1.5, 2.5)
        with futures.ThreadPoolExecutor(max_workers=4) as executor:
            found = list(executor.map(lambda r: [top.neighbours(node.id, r) for node in top.nodes], radii))
        self.assertEqual(vars(top).keys(), before.keys())
        for radius, sets in zip(radii, found):
            for node, neighbours in zip(top.nodes, sets):
                expected = {other.id for other in top.nodes
                            if other.id != node.id and top.distance(node.id, other.id) <= radius + 1e-12}
                self.assertEqual(neighbours, expected, (node.id, radius))
        with self.assertRaises(ValueError):
            top.distances[0, 1] = 0.0


class TestWrappedGrid(unittest.TestCase):

    def test_degree_and_blockers(self):
        top = topology.wrapped_grid()
        self.assertEqual(top.name, 'grid-4x4')
        for node in top.nodes:
            self.assertEqual(len(top.out_links(node.id)), 4)
            self.assertEqual(len(top.blockers(node.id, 1)), 4)
            self.assertEqual(len(top.blockers(node.id, 1.5)), 8)
            self.assertEqual(len(top.blockers(node.id, 2)), 10)
            self.assertEqual(top.blockers(node.id, 0), frozenset())

    def test_torus_distances(self):
        top = topology.wrapped_grid()
        self.assertEqual(top.distance(0, 3), 1.0)
        self.assertEqual(top.distance(0, 15), top.distance(15, 0))
        for u in top.nodes:
            for v in top.nodes:
                planar = ((u.x - v.x) ** 2 + (u.y - v.y) ** 2) ** 0.5
                self.assertLessEqual(top.distance(u.id, v.id), planar + 1e-12)

    def test_blockers_nest(self):
        top = topology.wrapped_grid()
        for small, large in ((0, 1), (1, 1.5), (1.5, 2), (2, 3)):
            for node in top.nodes:
                self.assertLessEqual(top.blockers(node.id, small), top.blockers(node.id, large))

    def test_interferers_include_the_node(self):
        top = topology.wrapped_grid()
        self.assertEqual(top.interferers(5, 0), {5})
        self.assertEqual(top.interferers(5, 1), {1, 4, 5, 6, 9})

    def test_invalid(self):
        with self.assertRaises(TopologyError):
            topology.wrapped_grid(1, 4)


class TestRandomTopology(unittest.TestCase):

    def test_deterministic_and_connected(self):
        first = topology.random_topology(16, 3.0, 1.0, seed=7)
        second = topology.random_topology(16, 3.0, 1.0, seed=7)
        self.assertEqual(first.nodes, second.nodes)
        self.assertEqual(first.links, second.links)
        self.assertEqual(first.name, 'random-16-s7')
        self.assertTrue(nx.is_weakly_connected(first.graph()))
        for node in first.nodes:
            self.assertTrue(0.0 <= node.x <= 3.0 and 0.0 <= node.y <= 3.0)

    def test_small_square(self):
        top = topology.random_topology(2, 0.5, 1.0, seed=1)
        self.assertEqual(len(top.links), 2)

    def test_unreachable(self):
        with self.assertRaises(TopologyError):
            topology.random_topology(16, 100.0, 1.0, seed=1)


class TestTopologyFiles(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)

    def test_round_trip(self):
        for top in (topology.wrapped_grid(), topology.random_topology(seed=3), topology.line_topology(2)):
            path = os.path.join(self.tmpdir.name, f'{top.name}.top')
            topology.write_topology(top, path)
            loaded = topology.read_topology(path)
            self.assertEqual(loaded.nodes, top.nodes)
            self.assertEqual(loaded.links, top.links)
            self.assertEqual(loaded.wrap, top.wrap)
            self.assertEqual(loaded.m, top.m)
            self.assertEqual(loaded.name, top.name)
            self.assertTrue((loaded.distances == top.distances).all())

    def test_custom_links(self):
        path = os.path.join(self.tmpdir.name, 'pair.top')
        with open(path, 'w') as f:
            f.write('# two nodes, one direction\n'
                    'nodes 2 m 1.0 wrap none\n'
                    'node 0 0.0 0.0 tx\n'
                    'node 1 5.0 0.0 rx\n'
                    'link 0 1\n')
        top = topology.read_topology(path)
        self.assertEqual(top.out_links(0), [1])
        self.assertEqual(top.distance(0, 1), 5.0)

    def test_malformed_line_reports_position(self):
        path = os.path.join(self.tmpdir.name, 'broken.top')
        with open(path, 'w') as f:
            f.write('nodes 2 m 1.0 wrap none\n'
                    'node 0 0.0 0.0 tx\n'
                    'node 1 abc 0.0 tx\n')
        with self.assertRaises(TopologyError) as ctx:
            topology.read_topology(path)
        self.assertIn('broken.top:3', str(ctx.exception))

    def test_node_count_mismatch(self):
        path = os.path.join(self.tmpdir.name, 'short.top')
        with open(path, 'w') as f:
            f.write('nodes 3 m 1.0 wrap none\nnode 0 0.0 0.0 tx\nnode 1 1.0 0.0 tx\n')
        with self.assertRaises(TopologyError):
            topology.read_topology(path)

    def test_transmitter_without_links(self):
        with self.assertRaises(TopologyError):
            topology.Topology([topology.Node(0, 0.0, 0.0), topology.Node(1, 5.0, 0.0)], m=1.0)
