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

import os
import tempfile
import textwrap
import unittest

from csma_tradeoff.common import config
from csma_tradeoff.common.exceptions import ConfigError
from csma_tradeoff.network import topology

VALID = """\
---
experiment:
  name: sweep
topology:
  kind: grid
  rows: 4
  cols: 4
simulation:
  beta: [0, 1.5]
  eta: 1
  sigma: [0.5, 2.0]
  seeds: [2, 1]
  horizon: 100.0
  batches: 10
"""


class TestExperimentConfig(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)

    def write(self, text, name='experiment.yml'):
        path = os.path.join(self.tmpdir.name, name)
        with open(path, 'w') as f:
            f.write(textwrap.dedent(text))
        return path

    def assertConfigError(self, text, line):
        path = self.write(text)
        with self.assertRaises(ConfigError) as ctx:
            config.load_experiment_config(path)
        self.assertIn(f"{path}:{line}:", str(ctx.exception))
        self.assertEqual(ctx.exception.line, line)

    def test_load(self):
        experiment = config.load_experiment_config(self.write(VALID))
        self.assertEqual(experiment.name, 'sweep')
        self.assertEqual(experiment.beta, (0.0, 1.5))
        self.assertEqual(experiment.eta, (1.0,))
        self.assertEqual(experiment.seeds, (2, 1))
        self.assertEqual(experiment.batches, 10)
        self.assertIsNone(experiment.psi)
        self.assertIsNone(experiment.output)
        configs = experiment.sim_configs()
        self.assertEqual(len(configs), 8)
        keys = [key for key, _ in configs]
        self.assertEqual(keys, sorted(keys))
        self.assertEqual(configs[0][1].seed, 1)
        self.assertEqual(configs[0][1].horizon, 100.0)
        self.assertEqual(config.build_topology(experiment).name, 'grid-4x4')

    def test_template_round_trip(self):
        path = os.path.join(self.tmpdir.name, 'template.yml')
        config.save_experiment_config(path)
        with open(path) as f:
            self.assertTrue(f.read().startswith('---\n'))
        experiment = config.load_experiment_config(path)
        self.assertEqual(experiment.name, 'line-collision-free')
        self.assertEqual(experiment.topology.kind, 'line')
        self.assertEqual(experiment.seeds, (1, 2, 3))
        self.assertEqual(len(experiment.sim_configs()), 3)
        self.assertEqual(experiment.output, 'results.csv')

    def test_file_topology_relative_to_config(self):
        topology.write_topology(topology.wrapped_grid(), os.path.join(self.tmpdir.name, 'torus.top'))
        path = self.write(VALID.replace('  kind: grid\n  rows: 4\n  cols: 4\n', '  kind: file\n  path: torus.top\n'))
        experiment = config.load_experiment_config(path)
        top = config.build_topology(experiment, path)
        self.assertEqual(top.name, 'torus')
        self.assertEqual(len(top.nodes), 16)

    def test_missing_topology_file(self):
        path = self.write(VALID.replace('  kind: grid\n  rows: 4\n  cols: 4\n', '  kind: file\n  path: nope.top\n'))
        experiment = config.load_experiment_config(path)
        with self.assertRaises(ConfigError):
            config.build_topology(experiment, path)

    def test_name_defaults_to_file_stem(self):
        experiment = config.load_experiment_config(self.write(VALID.replace('experiment:\n  name: sweep\n', '')))
        self.assertEqual(experiment.name, 'experiment')

    def test_too_few_batches(self):
        self.assertConfigError(VALID.replace('batches: 10', 'batches: 1'), 14)

    def test_unknown_key(self):
        self.assertConfigError(VALID.replace('  horizon: 100.0\n', '  horizon: 100.0\n  colour: red\n'), 14)

    def test_unknown_section(self):
        self.assertConfigError(VALID + 'extras:\n  a: 1\n', 15)

    def test_bad_topology_kind(self):
        self.assertConfigError(VALID.replace('kind: grid', 'kind: hexagon'), 5)

    def test_non_numeric_grid(self):
        self.assertConfigError(VALID.replace('sigma: [0.5, 2.0]', 'sigma: [0.5, fast]'), 11)

    def test_negative_sigma(self):
        self.assertConfigError(VALID.replace('sigma: [0.5, 2.0]', 'sigma: [0.5, -2.0]'), 11)

    def test_missing_horizon(self):
        path = self.write(VALID.replace('  horizon: 100.0\n', ''))
        with self.assertRaises(ConfigError) as ctx:
            config.load_experiment_config(path)
        self.assertIn("horizon", str(ctx.exception))

    def test_missing_simulation_section(self):
        path = self.write('---\ntopology:\n  kind: line\n')
        with self.assertRaises(ConfigError) as ctx:
            config.load_experiment_config(path)
        self.assertIn("simulation", str(ctx.exception))

    def test_invalid_yaml(self):
        path = self.write(VALID.replace("  horizon: 100.0\n", "  horizon: [100.0\n"))
        with self.assertRaises(ConfigError) as ctx:
            config.load_experiment_config(path)
        self.assertIn("invalid YAML", str(ctx.exception))
        self.assertGreaterEqual(ctx.exception.line, 13)
