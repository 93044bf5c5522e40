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

from dataclasses import dataclass
import itertools
import os
from pathlib import Path

from ruamel.yaml import YAML, YAMLError

from csma_tradeoff.common import utils
from csma_tradeoff.common.exceptions import ConfigError
from csma_tradeoff.common.exceptions import CsmaError
from csma_tradeoff.network import topology as topology_lib
from csma_tradeoff.network.simulate import SimConfig

TOPOLOGY_KINDS = ('line', 'grid', 'random', 'file')

SECTIONS = {
    'experiment': {'name'},
    'topology': {'kind', 'n', 'rows', 'cols', 'spacing', 'm', 'count', 'side', 'seed', 'path'},
    'simulation': {'beta', 'eta', 'sigma', 'seeds', 'horizon', 'batches', 'warmup_fraction', 'psi'},
    'output': {'path'},
}

TEMPLATE = {
    'experiment': {'name': 'line-collision-free'},
    'topology': {'kind': 'line', 'n': 3},
    'simulation': {
        'beta': [2],
        'eta': [1],
        'sigma': [1.0],
        'seeds': [1, 2, 3],
        'horizon': 20000.0,
        'batches': 20,
        'warmup_fraction': 0.1,
    },
    'output': {'path': 'results.csv'},
}


@dataclass(frozen=True)
class TopologySpec:
    kind: str
    n: int = 3
    rows: int = 4
    cols: int = 4
    spacing: float = 1.0
    m: float = 1.0
    count: int = 16
    side: float = 3.0
    seed: int = 0
    path: str | None = None

    def build(self) -> topology_lib.Topology:
        if self.kind == 'line':
            return topology_lib.line_topology(self.n)
        if self.kind == 'grid':
            return topology_lib.wrapped_grid(self.rows, self.cols, self.spacing, self.m)
        if self.kind == 'random':
            return topology_lib.random_topology(self.count, self.side, self.m, self.seed)
        return topology_lib.read_topology(self.path)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    topology: TopologySpec
    beta: tuple[float, ...]
    eta: tuple[float, ...]
    sigma: tuple[float, ...]
    seeds: tuple[int, ...]
    horizon: float
    batches: int = 20
    warmup_fraction: float = 0.1
    psi: float | None = None
    output: str | None = None

    def sim_configs(self) -> list[tuple[tuple, SimConfig]]:
        """(key, SimConfig) for every grid point, ordered by key."""
        configs = []
        for beta, eta, sigma, seed in itertools.product(self.beta, self.eta, self.sigma, self.seeds):
            cfg = SimConfig(beta=beta, eta=eta, sigma=sigma, horizon=self.horizon, psi=self.psi,
                            warmup_fraction=self.warmup_fraction, seed=seed, batches=self.batches)
            configs.append(((beta, eta, sigma, seed), cfg))
        return sorted(configs, key=lambda item: item[0])


def _line(mapping, key=None) -> int | None:
    """1-based line of `key` in a round-trip loaded mapping."""
    lc = getattr(mapping, 'lc', None)
    if lc is None:
        return None
    if key is not None and key in mapping:
        return lc.key(key)[0] + 1
    return lc.line + 1


def _number(section, key, path, kind=float, positive=False, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing required key '{key}'", path, _line(section))
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' must be a number, got {value!r}", path, _line(section, key))
    if kind is int and int(value) != value:
        raise ConfigError(f"'{key}' must be an integer, got {value!r}", path, _line(section, key))
    if positive and value <= 0:
        raise ConfigError(f"'{key}' must be positive, got {value!r}", path, _line(section, key))
    return kind(value)


def _grid(section, key, path, kind=float) -> tuple:
    if key not in section:
        raise ConfigError(f"missing required grid '{key}'", path, _line(section))
    values = section[key]
    if not isinstance(values, list):
        values = [values]
    if not values:
        raise ConfigError(f"grid '{key}' must not be empty", path, _line(section, key))
    for value in values:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"grid '{key}' holds a non-numeric value {value!r}", path, _line(section, key))
    return tuple(kind(value) for value in values)


def _section(data, name, path, required=True):
    if name not in data:
        if required:
            raise ConfigError(f"missing section '{name}'", path, _line(data))
        return {}
    section = data[name]
    if not isinstance(section, dict):
        raise ConfigError(f"section '{name}' must be a mapping", path, _line(data, name))
    unknown = [key for key in section if key not in SECTIONS[name]]
    if unknown:
        raise ConfigError(f"unknown key '{unknown[0]}' in section '{name}'", path, _line(section, unknown[0]))
    return section


def load_experiment_config(config_path: str) -> ExperimentConfig:
    """Loads an experiment definition from a YAML file.

    Errors name the file and, when known, the line of the offending key.
    """
    yaml_loader = YAML()
    try:
        with open(config_path) as f:
            data = yaml_loader.load(f)
    except YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        problem = getattr(e, 'problem', None) or str(e).splitlines()[0]
        raise ConfigError(f"invalid YAML: {problem}", config_path, mark.line + 1 if mark else None)
    if not isinstance(data, dict):
        raise ConfigError("the document must be a mapping of sections", config_path)
    unknown = [key for key in data if key not in SECTIONS]
    if unknown:
        raise ConfigError(f"unknown section '{unknown[0]}'", config_path, _line(data, unknown[0]))

    experiment = _section(data, 'experiment', config_path, required=False)
    topology = _section(data, 'topology', config_path)
    simulation = _section(data, 'simulation', config_path)
    output = _section(data, 'output', config_path, required=False)

    kind = topology.get('kind')
    if kind not in TOPOLOGY_KINDS:
        raise ConfigError(f"topology kind must be one of {', '.join(TOPOLOGY_KINDS)}, got {kind!r}",
                          config_path, _line(topology, 'kind'))
    topology_path = None
    if kind == 'file':
        if 'path' not in topology:
            raise ConfigError("a file topology needs 'path'", config_path, _line(topology))
        topology_path = os.path.join(os.path.dirname(os.path.abspath(config_path)), str(topology['path']))
    spec = TopologySpec(
        kind=kind,
        n=_number(topology, 'n', config_path, int, positive=True, default=3),
        rows=_number(topology, 'rows', config_path, int, positive=True, default=4),
        cols=_number(topology, 'cols', config_path, int, positive=True, default=4),
        spacing=_number(topology, 'spacing', config_path, positive=True, default=1.0),
        m=_number(topology, 'm', config_path, positive=True, default=1.0),
        count=_number(topology, 'count', config_path, int, positive=True, default=16),
        side=_number(topology, 'side', config_path, positive=True, default=3.0),
        seed=_number(topology, 'seed', config_path, int, default=0),
        path=topology_path,
    )

    batches = _number(simulation, 'batches', config_path, int, default=20)
    if batches < 2:
        raise ConfigError(f"'batches' must be at least 2 to estimate a standard error, got {batches}",
                          config_path, _line(simulation, 'batches'))
    warmup_fraction = _number(simulation, 'warmup_fraction', config_path, default=0.1)
    if not 0.0 <= warmup_fraction < 1.0:
        raise ConfigError(f"'warmup_fraction' must lie in [0, 1), got {warmup_fraction}",
                          config_path, _line(simulation, 'warmup_fraction'))
    psi = None
    if simulation.get('psi') is not None:
        psi = _number(simulation, 'psi', config_path)
        if not 0.0 <= psi <= 1.0:
            raise ConfigError(f"'psi' must lie in [0, 1], got {psi}", config_path, _line(simulation, 'psi'))

    out_path = output.get('path')
    if out_path is not None:
        out_path = str(out_path)
        if out_path != '-' and not utils.path_writable(out_path, parent=True):
            raise ConfigError(f"output path {out_path} is not writable", config_path, _line(output, 'path'))

    sigma = _grid(simulation, 'sigma', config_path)
    if min(sigma) <= 0:
        raise ConfigError("sigma values must be positive", config_path, _line(simulation, 'sigma'))
    beta = _grid(simulation, 'beta', config_path)
    eta = _grid(simulation, 'eta', config_path)
    if min(beta) < 0 or min(eta) < 0:
        raise ConfigError("ranges must be non-negative", config_path, _line(simulation))

    return ExperimentConfig(
        name=str(experiment.get('name', Path(config_path).stem)),
        topology=spec,
        beta=beta,
        eta=eta,
        sigma=sigma,
        seeds=_grid(simulation, 'seeds', config_path, int) if 'seeds' in simulation else (0,),
        horizon=_number(simulation, 'horizon', config_path, positive=True),
        batches=batches,
        warmup_fraction=warmup_fraction,
        psi=psi,
        output=out_path,
    )


def build_topology(config: ExperimentConfig, config_path: str | None = None) -> topology_lib.Topology:
    try:
        return config.topology.build()
    except (CsmaError, OSError) as e:
        raise ConfigError(f"cannot build topology: {e}", config_path)


def save_experiment_config(config_path: str, data: dict | None = None) -> None:
    """Writes an experiment definition, the template when no data is given."""
    if not utils.path_writable(config_path, parent=True):
        raise OSError(f"Unable to write {config_path}: insufficient permissions to parent path")
    yaml = YAML()
    yaml.indent(mapping=2, sequence=4, offset=2)
    yaml.explicit_start = True
    with open(config_path, 'w') as f:
        yaml.dump(TEMPLATE if data is None else data, f)
