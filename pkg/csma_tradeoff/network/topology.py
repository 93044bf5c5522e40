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

"""Geometric network instances and their sensing/interference neighbourhoods."""

from collections.abc import Iterable
from collections.abc import Sequence
from dataclasses import dataclass
import logging
import math
import os

import networkx as nx
import numpy as np

from csma_tradeoff.common import utils
from csma_tradeoff.common.exceptions import TopologyError

LOG = logging.getLogger(__name__)

DISTANCE_SLACK = 1e-12
RANDOM_MAX_TRIES = 1000


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    transmitter: bool = True


class Topology:
    """Nodes in the plane (or on a torus) with distance-based links.

    Links join every pair of nodes at distance at most m; only transmitters
    use their out-links.
    """

    def __init__(self, nodes: Sequence[Node], m: float, wrap: tuple[float, float] | None = None,
                 links: Iterable[tuple[int, int]] | None = None, name: str = 'custom'):
        if not nodes:
            raise TopologyError("A topology needs at least one node")
        if m <= 0:
            raise TopologyError(f"Transmission range m must be positive, got {m}")
        self.nodes = tuple(nodes)
        self.m = float(m)
        self.wrap = None if wrap is None else (float(wrap[0]), float(wrap[1]))
        self.name = name
        self.index = {node.id: k for k, node in enumerate(self.nodes)}
        if len(self.index) != len(self.nodes):
            raise TopologyError("Node ids must be unique")
        self.distances = self._distance_matrix()

        if links is None:
            within = self.distances <= self.m + DISTANCE_SLACK
            np.fill_diagonal(within, False)
            links = [(self.nodes[u].id, self.nodes[v].id) for u, v in zip(*np.nonzero(within))]
        self.links = tuple(sorted(links))
        self._out = {node.id: [] for node in self.nodes}
        for u, v in self.links:
            if u not in self.index or v not in self.index:
                raise TopologyError(f"Link {u} -> {v} refers to an unknown node")
            self._out[u].append(v)
        for node in self.transmitters:
            if not self._out[node.id]:
                raise TopologyError(f"Transmitter {node.id} has no out-links")
        # Per-row distance order, fixed at construction; lookups never write.
        self._order = np.argsort(self.distances, axis=1, kind='stable')
        self._sorted = np.take_along_axis(self.distances, self._order, axis=1)
        for array in (self.distances, self._order, self._sorted):
            array.flags.writeable = False

    def _distance_matrix(self) -> np.ndarray:
        coords = np.array([(node.x, node.y) for node in self.nodes], dtype=float)
        delta = np.abs(coords[:, None, :] - coords[None, :, :])
        if self.wrap is not None:
            size = np.array(self.wrap)
            delta = np.minimum(delta, size - delta)
        return np.hypot(delta[..., 0], delta[..., 1])

    @property
    def transmitters(self) -> list[Node]:
        return [node for node in self.nodes if node.transmitter]

    def distance(self, u: int, v: int) -> float:
        return float(self.distances[self.index[u], self.index[v]])

    def out_links(self, v: int) -> list[int]:
        return list(self._out[v])

    def neighbours(self, v: int, radius: float) -> frozenset[int]:
        """Nodes other than v within distance radius of v."""
        k = self.index[v]
        count = int(np.searchsorted(self._sorted[k], radius + DISTANCE_SLACK, side='right'))
        return frozenset(self.nodes[j].id for j in self._order[k, :count] if j != k)

    def blockers(self, v: int, beta: float) -> frozenset[int]:
        return self.neighbours(v, beta)

    def interferers(self, v: int, eta: float) -> frozenset[int]:
        """Nodes within eta of v, v included."""
        return self.neighbours(v, eta) | {v}

    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(node.id for node in self.nodes)
        graph.add_edges_from(self.links)
        return graph


def line_topology(n: int) -> Topology:
    """2n+1 transmitters at -n..n with receive-only ends at -(n+1) and n+1."""
    if n < 1:
        raise TopologyError(f"n must be at least 1, got {n}")
    nodes = [Node(v, float(v), 0.0, abs(v) <= n) for v in range(-n - 1, n + 2)]
    return Topology(nodes, m=1.0, name=f'line-n{n}')


def wrapped_grid(rows: int = 4, cols: int = 4, spacing: float = 1.0, m: float = 1.0) -> Topology:
    if rows < 2 or cols < 2:
        raise TopologyError(f"A wrapped grid needs at least 2x2 nodes, got {rows}x{cols}")
    nodes = [Node(r * cols + c, c * spacing, r * spacing) for r in range(rows) for c in range(cols)]
    return Topology(nodes, m=m, wrap=(cols * spacing, rows * spacing), name=f'grid-{rows}x{cols}')


def random_topology(count: int = 16, side: float = 3.0, m: float = 1.0, seed: int = 0,
                    max_tries: int = RANDOM_MAX_TRIES) -> Topology:
    """Uniform placement on [0, side]^2, redrawn until the distance-m graph is connected."""
    if count < 2:
        raise TopologyError(f"count must be at least 2, got {count}")
    if side <= 0:
        raise TopologyError(f"side must be positive, got {side}")
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_tries + 1):
        coords = rng.uniform(0.0, side, size=(count, 2))
        graph = nx.Graph()
        graph.add_nodes_from(range(count))
        distances = np.hypot(*(coords[:, None, :] - coords[None, :, :]).transpose(2, 0, 1))
        graph.add_edges_from((u, v) for u in range(count) for v in range(u + 1, count)
                             if distances[u, v] <= m + DISTANCE_SLACK)
        if nx.is_connected(graph):
            LOG.debug("Random topology with seed %d connected after %d attempts", seed, attempt)
            nodes = [Node(k, float(x), float(y)) for k, (x, y) in enumerate(coords)]
            return Topology(nodes, m=m, name=f'random-{count}-s{seed}')
    raise TopologyError(f"No connected placement of {count} nodes on a {side}x{side} square within "
                        f"{max_tries} attempts; use a larger m or a smaller side")


def format_topology(top: Topology) -> str:
    """Plain-text topology format; floats keep their repr so reading back is exact."""
    wrap = 'none' if top.wrap is None else f'{top.wrap[0]!r},{top.wrap[1]!r}'
    lines = [f'nodes {len(top.nodes)} m {top.m!r} wrap {wrap}']
    lines += [f'node {node.id} {node.x!r} {node.y!r} {"tx" if node.transmitter else "rx"}' for node in top.nodes]
    lines += [f'link {u} {v}' for u, v in top.links]
    return '\n'.join(lines) + '\n'


def write_topology(top: Topology, path: str) -> None:
    if not utils.path_writable(path, parent=True):
        raise OSError(f"Unable to write {path}: insufficient permissions to parent path")
    with open(path, 'w') as f:
        f.write(format_topology(top))


def _parse_float(token: str, path: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise TopologyError(f"{path}:{lineno}: expected a number, got {token!r}")
    if not math.isfinite(value):
        raise TopologyError(f"{path}:{lineno}: {token!r} is not finite")
    return value


def read_topology(path: str) -> Topology:
    with open(path) as f:
        raw = f.read().splitlines()
    header, nodes, links = None, [], []
    for lineno, line in enumerate(raw, start=1):
        fields = line.split()
        if not fields or fields[0].startswith('#'):
            continue
        kind = fields[0]
        try:
            if kind == 'nodes' and len(fields) == 6 and fields[2] == 'm' and fields[4] == 'wrap':
                count = int(fields[1])
                m = _parse_float(fields[3], path, lineno)
                if fields[5] == 'none':
                    wrap = None
                else:
                    width, height = fields[5].split(',')
                    wrap = (_parse_float(width, path, lineno), _parse_float(height, path, lineno))
                header = (count, m, wrap)
            elif kind == 'node' and len(fields) == 5 and fields[4] in ('tx', 'rx'):
                nodes.append(Node(int(fields[1]), _parse_float(fields[2], path, lineno),
                                  _parse_float(fields[3], path, lineno), fields[4] == 'tx'))
            elif kind == 'link' and len(fields) == 3:
                links.append((int(fields[1]), int(fields[2])))
            else:
                raise TopologyError(f"{path}:{lineno}: unrecognised line {line.strip()!r}")
        except ValueError:
            raise TopologyError(f"{path}:{lineno}: malformed line {line.strip()!r}")
    if header is None:
        raise TopologyError(f"{path}: missing 'nodes' header")
    count, m, wrap = header
    if count != len(nodes):
        raise TopologyError(f"{path}: header announces {count} nodes, found {len(nodes)}")
    name = os.path.splitext(os.path.basename(path))[0]
    return Topology(nodes, m=m, wrap=wrap, links=links, name=name)
