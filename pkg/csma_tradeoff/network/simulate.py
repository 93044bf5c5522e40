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

"""Continuous-time discrete-event simulation of CSMA with perfect capture.

Every idle transmitter runs an exponential(sigma) backoff. When it expires
the node starts an exponential(1) transmission unless a node within the
sensing range beta is active, in which case a new backoff is drawn. The
transmission succeeds if no node within eta of its receiver (other than the
sender) is active at the start instant; a failed transmission still occupies
the channel for its full duration.
"""

from collections import Counter
from collections.abc import Sequence
from concurrent import futures
import dataclasses
from dataclasses import dataclass
import heapq
import logging
import math

import numpy as np
from scipy import stats as scipy_stats

from csma_tradeoff.common import utils
from csma_tradeoff.common.exceptions import ConsistencyError
from csma_tradeoff.common.exceptions import DomainError
from csma_tradeoff.common.exceptions import TopologyError
from csma_tradeoff.network.topology import Topology

LOG = logging.getLogger(__name__)

# END sorts before ATTEMPT at equal (time, node).
EVENT_END = 0
EVENT_ATTEMPT = 1

ALL = 'ALL'
RNG_BLOCK = 1024
OCCUPANCY_QUANTILE = 0.999
SIGNIFICANCE_STDERRS = 2.0

RESULT_HEADER = ('topology_id', 'beta', 'eta', 'sigma', 'seed', 'node_id',
                 'attempts', 'blocked', 'collided', 'success', 'throughput', 'stderr')
EMPIRICAL_HEADER = ('sigma', 'beta', 'throughput', 'stderr', 'runner_up', 'significant')


@dataclass(frozen=True)
class SimConfig:
    beta: float
    eta: float
    sigma: float
    horizon: float
    psi: float | None = None
    warmup_fraction: float = 0.1
    seed: int = 0
    batches: int = 20
    debug: bool = False
    occupancy_interval: float | None = None

    def __post_init__(self):
        if self.horizon <= 0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if self.sigma <= 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.beta < 0 or self.eta < 0:
            raise DomainError(f"Ranges must be non-negative, got beta={self.beta}, eta={self.eta}")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise DomainError(f"warmup_fraction must lie in [0, 1), got {self.warmup_fraction}")
        if self.batches < 2:
            raise DomainError(f"At least 2 batches are needed for a standard error, got {self.batches}")
        if self.psi is not None and not 0.0 <= self.psi <= 1.0:
            raise DomainError(f"psi must lie in [0, 1], got {self.psi}")
        if self.occupancy_interval is not None and self.occupancy_interval <= 0:
            raise DomainError(f"occupancy_interval must be positive, got {self.occupancy_interval}")

    @property
    def warmup(self) -> float:
        return self.warmup_fraction * self.horizon


@dataclass
class NodeStats:
    attempts: int = 0
    blocked_attempts: int = 0
    collided_transmissions: int = 0
    successful_transmissions: int = 0
    throughput_mean: float = 0.0
    throughput_stderr: float = 0.0


@dataclass(frozen=True)
class SimStats:
    """Counters and batch-means throughput per transmitter.

    The aggregate sums the counters and averages throughput over transmitters.
    """

    topology_id: str
    config: SimConfig
    observed_time: float
    nodes: dict[int, NodeStats]
    aggregate: NodeStats
    state_samples: dict[tuple[int, ...], int] | None = None

    def rows(self) -> list[tuple]:
        cfg = self.config
        rows = []
        for node_id, node in [*self.nodes.items(), (ALL, self.aggregate)]:
            rows.append((self.topology_id, cfg.beta, cfg.eta, cfg.sigma, cfg.seed, node_id,
                         node.attempts, node.blocked_attempts, node.collided_transmissions,
                         node.successful_transmissions, node.throughput_mean, node.throughput_stderr))
        return rows


class _Stream:
    """Per-node random stream with buffered draws."""

    def __init__(self, seed: np.random.SeedSequence):
        self._rng = np.random.Generator(np.random.PCG64(seed))
        self._exp = self._rng.standard_exponential(RNG_BLOCK)
        self._exp_pos = 0
        self._uni = self._rng.random(RNG_BLOCK)
        self._uni_pos = 0

    def exponential(self, rate: float) -> float:
        if self._exp_pos == RNG_BLOCK:
            self._exp = self._rng.standard_exponential(RNG_BLOCK)
            self._exp_pos = 0
        value = self._exp[self._exp_pos]
        self._exp_pos += 1
        return float(value) / rate

    def uniform(self) -> float:
        if self._uni_pos == RNG_BLOCK:
            self._uni = self._rng.random(RNG_BLOCK)
            self._uni_pos = 0
        value = self._uni[self._uni_pos]
        self._uni_pos += 1
        return float(value)


class CsmaSimulator:

    def __init__(self, top: Topology, cfg: SimConfig):
        if not top.transmitters:
            raise TopologyError(f"Topology {top.name} has no transmitters")
        self.top = top
        self.cfg = cfg
        index = top.index
        self.tx = [index[node.id] for node in top.transmitters]
        self.blockers = {}
        self.destinations = {}
        for node in top.transmitters:
            k = index[node.id]
            self.blockers[k] = [index[w] for w in sorted(top.blockers(node.id, cfg.beta))]
            targets = top.out_links(node.id)
            if cfg.psi is not None:
                # Line semantics: the rightmost out-link with probability psi, else the leftmost.
                targets = sorted(targets, key=lambda w: top.nodes[index[w]].x)
                targets = [targets[-1], targets[0]]
            self.destinations[k] = [index[w] for w in targets]
        self.interferers = {}
        for targets in self.destinations.values():
            for r in targets:
                if r not in self.interferers:
                    self.interferers[r] = [index[w] for w in sorted(top.interferers(top.nodes[r].id, cfg.eta))]
        seeds = np.random.SeedSequence(cfg.seed).spawn(len(top.nodes))
        self.streams = [_Stream(seed) for seed in seeds]

    def _pick_destination(self, k: int) -> int:
        targets = self.destinations[k]
        u = self.streams[k].uniform()
        if self.cfg.psi is not None:
            return targets[0] if u < self.cfg.psi else targets[1]
        return targets[min(int(u * len(targets)), len(targets) - 1)]

    def _check_hard_core(self, active: list[bool]) -> None:
        for k in self.tx:
            if active[k] and any(active[w] for w in self.blockers[k]):
                raise ConsistencyError(f"Nodes within sensing range {self.cfg.beta} are active together")

    def run(self) -> SimStats:
        cfg = self.cfg
        size = len(self.top.nodes)
        warmup = cfg.warmup
        observed = cfg.horizon - warmup
        batch_length = observed / cfg.batches

        attempts = [0] * size
        blocked = [0] * size
        collided = [0] * size
        success = [0] * size
        batch_success = np.zeros((cfg.batches, size), dtype=np.int64)

        active = [False] * size
        queue = [(self.streams[k].exponential(cfg.sigma), k, EVENT_ATTEMPT) for k in self.tx]
        heapq.heapify(queue)

        samples = Counter() if cfg.occupancy_interval is not None else None
        next_sample = warmup if samples is not None else math.inf
        events = 0

        while queue:
            time, k, kind = heapq.heappop(queue)
            if time > cfg.horizon:
                break
            while next_sample < time:
                samples[tuple(int(active[j]) for j in self.tx)] += 1
                next_sample += cfg.occupancy_interval
            events += 1
            counting = time >= warmup
            stream = self.streams[k]

            if kind == EVENT_END:
                active[k] = False
                heapq.heappush(queue, (time + stream.exponential(cfg.sigma), k, EVENT_ATTEMPT))
                continue

            if counting:
                attempts[k] += 1
            if any(active[w] for w in self.blockers[k]):
                if counting:
                    blocked[k] += 1
                heapq.heappush(queue, (time + stream.exponential(cfg.sigma), k, EVENT_ATTEMPT))
                continue

            receiver = self._pick_destination(k)
            failed = any(active[w] for w in self.interferers[receiver] if w != k)
            active[k] = True
            if counting:
                if failed:
                    collided[k] += 1
                else:
                    success[k] += 1
                    batch = min(int((time - warmup) / batch_length), cfg.batches - 1)
                    batch_success[batch, k] += 1
            if cfg.debug:
                self._check_hard_core(active)
            heapq.heappush(queue, (time + stream.exponential(1.0), k, EVENT_END))

        if samples is not None:
            while next_sample < cfg.horizon:
                samples[tuple(int(active[j]) for j in self.tx)] += 1
                next_sample += cfg.occupancy_interval
        LOG.debug("Simulated %d events on %s (beta=%s, eta=%s, sigma=%s, seed=%s)",
                  events, self.top.name, cfg.beta, cfg.eta, cfg.sigma, cfg.seed)

        rates = batch_success / batch_length
        nodes = {}
        for k in self.tx:
            nodes[self.top.nodes[k].id] = NodeStats(
                attempts=attempts[k], blocked_attempts=blocked[k],
                collided_transmissions=collided[k], successful_transmissions=success[k],
                throughput_mean=float(rates[:, k].mean()),
                throughput_stderr=_stderr(rates[:, k]))
        per_batch = rates[:, self.tx].mean(axis=1)
        aggregate = NodeStats(
            attempts=sum(attempts), blocked_attempts=sum(blocked),
            collided_transmissions=sum(collided), successful_transmissions=sum(success),
            throughput_mean=float(per_batch.mean()), throughput_stderr=_stderr(per_batch))
        return SimStats(topology_id=self.top.name, config=cfg, observed_time=observed, nodes=nodes,
                        aggregate=aggregate, state_samples=None if samples is None else dict(sorted(samples.items())))


def _stderr(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def simulate(top: Topology, cfg: SimConfig) -> SimStats:
    return CsmaSimulator(top, cfg).run()


def _run_task(task):
    key, top, cfg = task
    return key, simulate(top, cfg)


def run_replications(tasks: Sequence[tuple], max_workers: int | None = None) -> list[tuple]:
    """Run (key, topology, config) tasks, in a process pool when more than one worker is allowed.

    Results come back sorted by key so the worker count never changes the output.
    """
    if max_workers is None:
        max_workers = utils.max_workers()
    if max_workers <= 1 or len(tasks) <= 1:
        results = [_run_task(task) for task in tasks]
    else:
        with futures.ProcessPoolExecutor(max_workers=min(max_workers, len(tasks))) as executor:
            results = list(executor.map(_run_task, tasks))
    return sorted(results, key=lambda item: item[0])


@dataclass(frozen=True)
class EmpiricalOptimum:
    sigma: float
    beta: float
    throughput: float
    stderr: float
    runner_up: float | None
    significant: bool

    def row(self) -> tuple:
        return (self.sigma, self.beta, self.throughput, self.stderr, self.runner_up, self.significant)


def estimate_threshold_empirical(top: Topology, eta: float, sigma_grid: Sequence[float],
                                 beta_grid: Sequence[float], cfg: SimConfig,
                                 max_workers: int | None = None) -> list[EmpiricalOptimum]:
    """Empirical throughput-optimal beta for every sigma, judged on the aggregate throughput.

    The optimum is significant when it beats the runner-up by more than two
    combined standard errors.
    """
    if not sigma_grid or not beta_grid:
        raise DomainError("sigma and beta grids must not be empty")
    tasks = [((float(sigma), float(beta)), top, dataclasses.replace(cfg, beta=beta, eta=eta, sigma=sigma))
             for sigma in sigma_grid for beta in beta_grid]
    by_sigma = {}
    for (sigma, beta), result in run_replications(tasks, max_workers):
        by_sigma.setdefault(sigma, []).append((beta, result.aggregate))

    optima = []
    for sigma, entries in sorted(by_sigma.items()):
        # Stable sort keeps the smaller beta first on exact ties.
        ranked = sorted(entries, key=lambda e: -e[1].throughput_mean)
        best_beta, best = ranked[0]
        if len(ranked) == 1:
            optima.append(EmpiricalOptimum(sigma, best_beta, best.throughput_mean, best.throughput_stderr, None, True))
            continue
        second_beta, second = ranked[1]
        gap = best.throughput_mean - second.throughput_mean
        combined = math.hypot(best.throughput_stderr, second.throughput_stderr)
        optima.append(EmpiricalOptimum(sigma, best_beta, best.throughput_mean, best.throughput_stderr,
                                       second_beta, gap > SIGNIFICANCE_STDERRS * combined))
    return optima


def chi_square_occupancy(samples: dict[tuple[int, ...], int],
                         distribution: dict[tuple[int, ...], float]) -> tuple[float, int, float]:
    """Pearson statistic of sampled states against a stationary distribution.

    Returns (statistic, degrees of freedom, 0.999 quantile of the chi-square law).
    """
    unexpected = set(samples) - set(distribution)
    if unexpected:
        raise ConsistencyError(f"Sampled states outside the support: {sorted(unexpected)[:3]}")
    total = sum(samples.values())
    if total == 0:
        raise DomainError("No occupancy samples were recorded")
    statistic = 0.0
    for state, probability in distribution.items():
        expected = total * probability
        statistic += (samples.get(state, 0) - expected) ** 2 / expected
    dof = len(distribution) - 1
    return statistic, dof, float(scipy_stats.chi2.ppf(OCCUPANCY_QUANTILE, dof))
