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

"""Partition function of the hard-core model on a line of nodes.

Z_i is the normalisation constant of the product-form distribution of i
consecutive nodes in which no two active nodes are within index distance beta.
Values are kept as logarithms since Z_i grows like lambda_0 ** i.
"""

from collections.abc import Iterator
from dataclasses import dataclass
import itertools
import logging
import math

import numpy as np

from csma_tradeoff.common.exceptions import DomainError

LOG = logging.getLogger(__name__)

BRUTE_FORCE_MAX_NODES = 24
_CHUNK_BITS = 20


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the line model with 2n+1 transmitting nodes.

    beta and eta may be real for the infinite network; finite-network
    operations call require_integral() first.
    """

    beta: float
    eta: float
    sigma: float
    psi: float = 0.5
    n: int = 1

    def __post_init__(self):
        if self.sigma <= 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 <= self.psi <= 1.0:
            raise DomainError(f"psi must lie in [0, 1], got {self.psi}")
        for name in ('beta', 'eta'):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative, got {getattr(self, name)}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")

    def require_integral(self) -> None:
        for name in ('beta', 'eta'):
            value = getattr(self, name)
            if int(value) != value:
                raise DomainError(f"{name} must be an integer for a finite network, got {value}")


@dataclass(frozen=True)
class PartitionTable:
    beta: int
    sigma: float
    log_values: tuple[float, ...]

    @property
    def i_max(self) -> int:
        return len(self.log_values) - 1

    def log_z(self, i: int) -> float:
        if i < 0 or i > self.i_max:
            raise DomainError(f"Z_{i} outside the computed range 0..{self.i_max}")
        return self.log_values[i]

    def value(self, i: int) -> float:
        """Z_i as a float, inf when it is not representable."""
        log_z = self.log_z(i)
        return math.exp(log_z) if log_z < 709.0 else math.inf

    def values(self) -> list[float]:
        return [self.value(i) for i in range(self.i_max + 1)]

    def verify(self, rel_tol: float = 1e-12) -> None:
        """Check boundary values, the recursion and monotonicity in scaled arithmetic."""
        logs = self.log_values
        log_sigma = math.log(self.sigma)
        for i, log_z in enumerate(logs):
            if i <= self.beta + 1:
                expected = math.log1p(i * self.sigma)
            else:
                # Scale by Z_{i-1} so the check never overflows.
                ratio = 1.0 + math.exp(log_sigma + logs[i - self.beta - 1] - logs[i - 1])
                expected = logs[i - 1] + math.log(ratio)
            if abs(math.expm1(log_z - expected)) > rel_tol:
                raise DomainError(f"Partition table violates the recursion at i={i}")
            if i and log_z <= logs[i - 1]:
                raise DomainError(f"Partition table is not increasing at i={i}")


def _check_model(beta, sigma) -> None:
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if int(beta) != beta or beta < 0:
        raise DomainError(f"beta must be a non-negative integer, got {beta}")


def partition_recursive(beta: int, sigma: float, i_max: int) -> PartitionTable:
    """Compute log Z_0..log Z_{i_max} with the order beta+1 recursion.

    Z_i = 1 + i*sigma for i <= beta+1 and Z_i = Z_{i-1} + sigma*Z_{i-beta-1}
    afterwards, summed with log-sum-exp.
    """
    _check_model(beta, sigma)
    if i_max < 0:
        raise DomainError(f"i_max must be non-negative, got {i_max}")
    beta = int(beta)
    log_sigma = math.log(sigma)
    logs = [math.log1p(i * sigma) for i in range(min(i_max, beta + 1) + 1)]
    for i in range(beta + 2, i_max + 1):
        logs.append(float(np.logaddexp(logs[i - 1], log_sigma + logs[i - beta - 1])))
    return PartitionTable(beta=beta, sigma=float(sigma), log_values=tuple(logs))


def feasible_states(num_nodes: int, beta: int) -> Iterator[tuple[int, ...]]:
    """All activity vectors with no two ones within index distance beta."""
    for state in itertools.product((0, 1), repeat=num_nodes):
        active = [v for v, on in enumerate(state) if on]
        if all(b - a > beta for a, b in zip(active, active[1:])):
            yield state


def _popcount(masks: np.ndarray) -> np.ndarray:
    table = np.array([bin(b).count('1') for b in range(256)], dtype=np.int64)
    counts = np.zeros(masks.shape, dtype=np.int64)
    shifted = masks.copy()
    while np.any(shifted):
        counts += table[shifted & 0xFF]
        shifted >>= 8
    return counts


def partition_bruteforce(num_nodes: int, beta: int, sigma: float) -> float:
    """Exact Z by enumerating all 2**num_nodes activity vectors."""
    _check_model(beta, sigma)
    if num_nodes < 0 or num_nodes > BRUTE_FORCE_MAX_NODES:
        raise DomainError(f"Brute force supports 0..{BRUTE_FORCE_MAX_NODES} nodes, got {num_nodes}")
    beta = int(beta)
    per_size = np.zeros(num_nodes + 1, dtype=np.int64)
    total = 1 << num_nodes
    chunk = 1 << _CHUNK_BITS
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        feasible = np.ones(masks.shape, dtype=bool)
        for d in range(1, min(beta, num_nodes - 1) + 1):
            feasible &= (masks & (masks >> d)) == 0
        per_size += np.bincount(_popcount(masks[feasible]), minlength=num_nodes + 1)
    return math.fsum(int(count) * sigma ** k for k, count in enumerate(per_size))


def stationary_distribution(num_nodes: int, beta: int, sigma: float) -> dict[tuple[int, ...], float]:
    """Product-form limiting distribution pi over the feasible states."""
    _check_model(beta, sigma)
    weights = {state: sigma ** sum(state) for state in feasible_states(num_nodes, int(beta))}
    norm = math.fsum(weights.values())
    return {state: weight / norm for state, weight in weights.items()}


def generating_function_coefficients(beta: int, sigma: float, order: int) -> list[float]:
    """Taylor coefficients of G_Z(x) up to x**order by power series division."""
    _check_model(beta, sigma)
    beta = int(beta)
    poly = np.polynomial.polynomial
    numerator = np.zeros(beta + 2)
    numerator[0] = -1.0
    numerator[1] += 1.0 - sigma
    numerator[beta + 1] += sigma
    tail = np.zeros(beta + 2)
    tail[0] = 1.0
    tail[1] = -1.0
    tail[beta + 1] -= sigma
    denominator = poly.polymul([-1.0, 1.0], tail)

    coefficients = []
    for k in range(order + 1):
        acc = numerator[k] if k < len(numerator) else 0.0
        for m in range(1, min(k, len(denominator) - 1) + 1):
            acc -= denominator[m] * coefficients[k - m]
        coefficients.append(acc / denominator[0])
    return coefficients
