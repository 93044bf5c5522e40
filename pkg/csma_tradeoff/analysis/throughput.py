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

"""Throughput of node 0 on the line: finite network, infinite limit and closed forms."""

from dataclasses import dataclass
import logging
import math

from csma_tradeoff.analysis.partition import ModelParams
from csma_tradeoff.analysis.partition import partition_recursive
from csma_tradeoff.analysis.roots import dominant_mu
from csma_tradeoff.common.exceptions import ConsistencyError
from csma_tradeoff.common.exceptions import DomainError

LOG = logging.getLogger(__name__)

KINDS = ('finite', 'infinite', 'collision_free')
DIRECTIONS = ('right', 'left')
MIDDLE_BRANCH_RTOL = 1e-10


@dataclass(frozen=True)
class ThroughputResult:
    params: ModelParams
    value: float
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"Unknown throughput kind {self.kind!r}, expected one of {KINDS}")


@dataclass(frozen=True)
class NodeSets:
    """Hidden, exposed and blocking nodes of a transmission from node 0."""

    direction: str
    hidden: frozenset[int]
    exposed: frozenset[int]
    blocking: frozenset[int]


def hidden_exposed_sets(beta: int, eta: int, n: int, direction: str = 'right') -> NodeSets:
    """Index sets for a transmission from node 0 to node +1 (right) or -1 (left)."""
    if direction not in DIRECTIONS:
        raise DomainError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    if beta < 0 or eta < 0:
        raise DomainError(f"Ranges must be non-negative, got beta={beta}, eta={eta}")
    receiver = 1 if direction == 'right' else -1
    hidden, exposed, blocking = set(), set(), set()
    for v in range(-n, n + 1):
        sensed = abs(v) <= beta
        interferes = abs(v - receiver) <= eta
        if sensed and interferes:
            blocking.add(v)
        elif sensed:
            exposed.add(v)
        elif interferes:
            hidden.add(v)
    return NodeSets(direction, frozenset(hidden), frozenset(exposed), frozenset(blocking))


def throughput_finite(params: ModelParams) -> ThroughputResult:
    """theta_n = sigma Z_{n-max(beta,eta-1)} Z_{n-max(beta,eta+1)} / Z_{2n+1}.

    The left and right contributions are symmetric, so psi drops out.
    """
    params.require_integral()
    beta, eta, n = int(params.beta), int(params.eta), params.n
    a = n - max(beta, eta - 1)
    b = n - max(beta, eta + 1)
    if b < 0:
        raise DomainError(f"n={n} is too small for beta={beta}, eta={eta}: need n >= {max(beta, eta + 1)}")
    table = partition_recursive(beta, params.sigma, 2 * n + 1)
    log_theta = math.log(params.sigma) + table.log_z(a) + table.log_z(b) - table.log_z(2 * n + 1)
    return ThroughputResult(params, math.exp(log_theta), 'finite')


def blocked_exponent(beta: float, eta: float) -> float:
    """f(beta): 2*eta below eta-1, eta+beta+1 on [eta-1, eta+1], 2*beta above."""
    if beta < 0:
        raise DomainError(f"beta must be non-negative, got {beta}")
    if beta <= eta - 1:
        return 2.0 * eta
    if beta <= eta + 1:
        return eta + beta + 1.0
    return 2.0 * beta


def _theta_from_mu(beta: float, eta: float, sigma: float, mu: float) -> float:
    # lambda_0 = 1 + mu and (beta+1) lambda_0 - beta = 1 + (beta+1) mu
    log_theta = (math.log(sigma) + (beta - blocked_exponent(beta, eta)) * math.log1p(mu)
                 - math.log1p((beta + 1) * mu))
    return math.exp(log_theta)


def throughput_middle_branch(beta: float, eta: float, sigma: float) -> float:
    """theta = g lambda_0**(beta-eta-1) / (beta+1), g = (lambda_0-1)/(lambda_0 - beta/(beta+1))."""
    if not eta - 1 <= beta <= eta + 1:
        raise DomainError(f"The middle branch needs beta in [{eta - 1}, {eta + 1}], got {beta}")
    mu = dominant_mu(beta, sigma)
    g = mu / (mu + 1.0 / (beta + 1.0))
    return g * math.exp((beta - eta - 1) * math.log1p(mu)) / (beta + 1.0)


def throughput_infinite(beta: float, eta: float, sigma: float) -> ThroughputResult:
    """Infinite-network throughput sigma lambda_0**(beta-f(beta)) / ((beta+1) lambda_0 - beta)."""
    params = ModelParams(beta=beta, eta=eta, sigma=sigma)
    value = _theta_from_mu(beta, eta, sigma, dominant_mu(beta, sigma))
    if eta - 1 <= beta <= eta + 1:
        check = throughput_middle_branch(beta, eta, sigma)
        if abs(check - value) > MIDDLE_BRANCH_RTOL * value:
            raise ConsistencyError(f"Middle-branch forms disagree at beta={beta}, eta={eta}, sigma={sigma}: "
                                   f"{value} vs {check}")
    return ThroughputResult(params, value, 'infinite')


def throughput_collision_free(beta: float, sigma: float) -> ThroughputResult:
    """(lambda_0 - 1) / ((beta+1) lambda_0 - beta); the infinite throughput whenever beta >= eta+1.

    params.eta is the largest interference range the value holds for.
    """
    params = ModelParams(beta=beta, eta=max(beta - 1.0, 0.0), sigma=sigma)
    mu = dominant_mu(beta, params.sigma)
    return ThroughputResult(params, mu / (1.0 + (beta + 1.0) * mu), 'collision_free')


def throughput_limit(beta: float, eta: float) -> float:
    """Limit of the infinite throughput as sigma grows without bound."""
    if beta < 0:
        raise DomainError(f"beta must be non-negative, got {beta}")
    return 1.0 / (beta + 1.0) if beta >= eta + 1 else 0.0
