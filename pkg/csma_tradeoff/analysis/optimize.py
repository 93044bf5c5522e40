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

"""Optimal sensing range and the activation-rate threshold interval.

For sigma below sigma_min the best sensing range is eta-1 (maximal spatial
reuse), above sigma_max it is eta+1 (no hidden nodes). In between, the optimum
beta* solves F(beta, sigma) = 1 with

    F(beta, sigma) = (eta + 2 + beta / (1 + mu_0 + beta mu_0)) ln(1 + mu_0).
"""

from dataclasses import dataclass
import functools
import logging
import math

import numpy as np
from scipy import optimize

from csma_tradeoff.analysis.partition import ModelParams
from csma_tradeoff.analysis.roots import dominant_mu
from csma_tradeoff.analysis.throughput import throughput_finite
from csma_tradeoff.analysis.throughput import throughput_infinite
from csma_tradeoff.common.exceptions import ConsistencyError
from csma_tradeoff.common.exceptions import DomainError
from csma_tradeoff.common.exceptions import RootFindingError

LOG = logging.getLogger(__name__)

TAU = (math.sqrt(5.0) - 1.0) / 2.0
SIGMA_BRACKET = (1e-12, 1.0)
MAX_DOUBLINGS = 200
BETA_XTOL = 1e-10
LOCAL_STEP = 0.01
LOCAL_RTOL = 1e-12

SWEEP_HEADER = ('eta', 'sigma', 'beta_star_continuous', 'beta_star_finite_n', 'n',
                'sigma_min', 'sigma_max', 'bound_low', 'bound_high', 'approx_min', 'approx_max')


@dataclass(frozen=True)
class ThresholdResult:
    eta: int
    sigma_min: float
    sigma_max: float
    bound_low: float
    bound_high: float
    approx_min: float
    approx_max: float
    beta_star_samples: tuple[tuple[float, float], ...]

    @property
    def width(self) -> float:
        return self.sigma_max - self.sigma_min


def big_f(beta: float, eta: float, sigma: float) -> float:
    mu = dominant_mu(beta, sigma)
    return (eta + 2.0 + beta / (1.0 + mu + beta * mu)) * math.log1p(mu)


def sigma_of_beta(beta: float, eta: float) -> float:
    """The unique sigma with F(beta, sigma) = 1."""
    low, high = SIGMA_BRACKET
    if big_f(beta, eta, low) >= 1.0:
        raise RootFindingError(f"F(beta={beta}) already exceeds 1 at sigma={low}")
    for _ in range(MAX_DOUBLINGS):
        if big_f(beta, eta, high) >= 1.0:
            break
        low, high = high, 2.0 * high
    else:
        raise RootFindingError(f"Could not bracket sigma(beta) for beta={beta}, eta={eta}")
    return optimize.bisect(lambda s: big_f(beta, eta, s) - 1.0, low, high,
                           xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)


def _check_eta(eta) -> None:
    if eta < 1 or int(eta) != eta:
        raise DomainError(f"eta must be a positive integer, got {eta}")


@functools.cache
def _threshold_pair(eta: int) -> tuple[float, float]:
    return sigma_of_beta(eta - 1, eta), sigma_of_beta(eta + 1, eta)


def analytic_bounds(eta: int) -> tuple[float, float]:
    """kappa (1+kappa)**(eta-1) and kappa (1+kappa)**(eta+1) with kappa = tau/(eta+1)."""
    kappa = TAU / (eta + 1)
    return kappa * (1 + kappa) ** (eta - 1), kappa * (1 + kappa) ** (eta + 1)


def approximate_thresholds(eta: int) -> tuple[float, float]:
    """Closed-form approximations of sigma_min and sigma_max."""
    alpha_minus = (3 * TAU + 1) / (2 * (2 * TAU + 1))
    alpha_plus = (7 * TAU + 1) / (2 * (2 * TAU + 1))
    mu_minus = TAU / (eta + alpha_minus)
    mu_plus = TAU / (eta + alpha_plus)
    return mu_minus * (1 + mu_minus) ** (eta - 1), mu_plus * (1 + mu_plus) ** (eta + 1)


def optimal_beta_continuous(eta: int, sigma: float) -> float:
    """Throughput-optimal real sensing range for the infinite line."""
    _check_eta(eta)
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    sigma_min, sigma_max = _threshold_pair(int(eta))
    if sigma <= sigma_min:
        return float(eta - 1)
    if sigma >= sigma_max:
        return float(eta + 1)
    beta = optimize.bisect(lambda b: big_f(b, eta, sigma) - 1.0, eta - 1, eta + 1, xtol=BETA_XTOL, maxiter=200)
    check_local_maximum(beta, eta, sigma)
    return beta


def check_local_maximum(beta: float, eta: float, sigma: float, step: float = LOCAL_STEP) -> None:
    """Raise ConsistencyError when a neighbour at distance step beats beta."""
    best = throughput_infinite(beta, eta, sigma).value
    for neighbour in (beta - step, beta + step):
        if neighbour < 0:
            continue
        value = throughput_infinite(neighbour, eta, sigma).value
        if value > best * (1.0 + LOCAL_RTOL):
            raise ConsistencyError(f"beta={beta:.10g} is not a local maximum of the throughput at eta={eta}, "
                                   f"sigma={sigma:.10g}: beta={neighbour:.10g} gives {value} > {best}")


def optimal_beta_finite(n: int, eta: int, sigma: float, beta_max: int | None = None) -> int:
    """Integer argmax of the finite-network throughput, ties going to the smaller beta."""
    limit = n - eta - 1
    if beta_max is None:
        beta_max = limit
    if beta_max > limit or beta_max < 0:
        raise DomainError(f"beta_max must lie in 0..{limit} for n={n}, eta={eta}, got {beta_max}")
    best_beta, best_value = 0, -math.inf
    for beta in range(beta_max + 1):
        value = throughput_finite(ModelParams(beta=beta, eta=eta, sigma=sigma, n=n)).value
        if value > best_value:
            best_beta, best_value = beta, value
    return best_beta


def threshold_interval(eta: int, samples: int = 21) -> ThresholdResult:
    """sigma_min = sigma(eta-1), sigma_max = sigma(eta+1), their bounds and approximations.

    beta* is sampled on an even grid spanning the interval plus a small margin.
    """
    _check_eta(eta)
    eta = int(eta)
    sigma_min, sigma_max = _threshold_pair(eta)
    bound_low, bound_high = analytic_bounds(eta)
    approx_min, approx_max = approximate_thresholds(eta)
    margin = 0.05 * (sigma_max - sigma_min)
    grid = np.linspace(sigma_min - margin, sigma_max + margin, samples)
    beta_star = tuple((float(s), optimal_beta_continuous(eta, float(s))) for s in grid)
    LOG.debug("eta=%d threshold interval [%.10g, %.10g]", eta, sigma_min, sigma_max)
    return ThresholdResult(eta=eta, sigma_min=sigma_min, sigma_max=sigma_max,
                           bound_low=bound_low, bound_high=bound_high,
                           approx_min=approx_min, approx_max=approx_max,
                           beta_star_samples=beta_star)


def width_constant() -> float:
    """Limit of (sigma_max - sigma_min) (eta+1)**2."""
    return 2.0 * math.exp(TAU) / (7.0 + 4.0 * TAU)


def width_asymptotic(eta: int) -> float:
    return width_constant() / (eta + 1) ** 2


def max_throughput(eta: int, sigma: float) -> tuple[float, float]:
    """(beta*, theta(beta*)) on the infinite line."""
    beta = optimal_beta_continuous(eta, sigma)
    return beta, throughput_infinite(beta, eta, sigma).value


def threshold_sweep(eta: int, sigmas, n: int) -> list[tuple]:
    """Rows of SWEEP_HEADER, one per sigma."""
    result = threshold_interval(eta, samples=2)
    rows = []
    for sigma in sigmas:
        sigma = float(sigma)
        rows.append((eta, sigma, optimal_beta_continuous(eta, sigma), optimal_beta_finite(n, eta, sigma), n,
                     result.sigma_min, result.sigma_max, result.bound_low, result.bound_high,
                     result.approx_min, result.approx_max))
    return rows
