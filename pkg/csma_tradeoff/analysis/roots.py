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

"""Roots of lambda**(beta+1) - lambda**beta - sigma = 0.

The dominant root lambda_0 drives every infinite network formula. The full
root set is seeded from the two Lagrange inversion series (one converging for
sigma <= xi(beta), the other for sigma >= xi(beta)) and polished with damped
Newton steps.
"""

import cmath
from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy import optimize, special

from csma_tradeoff.common.exceptions import DomainError, RootFindingError

LOG = logging.getLogger(__name__)

SERIES_TOL = 1e-14
SERIES_MAX_TERMS = 100_000
RESIDUAL_TOL = 1e-10
DISTINCT_TOL = 1e-8
DOMINANT_TOL = 1e-13

METHODS = ('series_small', 'series_large', 'newton', 'polish')


@dataclass(frozen=True)
class RootSet:
    beta: int
    sigma: float
    roots: tuple[complex, ...]
    residues: tuple[complex, ...]
    method: str

    @property
    def dominant(self) -> float:
        return self.roots[0].real


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    converged: bool
    terms: int


def convergence_radius(beta: float) -> float:
    """xi(beta) = beta**beta / (beta+1)**(beta+1), with xi(0) = 1."""
    if beta < 0:
        raise DomainError(f"beta must be non-negative, got {beta}")
    if beta == 0:
        return 1.0
    return math.exp(beta * math.log(beta) - (beta + 1) * math.log(beta + 1))


def _pochhammer_log_array(x: np.ndarray, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=np.int64)
    x, k = np.broadcast_arrays(x, k)
    sign = np.ones(x.shape)
    log_abs = np.zeros(x.shape)
    integer = (x <= 0) & (x == np.round(x))
    regular = ~integer & (k > 0)
    if regular.any():
        xr, kr = x[regular], k[regular]
        sign[regular] = special.gammasgn(xr + kr) * special.gammasgn(xr)
        log_abs[regular] = special.gammaln(xr + kr) - special.gammaln(xr)
    if integer.any():
        # x (x+1) ... (x+k-1) over integers vanishes once the product reaches 0.
        m = -x[integer]
        ki = k[integer]
        vanishes = ki > m
        sign[integer] = np.where(vanishes, 0.0, np.where(ki % 2 == 1, -1.0, 1.0))
        log_abs[integer] = np.where(
            vanishes, -np.inf, special.gammaln(m + 1) - special.gammaln(np.maximum(m - ki, 0) + 1))
    return sign, log_abs


def pochhammer_log(x: float, k: int) -> tuple[int, float]:
    """Sign and log magnitude of the rising factorial (x)_k = Gamma(x+k)/Gamma(x).

    A sign of 0 means (x)_k == 0.
    """
    sign, log_abs = _pochhammer_log_array(np.array([x]), np.array([k]))
    return int(sign[0]), float(log_abs[0])


def _sum_series(coefficients, z: complex, tol: float, max_terms: int, block: int = 4096) -> SeriesValue:
    """Sum c_l z**l over l >= 1; coefficients(ls) returns (sign, log|c_l|) arrays."""
    log_abs_z = math.log(abs(z))
    phase = cmath.phase(z)
    total = 0j
    start = 1
    while start <= max_terms:
        ls = np.arange(start, min(start + block, max_terms + 1))
        signs, log_c = coefficients(ls)
        nonzero = signs != 0
        with np.errstate(under='ignore'):
            magnitude = np.where(nonzero, np.exp(np.where(nonzero, log_c, 0.0) + ls * log_abs_z), 0.0)
        terms = signs * magnitude * np.exp(1j * ls * phase)
        partial = total + np.cumsum(terms)
        small = nonzero & (np.abs(terms) < tol * np.abs(partial))
        if small.any():
            stop = int(np.argmax(small))
            return SeriesValue(complex(partial[stop]), True, int(ls[stop]))
        total = complex(partial[-1])
        start += block
    LOG.debug("Series truncated after %d terms without converging", max_terms)
    return SeriesValue(total, False, max_terms)


def _within(sigma: float, limit: float) -> bool:
    return sigma <= limit * (1 + 1e-12)


def series_small_sigma(beta: int, sigma: float, j: int,
                       tol: float = SERIES_TOL, max_terms: int = SERIES_MAX_TERMS) -> SeriesValue:
    """Root lambda_j from the series in powers of sigma (j = 0) or w_j (j >= 1)."""
    if j < 0 or j > beta or (j >= 1 and beta < 1):
        raise DomainError(f"Root index {j} is not valid for beta={beta}")
    if sigma < 0:
        raise DomainError(f"sigma must be non-negative, got {sigma}")
    if not _within(sigma, convergence_radius(beta)):
        raise DomainError(f"Small-sigma series diverges for sigma={sigma} > xi({beta})")
    if j == 0:
        if sigma == 0 or beta == 0:
            return SeriesValue(complex(1.0 + sigma), True, 1)

        def coefficients(ls):
            sign, log_poch = _pochhammer_log_array(beta * ls, ls - 1)
            return np.where(ls % 2 == 0, -sign, sign), log_poch - special.gammaln(ls + 1)

        series = _sum_series(coefficients, complex(sigma), tol, max_terms)
        return SeriesValue(1.0 + series.value, series.converged, series.terms)

    if sigma == 0:
        return SeriesValue(0j, True, 0)
    w = sigma ** (1.0 / beta) * cmath.exp(2j * math.pi * (j - 0.5) / beta)

    def coefficients(ls):
        sign, log_poch = _pochhammer_log_array(ls / beta, ls - 1)
        return sign, log_poch - special.gammaln(ls + 1)

    return _sum_series(coefficients, w, tol, max_terms)


def series_large_sigma(beta: int, sigma: float, j: int,
                       tol: float = SERIES_TOL, max_terms: int = SERIES_MAX_TERMS) -> SeriesValue:
    """Root lambda_j as the reciprocal of the series in powers of 1/v_j."""
    if j < 0 or j > beta:
        raise DomainError(f"Root index {j} is not valid for beta={beta}")
    if sigma <= 0 or not _within(convergence_radius(beta), sigma):
        raise DomainError(f"Large-sigma series diverges for sigma={sigma} < xi({beta})")
    v_inverse = sigma ** (-1.0 / (beta + 1)) * cmath.exp(-2j * math.pi * j / (beta + 1))

    def coefficients(ls):
        sign, log_poch = _pochhammer_log_array(-ls / (beta + 1), ls - 1)
        return sign, log_poch - special.gammaln(ls + 1)

    series = _sum_series(coefficients, v_inverse, tol, max_terms)
    return SeriesValue(1.0 / series.value, series.converged, series.terms)


def dominant_mu(beta: float, sigma: float) -> float:
    """mu_0 = lambda_0 - 1, the unique positive solution of mu (1+mu)**beta = sigma.

    beta may be any non-negative real. The equation is solved for t = log mu
    (bracketed, then Newton-polished) so that large beta cannot overflow.
    """
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if beta < 0:
        raise DomainError(f"beta must be non-negative, got {beta}")
    if beta == 0:
        return float(sigma)
    log_sigma = math.log(sigma)

    def residual(t):
        return t + beta * math.log1p(math.exp(t)) - log_sigma

    # mu <= sigma and mu >= sigma / (1+sigma)**beta
    upper = log_sigma
    lower = log_sigma - beta * math.log1p(sigma)
    if residual(lower) >= 0:
        t = lower
    else:
        t = optimize.brentq(residual, lower, upper, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(3):
        mu = math.exp(t)
        step = residual(t) / (1.0 + beta * mu / (1.0 + mu))
        t -= step
        if abs(step) < 1e-16:
            break
    if abs(residual(t)) > DOMINANT_TOL:
        raise RootFindingError(f"Dominant root did not converge for beta={beta}, sigma={sigma}")
    return math.exp(t)


def dominant_root(beta: float, sigma: float) -> float:
    """Unique positive real root lambda_0 = 1 + mu_0; it exceeds every other root in modulus."""
    return 1.0 + dominant_mu(beta, sigma)


def characteristic(lam: complex, beta: int, sigma: float) -> complex:
    return lam ** beta * (lam - 1) - sigma


def _newton_polish(lam: complex, beta: int, sigma: float, max_iter: int = 200) -> complex:
    """Damped Newton iteration on lambda**beta (lambda - 1) - sigma."""
    value = characteristic(lam, beta, sigma)
    for _ in range(max_iter):
        derivative = lam ** (beta - 1) * ((beta + 1) * lam - beta) if beta else 1.0
        if derivative == 0:
            lam += 1e-8
            value = characteristic(lam, beta, sigma)
            continue
        step = value / derivative
        damping = 1.0
        while True:
            candidate = lam - damping * step
            candidate_value = characteristic(candidate, beta, sigma)
            if abs(candidate_value) < abs(value) or damping < 1e-6:
                break
            damping /= 2
        lam, value = candidate, candidate_value
        if abs(damping * step) <= 1e-15 * max(1.0, abs(lam)):
            break
    return lam


def _initial_guesses(beta: int, sigma: float) -> tuple[list[complex], str, bool]:
    xi = convergence_radius(beta)
    if sigma <= xi:
        guesses = [series_small_sigma(beta, sigma, j) for j in range(beta + 1)]
        tag = 'series_small'
    else:
        guesses = [series_large_sigma(beta, sigma, j) for j in range(beta + 1)]
        tag = 'series_large'
    return [g.value for g in guesses], tag, all(g.converged for g in guesses)


def _companion_guesses(beta: int, sigma: float) -> list[complex]:
    coefficients = np.zeros(beta + 2)
    coefficients[0] = 1.0
    coefficients[1] = -1.0
    coefficients[-1] = -sigma
    return [complex(z) for z in np.roots(coefficients)]


def _collides(roots: list[complex]) -> bool:
    return any(abs(a - b) < DISTINCT_TOL for i, a in enumerate(roots) for b in roots[i + 1:])


def _order(roots: list[complex]) -> list[complex]:
    """Dominant (largest real) root first; the others keep their series order."""
    first = max(range(len(roots)), key=lambda k: (roots[k].real if abs(roots[k].imag) < 1e-9 else -math.inf))
    dominant = complex(roots[first].real, 0.0)
    return [dominant] + [r for k, r in enumerate(roots) if k != first]


def vieta_check(root_set: RootSet, tol: float = 1e-9) -> None:
    """Sum of roots is 1 and their product is (-1)**beta * sigma.

    For beta = 0 the single root is 1 + sigma.
    """
    roots = np.array(root_set.roots)
    if root_set.beta == 0:
        expected_sum = expected = 1.0 + root_set.sigma
    else:
        expected_sum, expected = 1.0, (-1) ** root_set.beta * root_set.sigma
    total = roots.sum()
    scale = max(1.0, float(np.abs(roots).max()))
    if abs(total - expected_sum) > tol * scale:
        raise RootFindingError(f"Root sum {total} differs from {expected_sum}")
    product = np.prod(roots)
    if abs(product - expected) > tol * max(1.0, abs(expected)):
        raise RootFindingError(f"Root product {product} differs from {expected}")


def _validate(root_set: RootSet) -> None:
    beta, sigma, roots = root_set.beta, root_set.sigma, root_set.roots
    for lam in roots:
        if abs(characteristic(lam, beta, sigma)) > RESIDUAL_TOL * (1 + sigma):
            raise RootFindingError(f"Root {lam} has residual above tolerance")
    lam0 = roots[0]
    if abs(lam0.imag) > 1e-12 or lam0.real <= 1:
        raise RootFindingError(f"Dominant root {lam0} is not real and above 1")
    if any(abs(lam) >= lam0.real for lam in roots[1:]):
        raise RootFindingError("Dominant root does not dominate the others in modulus")
    if _collides(list(roots)):
        raise RootFindingError("Polished roots are not distinct")
    for lam in roots:
        if abs(lam.imag) > 1e-9 and min(abs(lam.conjugate() - other) for other in roots) > 1e-8:
            raise RootFindingError(f"Root {lam} has no conjugate partner")
    vieta_check(root_set)


def all_roots(beta: int, sigma: float) -> RootSet:
    """All beta+1 roots with residues c_j = lambda_j**(beta+1) / ((beta+1) lambda_j - beta)."""
    if int(beta) != beta or beta < 0:
        raise DomainError(f"all_roots needs a non-negative integer beta, got {beta}")
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    beta = int(beta)
    guesses, method, converged = _initial_guesses(beta, sigma)
    polished = [_newton_polish(g, beta, sigma) for g in guesses]
    if not converged:
        method = 'newton'
    elif any(abs(p - g) > 1e-12 * max(1.0, abs(p)) for p, g in zip(polished, guesses)):
        method = 'polish'
    if _collides(polished):
        LOG.debug("Series seeds collided for beta=%s sigma=%s, reseeding from the companion matrix", beta, sigma)
        polished = [_newton_polish(g, beta, sigma) for g in _companion_guesses(beta, sigma)]
        method = 'newton'
        if _collides(polished):
            raise RootFindingError(f"Roots collide after polishing for beta={beta}, sigma={sigma}")

    roots = _order(polished)
    residues = []
    for lam in roots:
        denominator = (beta + 1) * lam - beta
        if abs(denominator) < 1e-12:
            raise RootFindingError(f"Residue denominator vanishes at root {lam}")
        residues.append(lam ** (beta + 1) / denominator)
    root_set = RootSet(beta=beta, sigma=float(sigma), roots=tuple(roots), residues=tuple(residues), method=method)
    _validate(root_set)
    return root_set


def partition_spectral(roots: RootSet, i: int, beta: int | None = None, sigma: float | None = None) -> float:
    """Z_i = sum_j c_j lambda_j**i."""
    if beta is not None and beta != roots.beta or sigma is not None and sigma != roots.sigma:
        raise DomainError(f"Root set for beta={roots.beta}, sigma={roots.sigma} does not match the request")
    if i < 0:
        raise DomainError(f"i must be non-negative, got {i}")
    total = sum(c * lam ** i for c, lam in zip(roots.residues, roots.roots))
    if abs(total.imag) > 1e-9 * abs(total.real):
        raise RootFindingError(f"Spectral sum has imaginary part {total.imag} for i={i}")
    return total.real


def root_portrait(beta: int, sigmas) -> list[tuple]:
    """Rows (beta, sigma, j, re_lambda, im_lambda, method) tracing the roots against sigma."""
    rows = []
    for sigma in sigmas:
        root_set = all_roots(beta, sigma)
        for j, lam in enumerate(root_set.roots):
            rows.append((beta, float(sigma), j, lam.real, lam.imag, root_set.method))
    return rows
