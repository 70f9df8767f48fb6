"""Riemann zeta, prime zeta and related constants for real arguments.

Two independent routes to the prime zeta function are provided:

* :func:`prime_zeta` uses the Moebius-weighted logarithm of ``zeta(ns)``;
* :func:`prime_zeta_direct` sums ``p**-s`` over sieved primes and closes the
  remaining tail with the Riemann ``R`` function as a smooth model of the
  prime counting function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import exp1

from .exceptions import DomainError
from .primes import cached_primes, mobius

EPS = float(np.finfo(float).eps)

# B_2, B_4, B_6, B_8 divided by (2j)!
_BERNOULLI_OVER_FACT = (
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
)
_EM_TERMS = 10_000
_LOG_ZETA_CUTOFF = 64.0
_MIN_S = 1.0 + 1e-6


def _check_s(s: float) -> float:
    s = float(s)
    if not s > _MIN_S:
        raise DomainError(f"s must exceed 1 (got {s})")
    return s


@lru_cache(maxsize=4096)
def zeta_minus_one(s: float, terms: int = _EM_TERMS) -> float:
    """``zeta(s) - 1`` by Euler-Maclaurin summation.

    Computing the offset from one keeps full relative precision when ``s`` is
    large and ``zeta(s)`` is indistinguishable from 1 in double precision.
    """
    s = _check_s(s)
    if s > 40.0:
        # 2^-s dominates; a handful of terms is exact to rounding
        terms = 64
    n = np.arange(2, terms, dtype=float)
    head = math.fsum(np.power(n, -s).tolist())
    N = float(terms)
    corr = [N ** (1.0 - s) / (s - 1.0), 0.5 * N**-s]
    rising = s
    power = N ** (-s - 1.0)
    for j, coef in enumerate(_BERNOULLI_OVER_FACT):
        corr.append(coef * rising * power)
        rising *= (s + 2 * j + 1) * (s + 2 * j + 2)
        power /= N * N
    return math.fsum([head, *corr])


def riemann_zeta(s: float) -> float:
    return 1.0 + zeta_minus_one(s)


def log_zeta(s: float) -> float:
    return math.log1p(zeta_minus_one(s))


@lru_cache(maxsize=None)
def _mu(n: int) -> int:
    return mobius(n)


def _log_zeta_terms(s: float) -> list[float]:
    terms = []
    n = 1
    while n * s <= _LOG_ZETA_CUTOFF or n == 1:
        mu = _mu(n)
        if mu:
            terms.append(mu * log_zeta(n * s) / n)
        n += 1
    return terms


@lru_cache(maxsize=4096)
def prime_zeta(s: float) -> float:
    """Prime zeta ``P(s) = sum_p p**-s`` from ``sum_n mu(n)/n log zeta(ns)``."""
    s = _check_s(s)
    return math.fsum(_log_zeta_terms(s))


def prime_zeta_bound(s: float) -> float:
    """Error bound for :func:`prime_zeta`: rounding plus the dropped terms."""
    s = _check_s(s)
    terms = _log_zeta_terms(s)
    n_stop = len(terms) + 1
    dropped = 2.0 ** (-s * max(n_stop, _LOG_ZETA_CUTOFF / s))
    return 8 * EPS * math.fsum(abs(t) for t in terms) + dropped


@lru_cache(maxsize=4096)
def riemann_r(x: float) -> float:
    """Riemann's ``R(x)`` via the Gram series."""
    if x < 1.0:
        raise DomainError("x must be >= 1")
    lx = math.log(x)
    total = [1.0]
    power = 1.0
    k = 1
    while True:
        power *= lx / k
        term = power / (k * riemann_zeta(k + 1.0))
        total.append(term)
        if k > lx and term < 1e-18 * total[0] + 1e-17 * sum(total[-3:]):
            break
        k += 1
    return math.fsum(total)


def _smooth_prime_tail(s: float, limit: int) -> float:
    """``integral_limit^inf x**-s dR(x)`` written as a sum of E1 values."""
    lx = math.log(limit)
    out = []
    for n in range(1, 65):
        mu = _mu(n)
        if mu:
            out.append(mu / n * float(exp1((s - 1.0 / n) * lx)))
    return math.fsum(out)


def direct_limit(s: float) -> int:
    """Sieve bound used by the direct route; slow convergence needs more primes."""
    return 10**8 if s < 3.0 else 10**6


def _beyond(s: float, limit: int, count: int) -> tuple[float, float]:
    """Sum of ``p**-s`` over primes above ``limit`` and its error bound.

    ``count`` is the exact value of ``pi(limit)``; the discrepancy with
    ``R(limit)`` enters as a boundary correction.
    """
    gap = count - riemann_r(limit)
    value = _smooth_prime_tail(s, limit) - gap * float(limit) ** -s
    wobble = max(abs(gap), math.sqrt(limit) / math.log(limit))
    return max(value, 0.0), 2.0 * wobble * float(limit) ** -s


def prime_zeta_direct(s: float, limit: int | None = None) -> tuple[float, float]:
    """``P(s)`` by explicit summation over primes; returns ``(value, bound)``."""
    s = _check_s(s)
    limit = direct_limit(s) if limit is None else int(limit)
    primes = cached_primes(limit)
    head = math.fsum(np.power(primes.astype(float), -s).tolist())
    tail, bound = _beyond(s, limit, len(primes))
    value = math.fsum([head, tail])
    return value, bound + 4 * EPS * value


@lru_cache(maxsize=4096)
def prime_zeta_tail(s: float, p0: int) -> float:
    """``P(s)`` minus the contribution of primes ``p <= p0``."""
    s = _check_s(s)
    p0 = int(p0)
    if p0 < 0:
        raise DomainError("p0 must be >= 0")
    if p0 < 2:
        return prime_zeta(s)
    if s < 3.0:
        primes = cached_primes(max(p0, 1000))
        head = primes[: np.searchsorted(primes, p0, side="right")]
        value = math.fsum([prime_zeta(s), *(-np.power(head.astype(float), -s)).tolist()])
        return max(value, 0.0)
    limit = max(10**6, 2 * p0 + 100)
    primes = cached_primes(limit)
    window = primes[np.searchsorted(primes, p0, side="right") :]
    body = math.fsum(np.power(window.astype(float), -s).tolist())
    tail, _ = _beyond(s, limit, len(primes))
    return math.fsum([body, tail])


def prime_zeta_tail_bound(s: float, p0: int) -> float:
    """A loose but safe error bound matching :func:`prime_zeta_tail`."""
    if p0 < 2 or s < 3.0:
        return prime_zeta_bound(s) + 4 * EPS * prime_zeta(s)
    limit = max(10**6, 2 * p0 + 100)
    wobble = math.sqrt(limit) / math.log(limit) + 1e3
    return 2.0 * wobble * float(limit) ** -s + 4 * EPS * prime_zeta_tail(s, p0)


@dataclass(frozen=True)
class PrimeZetaTable:
    k_max: int
    values: tuple[float, ...]
    error_bounds: tuple[float, ...]
    tail_cutoff: int = 0

    def __getitem__(self, k: int) -> float:
        if not 2 <= k <= self.k_max:
            raise KeyError(k)
        return self.values[k - 2]

    def bound(self, k: int) -> float:
        return self.error_bounds[k - 2]


def prime_zeta_table(k_max: int, tail_cutoff: int = 0) -> PrimeZetaTable:
    """``P(k)`` (or its tail beyond ``tail_cutoff``) for ``k = 2..k_max``."""
    if k_max < 2:
        raise DomainError("k_max must be >= 2")
    ks = range(2, k_max + 1)
    values = tuple(prime_zeta_tail(k, tail_cutoff) for k in ks)
    bounds = tuple(prime_zeta_tail_bound(k, tail_cutoff) for k in ks)
    return PrimeZetaTable(k_max, values, bounds, tail_cutoff)


def euler_gamma(terms: int = 10_000) -> float:
    """Euler-Mascheroni constant from the harmonic numbers.

    ``H_N - ln N - 1/(2N) + 1/(12N^2) - 1/(120N^4) + 1/(252N^6)``; at the
    default ``N`` the omitted correction is far below double precision.
    """
    N = float(terms)
    h = math.fsum((1.0 / np.arange(1, terms + 1, dtype=float)).tolist())
    return math.fsum(
        [h, -math.log(N), -0.5 / N, 1.0 / (12 * N**2), -1.0 / (120 * N**4), 1.0 / (252 * N**6)]
    )
