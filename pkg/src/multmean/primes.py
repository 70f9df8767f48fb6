"""Prime generation, smallest-prime-factor tables and factorization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DomainError, ResourceError

SPF_MAX_LIMIT = 2**32 - 1
SIEVE_MAX_LIMIT = 10**11
_SEGMENT = 1 << 22


@dataclass(frozen=True)
class PrimeList:
    limit: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes.tolist())


@dataclass(frozen=True)
class SpfTable:
    """Smallest prime factor of every integer in ``[2, limit]``.

    ``spf[m]`` is stored as uint32; entries 0 and 1 are zero.
    """

    limit: int
    spf: np.ndarray

    def __getitem__(self, m: int) -> int:
        if m < 2 or m > self.limit:
            raise DomainError(f"{m} outside [2, {self.limit}]")
        return int(self.spf[m])


@dataclass(frozen=True)
class Factorization:
    m: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        return math.prod(p**a for p, a in self.factors)


def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def primes_in_range(low: int, high: int, base: np.ndarray | None = None) -> np.ndarray:
    """Primes in the half-open range ``[low, high)`` by a segmented sieve."""
    low = max(low, 2)
    if high <= low:
        return np.empty(0, dtype=np.int64)
    if base is None:
        base = _small_sieve(math.isqrt(high - 1))
    chunks = []
    start = low
    while start < high:
        stop = min(start + _SEGMENT, high)
        mask = np.ones(stop - start, dtype=bool)
        for p in base.tolist():
            pp = p * p
            if pp >= stop:
                break
            first = max(pp, -(-start // p) * p)
            mask[first - start :: p] = False
        chunks.append(np.flatnonzero(mask) + start)
        start = stop
    return np.concatenate(chunks).astype(np.int64)


def sieve_primes(limit: int) -> PrimeList:
    """All primes ``<= limit``, ascending.

    Small limits use a plain sieve; larger ones are sieved segment by
    segment over odd and even numbers alike so memory stays bounded by the
    segment size plus the output.
    """
    limit = int(limit)
    if limit < 0:
        raise DomainError("limit must be >= 0")
    if limit > SIEVE_MAX_LIMIT:
        raise ResourceError(f"refusing to sieve to {limit}")
    if limit <= _SEGMENT:
        primes = _small_sieve(limit)
    else:
        base = _small_sieve(math.isqrt(limit))
        try:
            primes = primes_in_range(2, limit + 1, base)
        except MemoryError as exc:  # pragma: no cover
            raise ResourceError(str(exc)) from exc
    primes.setflags(write=False)
    return PrimeList(limit, primes)


@lru_cache(maxsize=8)
def cached_primes(limit: int) -> np.ndarray:
    """Shared, read-only prime array; used by the numeric modules."""
    return sieve_primes(limit).primes


def spf_table(limit: int) -> SpfTable:
    limit = int(limit)
    if limit < 2:
        raise DomainError("limit must be >= 2")
    if limit > SPF_MAX_LIMIT:
        raise ResourceError(f"spf table limited to {SPF_MAX_LIMIT}")
    try:
        spf = np.zeros(limit + 1, dtype=np.uint32)
    except MemoryError as exc:  # pragma: no cover
        raise ResourceError(str(exc)) from exc
    for p in _small_sieve(math.isqrt(limit)).tolist():
        view = spf[p * p :: p]
        view[view == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    spf.setflags(write=False)
    return SpfTable(limit, spf)


def factorize(m: int, table: SpfTable) -> Factorization:
    m = int(m)
    if m < 1 or m > table.limit:
        raise DomainError(f"cannot factorize {m} with table limit {table.limit}")
    factors = []
    r = m
    spf = table.spf
    while r > 1:
        p = int(spf[r])
        a = 0
        while r % p == 0:
            r //= p
            a += 1
        factors.append((p, a))
    return Factorization(m, tuple(factors))


def trial_factorize(m: int) -> Factorization:
    """Factorization by trial division, independent of any table."""
    if m < 1:
        raise DomainError("m must be >= 1")
    factors = []
    r = m
    d = 2
    while d * d <= r:
        if r % d == 0:
            a = 0
            while r % d == 0:
                r //= d
                a += 1
            factors.append((d, a))
        d += 1 if d == 2 else 2
    if r > 1:
        factors.append((r, 1))
    return Factorization(m, tuple(factors))


def mobius(n: int) -> int:
    f = trial_factorize(n)
    if any(a > 1 for _, a in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1
