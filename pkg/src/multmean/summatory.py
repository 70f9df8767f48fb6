"""Exact summatory functions ``S(x) = sum_{m<=x} g(m)`` by blocked sieving.

Every block ``[low, high)`` is factored in place: the primes up to
``sqrt(n)`` are divided out one at a time, and whatever cofactor survives
is a single large prime.  Values in ``{-1, 0, 1}`` are summed as integers;
real values are summed exactly (as a short list of non-overlapping floats)
so the reported totals do not depend on the block size or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .exceptions import DomainError, ResourceError
from .functions import MultiplicativeSpec, lookup
from .primes import cached_primes

MAX_N_BLOCKED = 10**9
MAX_N_IN_MEMORY = 10**8
DEFAULT_BLOCK = 1 << 20


@dataclass
class SummatoryReport:
    x: int
    S: float | int
    ratio: float
    predicted_mean: Optional[float] = None
    residual: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _check_checkpoints(n: int, checkpoints: Iterable[int] | None) -> list[int]:
    if checkpoints is None:
        return [n]
    cps = [int(x) for x in checkpoints]
    if not cps:
        raise DomainError("at least one checkpoint is required")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise DomainError("checkpoints must be strictly ascending")
    if cps[0] < 1 or cps[-1] > n:
        raise DomainError(f"checkpoints must lie in [1, {n}]")
    return cps


def block_values(spec: MultiplicativeSpec, low: int, high: int, base: np.ndarray | None = None) -> np.ndarray:
    """``g(m)`` for ``m`` in ``[low, high)``; ``base`` must hold all primes ``<= sqrt(high - 1)``."""
    if low < 1:
        raise DomainError("blocks start at 1")
    if base is None:
        base = cached_primes(max(math.isqrt(high - 1), 2))
    try:
        rem = np.arange(low, high, dtype=np.int64)
        vals = np.ones(high - low, dtype=np.int8 if spec.integer_valued else float)
    except MemoryError as exc:  # pragma: no cover
        raise ResourceError(f"cannot allocate block of {high - low}") from exc
    for p in base.tolist():
        if p * p >= high:
            break
        first = (-low) % p
        if first >= len(rem):
            continue
        sub = rem[first::p] // p
        alpha = np.ones(len(sub), dtype=np.int64)
        idx = np.flatnonzero(sub % p == 0)
        while idx.size:
            alpha[idx] += 1
            sub[idx] //= p
            idx = idx[sub[idx] % p == 0]
        rem[first::p] = sub
        g = spec.g(p, alpha)
        if spec.integer_valued:
            vals[first::p] *= np.asarray(g).astype(np.int8)
        else:
            vals[first::p] *= g
    big = np.flatnonzero(rem > 1)
    if big.size:
        g = spec.g(rem[big].astype(float), 1)
        if spec.integer_valued:
            vals[big] *= np.asarray(g).astype(np.int8)
        else:
            vals[big] *= g
    return vals


def _exact_parts(values: list[float]) -> list[float]:
    """Non-overlapping floats whose exact sum equals ``sum(values)``."""
    parts: list[float] = []
    while True:
        s = math.fsum(values + [-q for q in parts])
        if s == 0.0:
            return parts
        parts.append(s)


def _block_job(spec, low, high, base, offsets):
    vals = block_values(spec, low, high, base)
    if spec.integer_valued:
        csum = np.cumsum(vals, dtype=np.int64)
        total = int(csum[-1])
        prefixes = [int(csum[o - 1]) for o in offsets]
        return total, prefixes
    as_list = vals.tolist()
    return _exact_parts(as_list), [_exact_parts(as_list[:o]) for o in offsets]


def summatory(
    spec: MultiplicativeSpec | str,
    n: int,
    checkpoints: Sequence[int] | None = None,
    *,
    block_size: int = DEFAULT_BLOCK,
    threads: int = 1,
    predicted_mean: float | None = None,
) -> list[SummatoryReport]:
    """Reports at each checkpoint, in ascending order, from a single pass."""
    if isinstance(spec, str):
        spec = lookup(spec)
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    limit = MAX_N_BLOCKED if block_size < n else MAX_N_IN_MEMORY
    if n > limit:
        raise ResourceError(f"n = {n} exceeds the oracle limit {limit}")
    cps = _check_checkpoints(n, checkpoints)
    base = cached_primes(max(math.isqrt(n), 2))

    blocks = []
    for low in range(1, n + 1, block_size):
        high = min(low + block_size, n + 1)
        offsets = [x - low + 1 for x in cps if low <= x < high]
        blocks.append((low, high, offsets))

    totals = []
    acc_int = 0
    acc_parts: list[float] = []
    reports = []
    scale = spec.bound

    def emit(x, s):
        if spec.integer_valued and scale == 1.0:
            S = int(s)
        else:
            S = float(s) * scale
        ratio = S / x
        residual = None if predicted_mean is None else ratio - predicted_mean
        reports.append(SummatoryReport(x, S, ratio, predicted_mean, residual))

    step = max(int(threads), 1)
    with ThreadPoolExecutor(max_workers=step) as pool:
        for start in range(0, len(blocks), step):
            batch = blocks[start : start + step]
            jobs = [pool.submit(_block_job, spec, lo, hi, base, offs) for lo, hi, offs in batch]
            for (lo, hi, offs), job in zip(batch, jobs):
                total, prefixes = job.result()
                for off, pre in zip(offs, prefixes):
                    if spec.integer_valued:
                        emit(lo + off - 1, acc_int + pre)
                    else:
                        emit(lo + off - 1, math.fsum(acc_parts + pre))
                if spec.integer_valued:
                    acc_int += total
                else:
                    acc_parts.extend(total)
                totals.append(total)
    return reports


def squarefree_census(n: int, block_size: int = DEFAULT_BLOCK) -> tuple[int, int]:
    """``(Q(n), n - Q(n))``: squarefree and non-squarefree counts up to ``n``.

    Independent of :func:`summatory`: it only strikes out multiples of
    ``p^2``.
    """
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > MAX_N_BLOCKED:
        raise ResourceError(f"n = {n} exceeds {MAX_N_BLOCKED}")
    squares = [p * p for p in cached_primes(max(math.isqrt(n), 2)).tolist() if p * p <= n]
    q = 0
    for low in range(1, n + 1, block_size):
        high = min(low + block_size, n + 1)
        free = np.ones(high - low, dtype=bool)
        for sq in squares:
            if sq >= high:
                break
            free[(-low) % sq :: sq] = False
        q += int(np.count_nonzero(free))
    return q, n - q


def compare(
    spec: MultiplicativeSpec | str,
    n: int,
    checkpoints: Sequence[int] | None = None,
    *,
    block_size: int = DEFAULT_BLOCK,
    threads: int = 1,
    **mean_kwargs,
) -> list[SummatoryReport]:
    """Summatory reports with the predicted mean value and the residual."""
    from .mean_value import mean_value

    if isinstance(spec, str):
        spec = lookup(spec)
    predicted = mean_value(spec, **mean_kwargs).value
    return summatory(spec, n, checkpoints, block_size=block_size, threads=threads, predicted_mean=predicted)
