"""Asymptotic mean values ``lim S(n)/n`` of bounded multiplicative functions.

Routes:

* ``product``: Euler product over primes up to a limit;
* ``accelerated``: exact local factors up to a split prime ``P0`` and the
  remaining product as ``exp(-sum_k b_k P_{>P0}(k))``;
* ``strong``: the same pipeline with the strongly multiplicative local
  factor ``1 - (1 - g(p))/p``;
* ``divergent_zero``: the product diverges to zero, so the mean is 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .exceptions import AccelerationInapplicable, DomainError, NumericFailure
from .functions import MultiplicativeSpec
from .primes import PrimeList, cached_primes, sieve_primes
from .series import (
    DEFAULT_ORDER,
    RationalSeries,
    local_factor_to_X,
    series_eval,
    series_neg_log,
    strong_deficiency,
)
from .special import EPS, euler_gamma, prime_zeta_tail, prime_zeta_tail_bound

log = logging.getLogger(__name__)

METHODS = ("product", "accelerated", "strong", "divergent_zero", "indeterminate")
DEFAULT_PRIME_LIMIT = 10**6
DEFAULT_SPLIT = 101
DEFAULT_EPS = 1e-15
WINDOW_DELTA = 1e-6
RATIO_CUTOFF = 0.9
PAPER_TRUNCATION = {"split_p0": 1, "series_order": 5}


@dataclass
class MeanValueResult:
    value: float
    method: str
    convergence_class: str
    error_bound: Optional[float]
    c_constant: Optional[float] = None
    prime_limit: Optional[int] = None
    series_order: Optional[int] = None
    split_p0: Optional[int] = None
    multiplier: float = 1.0
    warnings: list[str] = field(default_factory=list)

    @property
    def truncation_params(self) -> dict:
        return {
            "prime_limit": self.prime_limit,
            "series_order": self.series_order,
            "split_p0": self.split_p0,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("prime_limit", "series_order", "split_p0"):
            d.pop(k)
        d["truncation_params"] = self.truncation_params
        return d


def _deficiencies(spec: MultiplicativeSpec, primes: np.ndarray, eps: float, strong: bool = False) -> np.ndarray:
    """``X_p = 1 - local factor`` for every prime in ``primes``.

    Uses ``X_p = sum_a (g(p^{a-1}) - g(p^a)) p^-a`` so that ``X_p`` keeps its
    relative precision when the local factor is close to 1.
    """
    p = primes.astype(float)
    t = 1.0 / p
    if strong:
        return (1.0 - spec.g(p, 1)) * t
    X = np.zeros_like(t)
    prev = np.ones_like(t)
    power = np.ones_like(t)
    active = np.arange(len(t))
    alpha = 1
    while active.size:
        power = power * t[active] if power.size == active.size else power
        g = spec.g(p[active], alpha)
        X[active] += (prev - g) * power
        keep = power * t[active] / (1.0 - t[active]) >= eps
        active, prev, power = active[keep], g[keep], power[keep]
        alpha += 1
    return X


def local_factor(spec: MultiplicativeSpec, p: int, eps: float = DEFAULT_EPS) -> float:
    """``(1 - 1/p) * sum_a g(p^a) p^-a``, with the exponent sum truncated at ``eps``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    return 1.0 - float(_deficiencies(spec, np.array([p]), eps)[0])


def _log_product(X: np.ndarray) -> float:
    """``prod (1 - X)`` accumulated through logarithms."""
    L = 1.0 - X
    if np.any(L == 0.0):
        return 0.0
    sign = -1.0 if np.count_nonzero(L < 0) % 2 else 1.0
    small = np.abs(X) < 0.5
    logs = np.where(small, np.log1p(-np.where(small, X, 0.0)), np.log(np.abs(L)))
    return sign * math.exp(math.fsum(logs.tolist()))


def _series_for(spec: MultiplicativeSpec, order: int, strong: bool) -> RationalSeries:
    if spec.series_rule is None:
        raise AccelerationInapplicable(f"{spec.name} has no series rule")
    if strong:
        return strong_deficiency(spec.series_rule, order)
    return local_factor_to_X(spec.series_rule, order)


def classify_convergence(spec: MultiplicativeSpec, primes: PrimeList | None = None) -> str:
    """Whether ``sum_p (1 - g(p))/p`` converges.

    Declared classes win; a series rule decides by its ``t`` coefficient;
    otherwise partial sums at 10^3, 10^4, 10^5 are compared with
    ``log log`` growth.
    """
    if spec.declared_class != "auto":
        return spec.declared_class
    if spec.series_rule is not None:
        X = local_factor_to_X(spec.series_rule, 4)
        return "divergent" if X[1] != 0 else "convergent"
    if primes is None:
        primes = sieve_primes(10**5)
    if primes.limit < 10**4:
        raise DomainError("classification needs primes up to at least 10^4")
    ps = primes.primes
    terms = (1.0 - spec.g(ps.astype(float), 1)) / ps
    cuts = [10**3, 10**4, min(10**5, primes.limit)]
    partial = [math.fsum(terms[: np.searchsorted(ps, c, side="right")].tolist()) for c in cuts]
    d1, d2 = partial[1] - partial[0], partial[2] - partial[1]
    loglog = [math.log(math.log(c)) for c in cuts]
    a1 = d1 / (loglog[1] - loglog[0])
    a2 = d2 / (loglog[2] - loglog[1])
    if d1 < 1e-3 and d2 < 1e-3 and d2 <= d1:
        return "convergent"
    if a2 > 0.05 and 0.7 <= a2 / a1 <= 1.4:
        return "divergent"
    return "indeterminate"


def _series_tail_bound(b: RationalSeries, limit: int) -> float:
    """``sum_k |b_k| P_{>limit}(k)``; infinite if ``b_1 != 0``."""
    if b[1] != 0:
        return math.inf
    return math.fsum(
        abs(float(b[k])) * (prime_zeta_tail(k, limit) + prime_zeta_tail_bound(k, limit))
        for k in range(2, b.order + 1)
        if b[k] != 0
    )


def mean_value_product(
    spec: MultiplicativeSpec,
    prime_limit: int = DEFAULT_PRIME_LIMIT,
    eps: float = DEFAULT_EPS,
    *,
    strong: bool = False,
    series_order: int = DEFAULT_ORDER,
) -> MeanValueResult:
    primes = cached_primes(int(prime_limit))
    X = _deficiencies(spec, primes, eps, strong=strong)
    value = _log_product(X)
    klass = classify_convergence(spec) if spec.declared_class == "auto" else spec.declared_class
    warnings = []
    if spec.series_rule is not None:
        b = series_neg_log(_series_for(spec, series_order, strong), series_order)
        tail = _series_tail_bound(b, prime_limit)
        rounding = 8 * EPS * len(primes) + 2 * eps * len(primes)
        error = abs(value) * (math.expm1(tail) + rounding) if math.isfinite(tail) else math.inf
    else:
        error = None
        warnings.append("no series rule: tail of the product is not bounded")
    return MeanValueResult(
        value=value * spec.bound,
        method="strong" if strong else "product",
        convergence_class=klass,
        error_bound=None if error is None else error * spec.bound,
        prime_limit=int(prime_limit),
        series_order=series_order if spec.series_rule is not None else None,
        multiplier=spec.bound,
        warnings=warnings,
    )


def _check_window(X: RationalSeries, p0: int) -> None:
    primes = cached_primes(max(2 * p0 + 100, 1000))
    start = int(np.searchsorted(primes, p0, side="right"))
    for p in primes[start : start + 4].tolist():
        v = series_eval(X, 1.0 / p)
        if not abs(v) <= 1.0 - WINDOW_DELTA:
            raise AccelerationInapplicable(f"|X(1/{p})| = {abs(v)} outside the convergence window")


def _geometric_remainder(terms: list[float]) -> float:
    """Extrapolate the dropped part of a series from its last nonzero terms."""
    nz = [(k, abs(v)) for k, v in terms if v != 0.0]
    if len(nz) < 3:
        return abs(nz[-1][1]) if nz else 0.0
    (k0, v0), (k1, v1), (k2, v2) = nz[-3:]
    ratio = max((v1 / v0) ** (1.0 / (k1 - k0)), (v2 / v1) ** (1.0 / (k2 - k1)))
    if ratio > RATIO_CUTOFF:
        raise NumericFailure(f"series terms shrink too slowly (ratio {ratio:.3f})")
    return v2 * ratio / (1.0 - ratio)


def mean_value_accelerated(
    spec: MultiplicativeSpec,
    split_p0: int = DEFAULT_SPLIT,
    series_order: int = DEFAULT_ORDER,
    *,
    strong: bool = False,
    eps: float = DEFAULT_EPS,
) -> MeanValueResult:
    """Head product over ``p <= split_p0`` times the prime-zeta series tail.

    ``split_p0 = 1`` gives the pure series ``exp(-sum_k b_k P(k))`` with
    ``c_constant = sum_k b_k P(k)``.  Otherwise ``c_constant`` is the
    equivalent ``-log(value)``.
    """
    if series_order < 2:
        raise DomainError("series_order must be >= 2")
    X = _series_for(spec, series_order, strong)
    if X[1] != 0:
        raise AccelerationInapplicable(f"{spec.name}: deficiency has a 1/p term")
    _check_window(X, split_p0)
    b = series_neg_log(X, series_order)

    terms = []
    bounds = []
    for k in range(2, series_order + 1):
        if b[k] == 0:
            continue
        bk = float(b[k])
        terms.append((k, bk * prime_zeta_tail(k, split_p0)))
        bounds.append(abs(bk) * prime_zeta_tail_bound(k, split_p0))
    c_tail = math.fsum(v for _, v in terms)
    remainder = _geometric_remainder(terms) + math.fsum(bounds)

    if split_p0 >= 2:
        head_primes = cached_primes(max(split_p0, 2))
        head_primes = head_primes[head_primes <= split_p0]
        head = _log_product(_deficiencies(spec, head_primes, eps, strong=strong))
    else:
        head = 1.0
    value = head * math.exp(-c_tail)
    if split_p0 < 2:
        c = c_tail
    else:
        c = -math.log(value) if value > 0 else None
    error = abs(value) * (math.expm1(remainder) + 16 * EPS)
    return MeanValueResult(
        value=value * spec.bound,
        method="strong" if strong else "accelerated",
        convergence_class="convergent",
        error_bound=error * spec.bound,
        c_constant=c,
        series_order=series_order,
        split_p0=split_p0,
        multiplier=spec.bound,
    )


def mean_value_strongly(
    spec: MultiplicativeSpec,
    split_p0: int = DEFAULT_SPLIT,
    series_order: int = DEFAULT_ORDER,
    *,
    prime_limit: int = DEFAULT_PRIME_LIMIT,
) -> MeanValueResult:
    """Mean value from the local factors ``1 - (1 - g(p))/p``."""
    if not spec.strongly_multiplicative:
        raise DomainError(f"{spec.name} is not flagged strongly multiplicative")
    if spec.series_rule is None:
        return mean_value_product(spec, prime_limit, strong=True)
    return mean_value_accelerated(spec, split_p0, series_order, strong=True)


def mean_value(
    spec: MultiplicativeSpec,
    method: str = "auto",
    *,
    prime_limit: int = DEFAULT_PRIME_LIMIT,
    series_order: int = DEFAULT_ORDER,
    split_p0: int = DEFAULT_SPLIT,
    eps: float = DEFAULT_EPS,
) -> MeanValueResult:
    """Dispatch to the appropriate route.

    ``method`` is one of ``auto``, ``product``, ``accelerated``, ``strong``
    or ``paper_truncation`` (the pure series cut after ``P(5)``).
    """
    if method == "product":
        return mean_value_product(spec, prime_limit, eps, series_order=series_order)
    if method == "accelerated":
        return mean_value_accelerated(spec, split_p0, series_order, eps=eps)
    if method == "strong":
        return mean_value_strongly(spec, split_p0, series_order, prime_limit=prime_limit)
    if method == "paper_truncation":
        res = mean_value_accelerated(spec, **PAPER_TRUNCATION, eps=eps)
        res.warnings.append("pure series truncated after the k=5 term")
        return res
    if method != "auto":
        raise DomainError(f"unknown method {method!r}")

    klass = classify_convergence(spec)
    if klass == "divergent":
        return MeanValueResult(
            value=0.0, method="divergent_zero", convergence_class="divergent",
            error_bound=0.0, multiplier=spec.bound,
        )
    if klass == "convergent":
        if spec.series_rule is not None:
            try:
                return mean_value_accelerated(spec, split_p0, series_order, eps=eps)
            except AccelerationInapplicable as exc:
                log.info("falling back to the product route: %s", exc)
        return mean_value_product(spec, prime_limit, eps, series_order=series_order)
    res = mean_value_product(spec, prime_limit, eps, series_order=series_order)
    res.method = "indeterminate"
    res.convergence_class = "indeterminate"
    res.warnings.append("convergence class could not be decided; value is a truncated product")
    return res


def mertens_partial_product_check(x: int) -> tuple[float, float]:
    """``(prod_{p<=x} (1 - 1/p), exp(-gamma)/log x)``."""
    if x < 100:
        raise DomainError("x must be >= 100")
    primes = cached_primes(int(x)).astype(float)
    product = _log_product(1.0 / primes)
    return product, math.exp(-euler_gamma()) / math.log(x)
