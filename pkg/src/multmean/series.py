"""Truncated power series in ``t = 1/p`` with exact rational coefficients.

The local factor of an Euler product, ``(1 - t) * sum_a g(p^a) t^a``, is
written as ``1 - X(t)``; ``-log(1 - X)`` then expands as ``sum_k b_k t^k``,
and summing over primes turns each ``t^k`` into a prime zeta value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

from .exceptions import BoundViolation, SpecError

Rational = Union[Fraction, int]

DEFAULT_ORDER = 40
DEFAULTS = ("repeat_last", "zero", "one", "same_as_alpha1")


def _clean(coeffs: Mapping[int, Rational], order: int) -> dict[int, Fraction]:
    return {k: Fraction(v) for k, v in coeffs.items() if v != 0 and 0 <= k <= order}


@dataclass(frozen=True)
class RationalSeries:
    """Polynomial in ``t`` truncated at ``order``; missing exponents are zero."""

    order: int
    coeffs: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _clean(self.coeffs, self.order))

    @classmethod
    def from_list(cls, values: Sequence[Rational], order: int | None = None) -> "RationalSeries":
        order = len(values) - 1 if order is None else order
        return cls(order, dict(enumerate(values)))

    @classmethod
    def monomial(cls, k: int, coef: Rational = 1, order: int = DEFAULT_ORDER) -> "RationalSeries":
        return cls(order, {k: coef})

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs.get(k, Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalSeries):
            return self.coeffs == other.coeffs
        if other == 0:
            return not self.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __add__(self, other):
        return series_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return series_add(self, series_scale(other, -1) if isinstance(other, RationalSeries) else -other)

    def __rsub__(self, other):
        return series_add(series_scale(self, -1), other)

    def __mul__(self, other):
        if isinstance(other, RationalSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return series_scale(self, -1)

    def valuation(self) -> int | None:
        """Smallest exponent with a nonzero coefficient, ``None`` for zero."""
        return min(self.coeffs) if self.coeffs else None

    def to_list(self) -> list[Fraction]:
        return [self[k] for k in range(self.order + 1)]

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"RationalSeries(0, order={self.order})"
        terms = " + ".join(f"({c})t^{k}" for k, c in sorted(self.coeffs.items()))
        return f"RationalSeries({terms}, order={self.order})"


def series_add(a: RationalSeries, b: RationalSeries | Rational) -> RationalSeries:
    if not isinstance(b, RationalSeries):
        b = RationalSeries(a.order, {0: b})
    order = min(a.order, b.order)
    out = dict(a.coeffs)
    for k, v in b.coeffs.items():
        out[k] = out.get(k, 0) + v
    return RationalSeries(order, out)


def series_scale(a: RationalSeries, c: Rational) -> RationalSeries:
    c = Fraction(c)
    return RationalSeries(a.order, {k: v * c for k, v in a.coeffs.items()})


def series_mul(a: RationalSeries, b: RationalSeries) -> RationalSeries:
    order = min(a.order, b.order)
    out: dict[int, Fraction] = {}
    for i, x in a.coeffs.items():
        for j, y in b.coeffs.items():
            if i + j <= order:
                out[i + j] = out.get(i + j, 0) + x * y
    return RationalSeries(order, out)


def series_eval(a: RationalSeries, t: float) -> float:
    """Horner evaluation of the truncated polynomial at a float ``t``."""
    acc = 0.0
    for k in range(a.order, -1, -1):
        acc = acc * t + float(a[k])
    return acc


def series_eval_exact(a: RationalSeries, t: Fraction) -> Fraction:
    acc = Fraction(0)
    for k in range(a.order, -1, -1):
        acc = acc * t + a[k]
    return acc


def parse_rational(text: str | int) -> Fraction:
    """Parse ``"n/d"`` or an integer literal."""
    if isinstance(text, bool):
        raise SpecError(f"bad rational {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise SpecError(f"bad rational {text!r}")
    s = text.strip()
    num, _, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if den else 1
    except ValueError:
        raise SpecError(f"bad rational {text!r}") from None
    if d == 0:
        raise SpecError(f"zero denominator in {text!r}")
    return Fraction(n, d)


@dataclass(frozen=True)
class AlphaPolyRule:
    """``g(p^a)`` as a polynomial in ``t = 1/p`` for each exponent ``a``.

    ``polys[a - 1]`` lists the coefficients (constant term first) for
    exponent ``a``.  Exponents beyond ``len(polys)`` follow ``default``.
    """

    polys: tuple[tuple[Fraction, ...], ...]
    default: str = "repeat_last"

    def __post_init__(self):
        if not self.polys:
            raise SpecError("at least one polynomial is required")
        if self.default not in DEFAULTS:
            raise SpecError(f"unknown default {self.default!r}")
        polys = tuple(tuple(Fraction(c) for c in p) or (Fraction(0),) for p in self.polys)
        object.__setattr__(self, "polys", polys)
        for p in (2, 3, 5, 7):
            for a in range(1, len(self.polys) + 2):
                v = self.exact(p, a)
                if abs(v) > 1:
                    raise BoundViolation(f"|g({p}^{a})| = {v} exceeds 1")

    def poly(self, alpha: int) -> tuple[Fraction, ...]:
        if alpha <= 0:
            return (Fraction(1),)
        if alpha <= len(self.polys):
            return self.polys[alpha - 1]
        if self.default == "repeat_last":
            return self.polys[-1]
        if self.default == "same_as_alpha1":
            return self.polys[0]
        return (Fraction(1 if self.default == "one" else 0),)

    def exact(self, p: int, alpha: int) -> Fraction:
        t = Fraction(1, p)
        acc = Fraction(0)
        for c in reversed(self.poly(alpha)):
            acc = acc * t + c
        return acc

    def __call__(self, p, alpha):
        """Float values, broadcasting over arrays of ``p`` and ``alpha``."""
        p = np.asarray(p, dtype=float)
        alpha = np.asarray(alpha)
        t = 1.0 / p
        if alpha.ndim == 0:
            return _horner(self.poly(int(alpha)), t)
        t, alpha = np.broadcast_arrays(t, alpha)
        out = np.empty(t.shape, dtype=float)
        for a in np.unique(alpha).tolist():
            sel = alpha == a
            out[sel] = _horner(self.poly(a), t[sel])
        return out

    @property
    def strongly_multiplicative(self) -> bool:
        first = self.polys[0]
        return all(p == first for p in self.polys) and self.default in ("repeat_last", "same_as_alpha1")

    @property
    def integer_valued(self) -> bool:
        """True when every value is a constant in ``{-1, 0, 1}``."""
        return all(len(p) == 1 and p[0].denominator == 1 for p in self.polys)

    def as_series(self, alpha: int, order: int) -> RationalSeries:
        return RationalSeries(order, dict(enumerate(self.poly(alpha))))


def _horner(coeffs: Sequence[Fraction], t):
    acc = np.zeros_like(t) if isinstance(t, np.ndarray) else 0.0
    for c in reversed(coeffs):
        acc = acc * t + float(c)
    return acc


def local_factor_to_X(rule: AlphaPolyRule, order: int = DEFAULT_ORDER) -> RationalSeries:
    """Deficiency series ``X`` with ``1 - X = (1 - t) * sum_a g(p^a) t^a``."""
    if order < 2:
        raise ValueError("order must be >= 2")
    total = RationalSeries(order, {0: 1})
    for alpha in range(1, order + 1):
        shifted = RationalSeries(order, {alpha + i: c for i, c in enumerate(rule.poly(alpha))})
        total = total + shifted
    local = series_mul(RationalSeries(order, {0: 1, 1: -1}), total)
    X = series_add(series_scale(local, -1), 1)
    if X[0] != 0:
        raise SpecError("rule gives a deficiency series with a constant term")
    return X


def strong_deficiency(rule: AlphaPolyRule, order: int = DEFAULT_ORDER) -> RationalSeries:
    """``X = t * (1 - g(p))`` for the strongly multiplicative local factor."""
    g1 = rule.as_series(1, order)
    return series_mul(RationalSeries(order, {1: 1}), series_add(series_scale(g1, -1), 1))


def series_neg_log(X: RationalSeries, order: int | None = None) -> RationalSeries:
    """Coefficients ``b_k`` of ``-log(1 - X) = sum_j X^j / j``."""
    order = X.order if order is None else min(order, X.order)
    if X[0] != 0:
        raise SpecError("series must have zero constant term")
    X = RationalSeries(order, X.coeffs)
    v = X.valuation()
    out = RationalSeries(order)
    if v is None:
        return out
    power = X
    j = 1
    while j * v <= order:
        out = out + series_scale(power, Fraction(1, j))
        power = series_mul(power, X)
        j += 1
    return out


def series_exp(a: RationalSeries) -> RationalSeries:
    """Formal exponential of a series without constant term."""
    if a[0] != 0:
        raise SpecError("series must have zero constant term")
    order = a.order
    out = RationalSeries(order, {0: 1})
    term = RationalSeries(order, {0: 1})
    v = a.valuation()
    if v is None:
        return out
    j = 1
    while j * v <= order:
        term = series_scale(series_mul(term, a), Fraction(1, j))
        out = out + term
        j += 1
    return out
