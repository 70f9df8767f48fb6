"""Bounded real multiplicative functions and the built-in catalog."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Mapping

import numpy as np

from .exceptions import BoundViolation, SpecError
from .primes import Factorization, sieve_primes
from .series import DEFAULTS, AlphaPolyRule, parse_rational

CLASSES = ("convergent", "divergent", "auto")
_TOL = 1e-12
_SAMPLE_PRIMES = tuple(sieve_primes(100))
_SAMPLE_ALPHAS = range(1, 6)

ValueRule = Callable[[Any, Any], Any]


@dataclass(frozen=True)
class MultiplicativeSpec:
    """A real multiplicative function normalised to ``|g| <= 1``.

    ``value_rule(p, alpha)`` must broadcast over numpy arrays of primes and
    exponents.  ``bound`` is the factor ``C`` that multiplies every mean
    value and summatory total at reporting time.
    """

    name: str
    value_rule: ValueRule
    bound: float = 1.0
    strongly_multiplicative: bool = False
    completely_multiplicative: bool = False
    series_rule: AlphaPolyRule | None = None
    declared_class: str = "auto"
    integer_valued: bool = False

    def __post_init__(self):
        if not self.bound > 0:
            raise SpecError("bound must be positive")
        if self.declared_class not in CLASSES:
            raise SpecError(f"unknown class {self.declared_class!r}")
        _check_samples(self.value_rule, 1.0)
        if self.strongly_multiplicative:
            for p in _SAMPLE_PRIMES:
                first = float(self.value_rule(p, 1))
                for a in _SAMPLE_ALPHAS:
                    if float(self.value_rule(p, a)) != first:
                        raise SpecError(f"{self.name}: flagged strongly multiplicative but g({p}^{a}) != g({p})")
        if self.series_rule is not None:
            for p in (2, 3, 5, 7):
                for a in (1, 2, 3):
                    if abs(float(self.series_rule(p, a)) - float(self.value_rule(p, a))) > _TOL:
                        raise SpecError(f"{self.name}: series rule disagrees with value rule at {p}^{a}")

    def g(self, p, alpha):
        """Values on prime powers, with the lazy ``|g| <= 1`` assertion."""
        v = self.value_rule(p, alpha)
        if np.any(np.abs(v) > 1.0 + _TOL):
            raise BoundViolation(f"{self.name}: |g| exceeds 1 at p={p}, alpha={alpha}")
        return v

    def scaled(self, c: float) -> "MultiplicativeSpec":
        """The same normalised function reported with multiplier ``c``."""
        return dataclasses.replace(self, bound=float(c))


def _check_samples(rule: ValueRule, c: float) -> None:
    for p in _SAMPLE_PRIMES:
        for a in _SAMPLE_ALPHAS:
            v = float(rule(p, a))
            if not abs(v) <= c * (1 + _TOL):
                raise BoundViolation(f"|g({p}^{a})| = {abs(v)} exceeds {c}")


def evaluate(spec: MultiplicativeSpec, f: Factorization) -> float:
    out = 1.0
    for p, a in f.factors:
        out *= float(spec.g(p, a))
    return out


def evaluate_exact(spec: MultiplicativeSpec, f: Factorization) -> Fraction:
    """Exact value for specs whose rule is a rational :class:`AlphaPolyRule`."""
    rule = spec.value_rule
    if not isinstance(rule, AlphaPolyRule):
        raise TypeError(f"{spec.name} has no exact rational rule")
    out = Fraction(1)
    for p, a in f.factors:
        out *= rule.exact(p, a)
    return out


def _rule(*polys, default="repeat_last") -> AlphaPolyRule:
    return AlphaPolyRule(tuple(tuple(p) for p in polys), default)


def _build_catalog() -> dict[str, MultiplicativeSpec]:
    mobius = _rule((-1,), default="zero")
    one = _rule((1,))
    epsilon = _rule((0,))
    squarefree = _rule((1,), (0,))
    powerful = _rule((0,), (1,))
    totient_sq = _rule((1, -2, 1))
    specs = [
        MultiplicativeSpec("mobius", mobius, declared_class="divergent", integer_valued=True),
        MultiplicativeSpec(
            "one", one, strongly_multiplicative=True, completely_multiplicative=True,
            declared_class="convergent", integer_valued=True,
        ),
        MultiplicativeSpec(
            "epsilon", epsilon, strongly_multiplicative=True, completely_multiplicative=True,
            declared_class="divergent", integer_valued=True,
        ),
        MultiplicativeSpec(
            "squarefree", squarefree, series_rule=squarefree,
            declared_class="convergent", integer_valued=True,
        ),
        MultiplicativeSpec(
            "powerful", powerful, series_rule=powerful,
            declared_class="divergent", integer_valued=True,
        ),
        MultiplicativeSpec(
            "totient_ratio_squared", totient_sq, strongly_multiplicative=True,
            series_rule=totient_sq, declared_class="convergent",
        ),
    ]
    return {s.name: s for s in specs}


_CATALOG = _build_catalog()


def catalog() -> dict[str, MultiplicativeSpec]:
    return dict(_CATALOG)


def lookup(name: str) -> MultiplicativeSpec:
    key = name.strip().lower().replace("-", "_")
    try:
        return _CATALOG[key]
    except KeyError:
        raise SpecError(f"unknown builtin {name!r}; choose from {sorted(_CATALOG)}") from None


def rescale_bound(raw_rule: ValueRule, c: float, name: str = "scaled", **kwargs) -> tuple[MultiplicativeSpec, float]:
    """Normalise a rule bounded by ``c`` to ``|g| <= 1``.

    Returns the normalised spec (carrying ``bound=c``) and the multiplier.
    Rational :class:`AlphaPolyRule` inputs stay rational.
    """
    if not c > 0:
        raise SpecError("C must be positive")
    _check_samples(raw_rule, c)
    if isinstance(raw_rule, AlphaPolyRule):
        k = Fraction(c)
        rule = AlphaPolyRule(tuple(tuple(x / k for x in p) for p in raw_rule.polys), raw_rule.default)
        kwargs.setdefault("series_rule", rule)
        kwargs.setdefault("strongly_multiplicative", rule.strongly_multiplicative)
    else:
        def rule(p, alpha, _raw=raw_rule, _c=float(c)):
            return np.asarray(_raw(p, alpha), dtype=float) / _c
    spec = MultiplicativeSpec(name, rule, bound=float(c), **kwargs)
    return spec, float(c)


_FIELDS = {"name", "bound", "rule", "class", "strongly_multiplicative"}


def parse_spec(document: str | Mapping[str, Any]) -> MultiplicativeSpec:
    """Build a spec from a JSON document (or an already-decoded mapping).

    Schema::

        {"name": str, "bound": number = 1,
         "rule": {"type": "builtin", "id": str}
               | {"type": "alpha_poly", "polys": [[rational, ...], ...],
                  "default": "repeat_last" | "zero" | "one" | "same_as_alpha1"},
         "class": "convergent" | "divergent" | "auto",
         "strongly_multiplicative": bool}

    Rationals are ``"n/d"`` strings or integer literals; polynomial
    coefficients are in ``t = 1/p``, constant term first, and are given in
    raw units (bounded by ``bound``).
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecError(f"not valid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise SpecError("spec document must be an object")
    unknown = set(document) - _FIELDS
    if unknown:
        raise SpecError(f"unknown fields: {sorted(unknown)}")
    if "rule" not in document:
        raise SpecError("missing field 'rule'")
    rule = document["rule"]
    if not isinstance(rule, Mapping) or "type" not in rule:
        raise SpecError("'rule' must be an object with a 'type'")

    bound = document.get("bound", 1)
    if isinstance(bound, bool) or not isinstance(bound, (int, float)) or not bound > 0:
        raise SpecError("'bound' must be a positive number")
    klass = document.get("class", "auto")
    if klass not in CLASSES:
        raise SpecError(f"'class' must be one of {CLASSES}")
    strong = document.get("strongly_multiplicative")
    if strong is not None and not isinstance(strong, bool):
        raise SpecError("'strongly_multiplicative' must be a boolean")

    if rule["type"] == "builtin":
        if set(rule) - {"type", "id"} or "id" not in rule:
            raise SpecError("builtin rule takes exactly 'type' and 'id'")
        base = lookup(str(rule["id"]))
        name = document.get("name", base.name)
        if strong and not base.strongly_multiplicative:
            raise SpecError(f"{base.name} is not strongly multiplicative")
        changes = {"name": name, "bound": float(bound)}
        if "class" in document:
            changes["declared_class"] = klass
        return dataclasses.replace(base, **changes)

    if rule["type"] != "alpha_poly":
        raise SpecError(f"unknown rule type {rule['type']!r}")
    if set(rule) - {"type", "polys", "default"}:
        raise SpecError(f"unknown rule fields: {sorted(set(rule) - {'type', 'polys', 'default'})}")
    polys = rule.get("polys")
    if not isinstance(polys, list) or not polys or not all(isinstance(p, list) for p in polys):
        raise SpecError("'polys' must be a non-empty array of arrays")
    default = rule.get("default", "repeat_last")
    if default not in DEFAULTS:
        raise SpecError(f"'default' must be one of {DEFAULTS}")
    name = document.get("name")
    if not isinstance(name, str) or not name:
        raise SpecError("missing field 'name'")

    raw = [[parse_rational(c) for c in p] for p in polys]
    c = Fraction(bound) if isinstance(bound, int) else Fraction(str(bound))
    norm = AlphaPolyRule(tuple(tuple(x / c for x in p) for p in raw), default)
    if strong and not norm.strongly_multiplicative:
        raise SpecError("strongly_multiplicative set but polynomials depend on alpha")
    return MultiplicativeSpec(
        name,
        norm,
        bound=float(bound),
        strongly_multiplicative=norm.strongly_multiplicative if strong is None else strong,
        series_rule=norm,
        declared_class=klass,
        integer_valued=norm.integer_valued and bound == 1,
    )
