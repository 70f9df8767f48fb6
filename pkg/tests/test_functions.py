import json
import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from multmean.exceptions import BoundViolation, SpecError
from multmean.functions import (
    MultiplicativeSpec,
    catalog,
    evaluate,
    evaluate_exact,
    lookup,
    parse_spec,
    rescale_bound,
)
from multmean.mean_value import mean_value
from multmean.primes import trial_factorize
from multmean.summatory import summatory



def fac(m):
    return trial_factorize(m)


def test_evaluate_examples():
    assert evaluate(lookup("mobius"), fac(30)) == -1
    assert evaluate(lookup("mobius"), fac(12)) == 0
    assert evaluate(lookup("totient_ratio_squared"), fac(6)) == pytest.approx(1 / 9, rel=1e-15)
    assert evaluate_exact(lookup("totient_ratio_squared"), fac(6)) == F(1, 9)
    assert evaluate(lookup("one"), fac(1)) == 1.0


def test_catalog_contents():
    cat = catalog()
    assert set(cat) == {"mobius", "one", "epsilon", "squarefree", "powerful", "totient_ratio_squared"}
    assert cat["mobius"].declared_class == "divergent"
    assert cat["one"].declared_class == "convergent"
    assert cat["epsilon"].declared_class == "divergent"
    assert cat["squarefree"].declared_class == "convergent"
    assert cat["powerful"].declared_class == "divergent"
    assert cat["totient_ratio_squared"].declared_class == "convergent"
    assert cat["totient_ratio_squared"].strongly_multiplicative
    assert {n for n, s in cat.items() if s.series_rule is not None} == {"squarefree", "powerful", "totient_ratio_squared"}
    assert all(s.bound == 1 for s in cat.values())


def test_catalog_values():
    assert lookup("mobius").value_rule(7, 1) == -1
    assert lookup("powerful").value_rule(7, 1) == 0
    assert lookup("powerful").value_rule(7, 3) == 1
    assert lookup("totient_ratio_squared").value_rule(5, 2) == pytest.approx(0.64, rel=1e-15)
    assert lookup("totient-ratio-squared") is lookup("totient_ratio_squared")
    with pytest.raises(SpecError):
        lookup("liouville")


def _coprime_pairs(n, limit, seed=3):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        a, b = rng.randint(1, limit), rng.randint(1, limit)
        if math.gcd(a, b) == 1:
            out.append((a, b))
    return out


@pytest.mark.parametrize("name", sorted(catalog()))
def test_multiplicativity_exact(name):
    spec = lookup(name)
    for a, b in _coprime_pairs(300, 10**4):
        assert evaluate_exact(spec, fac(a * b)) == evaluate_exact(spec, fac(a)) * evaluate_exact(spec, fac(b))
        assert evaluate(spec, fac(a * b)) == pytest.approx(evaluate(spec, fac(a)) * evaluate(spec, fac(b)), abs=1e-14)


def test_multiplicativity_float_rule():
    spec = MultiplicativeSpec("cos", lambda p, a: np.cos(np.asarray(p, float) * np.asarray(a)))
    for a, b in _coprime_pairs(300, 10**4):
        assert evaluate(spec, fac(a * b)) == pytest.approx(evaluate(spec, fac(a)) * evaluate(spec, fac(b)), abs=1e-14)


@pytest.mark.parametrize("name", [n for n, s in catalog().items() if s.strongly_multiplicative])
def test_strong_multiplicativity(name):
    spec = lookup(name)
    for p in [2, 3, 5, 7, 11, 13, 97]:
        first = spec.value_rule(p, 1)
        assert all(spec.value_rule(p, a) == first for a in range(1, 9))


def test_strong_flag_is_validated():
    with pytest.raises(SpecError):
        MultiplicativeSpec("bad", lookup("mobius").value_rule, strongly_multiplicative=True)


def test_bound_sampled_on_construction():
    with pytest.raises(BoundViolation):
        MultiplicativeSpec("big", lambda p, a: np.where(np.asarray(p) == 97, 1.5, 0.5))


def test_lazy_bound_assertion_at_large_primes():
    spec = MultiplicativeSpec("late", lambda p, a: np.where(np.asarray(p) > 1000, 2.0, 1.0))
    with pytest.raises(BoundViolation):
        evaluate(spec, fac(1009))


def test_rescale_identity():
    spec, c = rescale_bound(lookup("one").value_rule, 1)
    assert c == 1 and spec.bound == 1
    assert spec.value_rule(3, 2) == 1


def test_rescale_mobius():
    raw = lambda p, a: 2 * lookup("mobius").value_rule(p, a)
    spec, c = rescale_bound(raw, 2)
    assert c == 2
    for m in range(1, 200):
        assert evaluate(spec, fac(m)) == evaluate(lookup("mobius"), fac(m))


def test_rescale_violation():
    with pytest.raises(BoundViolation):
        rescale_bound(lambda p, a: 3 * lookup("mobius").value_rule(p, a), 2)


def test_rescale_totient_against_direct_summation():
    unit_spec = lookup("totient_ratio_squared")
    raw3 = lambda p, a: 3 * unit_spec.value_rule(p, a)
    spec, c = rescale_bound(raw3, 3)
    assert c == 3
    mean = mean_value(spec).value
    unit = mean_value(unit_spec).value
    # opaque float rule: no series rule, so the truncated product is used
    assert mean == pytest.approx(3 * unit, abs=1e-6)
    n = 10**5
    direct = math.fsum(3 * evaluate(unit_spec, fac(m)) for m in range(1, n + 1))
    assert abs(direct / n - 3 * unit) < 1e-4
    assert summatory(spec, n)[0].S == pytest.approx(direct, rel=1e-12)


def test_rescale_rational_document_is_exact():
    doc = {"name": "phi2x3", "bound": 3, "rule": {"type": "alpha_poly", "polys": [["3", "-6", "3"]]}}
    spec = parse_spec(doc)
    assert mean_value(spec).value == 3 * mean_value(lookup("totient_ratio_squared")).value


def test_parse_builtin():
    spec = parse_spec('{"rule": {"type": "builtin", "id": "mobius"}}')
    assert spec.value_rule is lookup("mobius").value_rule
    assert spec.name == "mobius"


def test_parse_alpha_poly_matches_totient():
    doc = {"name": "phi2", "rule": {"type": "alpha_poly", "polys": [["1", "-2", "1"]], "default": "repeat_last"}}
    spec = parse_spec(json.dumps(doc))
    ref = lookup("totient_ratio_squared")
    for p in (2, 3, 5, 7, 11, 97):
        for a in range(1, 6):
            assert spec.value_rule(p, a) == ref.value_rule(p, a)
    assert spec.strongly_multiplicative
    assert spec.series_rule is not None


def test_parse_with_bound_normalises():
    doc = {"name": "twice", "bound": 2, "rule": {"type": "alpha_poly", "polys": [["-2"]], "default": "zero"}}
    spec = parse_spec(doc)
    assert spec.bound == 2
    assert spec.value_rule(5, 1) == -1
    assert mean_value(spec, "product", prime_limit=10**4).value == pytest.approx(
        2 * mean_value(lookup("mobius"), "product", prime_limit=10**4).value, rel=1e-15
    )


@pytest.mark.parametrize(
    "doc",
    [
        {"name": "x", "rule": {"type": "alpha_poly", "polys": [["2"]]}},
        {"name": "x", "rule": {"type": "alpha_poly", "polys": [["1", "-7"]]}},
        {"name": "x", "bound": 1, "rule": {"type": "alpha_poly", "polys": [["3/2"]]}},
    ],
)
def test_parse_bound_violation(doc):
    with pytest.raises(BoundViolation):
        parse_spec(doc)


@pytest.mark.parametrize(
    "doc",
    [
        "not json",
        "[]",
        {"name": "x"},
        {"name": "x", "rule": {"type": "alpha_poly", "polys": [["1/0"]]}},
        {"name": "x", "rule": {"type": "alpha_poly", "polys": [["a"]]}},
        {"name": "x", "rule": {"type": "alpha_poly", "polys": []}},
        {"name": "x", "rule": {"type": "alpha_poly", "polys": [["1"]], "default": "never"}},
        {"name": "x", "rule": {"type": "alpha_poly", "polys": [["1"]]}, "colour": "red"},
        {"name": "x", "rule": {"type": "alpha_poly", "polys": [["1"]], "extra": 1}},
        {"name": "x", "rule": {"type": "spline"}},
        {"rule": {"type": "alpha_poly", "polys": [["1"]]}},
        {"name": "x", "rule": {"type": "builtin", "id": "nope"}},
        {"name": "x", "class": "sometimes", "rule": {"type": "builtin", "id": "one"}},
        {"name": "x", "bound": -1, "rule": {"type": "builtin", "id": "one"}},
        {"name": "x", "strongly_multiplicative": True, "rule": {"type": "alpha_poly", "polys": [["1"], ["0"]]}},
        {"name": "x", "strongly_multiplicative": True, "rule": {"type": "builtin", "id": "mobius"}},
    ],
)
def test_parse_schema_errors(doc):
    with pytest.raises(SpecError):
        parse_spec(doc)
