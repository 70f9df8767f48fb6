import math

import numpy as np
import pytest

from multmean.exceptions import DomainError
from multmean.primes import cached_primes
from multmean.special import (
    euler_gamma,
    prime_zeta,
    prime_zeta_bound,
    prime_zeta_direct,
    prime_zeta_table,
    prime_zeta_tail,
    riemann_r,
    riemann_zeta,
)

# sum_p p^-2 to 20 digits (OEIS A085548)
P2 = 0.45224742004106549850


def test_zeta_closed_forms():
    assert riemann_zeta(2) == pytest.approx(math.pi**2 / 6, rel=1e-14)
    assert riemann_zeta(4) == pytest.approx(math.pi**4 / 90, rel=1e-14)


def test_zeta3_against_direct_sum_with_integral_tail():
    n = np.arange(1, 10**6 + 1, dtype=float)
    head = math.fsum((1.0 / n**3).tolist())
    N = 10**6
    lower = head + 1.0 / (2 * (N + 1) ** 2)
    upper = head + 1.0 / (2 * N**2)
    z = riemann_zeta(3)
    assert lower - 1e-15 <= z <= upper + 1e-15
    assert z == pytest.approx(1.202056903159, abs=1e-12)


def test_zeta_near_one_and_monotone():
    grid = [1.0 + 1e-5, 1.01, 1.1, 1.5, 2, 3, 5, 10, 20, 50, 100]
    vals = [riemann_zeta(s) for s in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    # zeta(s) ~ 1/(s-1) + gamma near the pole
    assert riemann_zeta(1 + 1e-5) == pytest.approx(1e5 + 0.5772156649, rel=1e-9)


@pytest.mark.parametrize("s", [1.0, 0.5, -2])
def test_domain(s):
    with pytest.raises(DomainError):
        riemann_zeta(s)
    with pytest.raises(DomainError):
        prime_zeta(s)
    with pytest.raises(DomainError):
        prime_zeta_tail(s, 0)


def test_prime_zeta_2():
    assert prime_zeta(2) == pytest.approx(P2, abs=1e-12)
    direct, bound = prime_zeta_direct(2)
    assert direct == pytest.approx(P2, abs=1e-12)
    assert bound < 1e-12


def test_prime_zeta_large_s_two_term_dominance():
    assert abs(prime_zeta(20) - (2.0**-20 + 3.0**-20)) < 1e-12


def test_prime_zeta_3_cross_method():
    direct, _ = prime_zeta_direct(3)
    assert abs(prime_zeta(3) - direct) < 1e-12


@pytest.mark.parametrize("s", [2, 2.5, 3, 4, 6, 10])
def test_routes_agree_within_bounds(s):
    direct, bound = prime_zeta_direct(s)
    assert abs(prime_zeta(s) - direct) <= bound + prime_zeta_bound(s)


@pytest.mark.parametrize("s", [1.5, 2, 3, 4, 6, 10])
def test_prime_zeta_below_log_zeta(s):
    assert 0 < prime_zeta(s) < math.log(riemann_zeta(s))


def test_tail_examples():
    assert prime_zeta_tail(2, 0) == prime_zeta(2)
    assert prime_zeta_tail(2, 2) == pytest.approx(prime_zeta(2) - 0.25, abs=1e-16)


def test_tail_beyond_101_for_s6():
    # brute force: every prime up to 10^6 plus an integer-sum bound for the rest
    ps = cached_primes(10**6)
    body = math.fsum((ps[ps > 101].astype(float) ** -6).tolist())
    rest = 1e6**-5 / 5
    tail = prime_zeta_tail(6, 101)
    assert body <= tail <= body + rest
    # loose analytic bound: sum over all integers above 102
    assert tail < 102.0**-5 / 5


@pytest.mark.parametrize("s", [2, 3, 7, 25])
@pytest.mark.parametrize("p0", [11, 101, 1009, 10**6])
def test_tail_properties(s, p0):
    tail = prime_zeta_tail(s, p0)
    assert 0 <= tail <= prime_zeta(s)
    if s >= 3:
        ps = cached_primes(2 * p0 + 100)
        nxt = float(ps[np.searchsorted(ps, p0, side="right")])
        assert tail >= nxt**-s


def test_tail_split_consistency():
    # P(s) = head + tail for several splits
    for s in (2, 3, 5):
        for p0 in (2, 11, 101, 1009):
            ps = cached_primes(10**4)
            head = math.fsum((ps[ps <= p0].astype(float) ** -s).tolist())
            assert head + prime_zeta_tail(s, p0) == pytest.approx(prime_zeta(s), abs=2e-15)


def test_table_invariants():
    table = prime_zeta_table(20)
    vals = list(table.values)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    for k in range(2, 21):
        assert 0 < table[k] < 2 * 2.0**-k
        assert table.bound(k) >= 0
    for k in range(2, 8):
        direct, bound = prime_zeta_direct(k)
        assert abs(table[k] - direct) <= table.bound(k) + bound


def test_riemann_r():
    # pi(10^6) = 78498; R(10^6) is within 30 of it
    assert abs(riemann_r(1e6) - 78498) < 30
    # reference values from an arbitrary-precision evaluation
    assert riemann_r(1e8) == pytest.approx(5761551.86732017, abs=1e-6)
    assert riemann_r(1e6) == pytest.approx(78527.3994291277, abs=1e-8)


def test_euler_gamma():
    g = euler_gamma()
    assert g == pytest.approx(0.577215664902, abs=1e-12)
    assert abs(g - np.euler_gamma) < 1e-13
    assert math.exp(-g) == pytest.approx(0.561459483567, abs=1e-12)


def test_euler_gamma_defining_limit():
    n = 10**6
    h = math.fsum((1.0 / np.arange(1, n + 1, dtype=float)).tolist())
    assert abs((h - math.log(n)) - euler_gamma()) < 1e-6
