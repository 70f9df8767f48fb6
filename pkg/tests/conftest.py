import math

import pytest

from multmean.primes import trial_factorize

ACCEPTANCE_LINES = []


def naive_primes(limit):
    """Primes by trial division, independent of the sieve."""
    out = []
    for n in range(2, limit + 1):
        if all(n % d for d in range(2, math.isqrt(n) + 1)):
            out.append(n)
    return out


def naive_value(rule, m):
    """g(m) from a trial-division factorization."""
    out = 1.0
    for p, a in trial_factorize(m).factors:
        out *= float(rule(p, a))
    return out


@pytest.fixture(scope="session")
def small_primes():
    return naive_primes(10_000)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
