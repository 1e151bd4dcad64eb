import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy

from netstab import Instance, Network

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# Independent exact oracle: sympy rational solve + payoff formula written out
# again here, sharing nothing with netstab.exact.


def oracle_efforts(theta, alpha, edges, n):
    alpha = sympy.Rational(str(alpha))
    nbrs = {i: [] for i in range(1, n + 1)}
    for i, j in edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    A = sympy.eye(n)
    b = sympy.zeros(n, 1)
    for i in range(1, n + 1):
        t = sympy.Rational(str(theta[i - 1]))
        if nbrs[i]:
            for j in nbrs[i]:
                A[i - 1, j - 1] -= alpha / len(nbrs[i])
            b[i - 1] = (1 - alpha) * t
        else:
            b[i - 1] = t
    y = A.LUsolve(b)
    return [Fraction(int(v.p), int(v.q)) for v in y], nbrs


def oracle_payoffs(theta, alpha, delta, edges, n):
    y, nbrs = oracle_efforts(theta, alpha, edges, n)
    alpha, delta = Fraction(alpha), Fraction(delta)
    out = []
    for i in range(1, n + 1):
        t, yi = Fraction(theta[i - 1]), y[i - 1]
        if not nbrs[i]:
            out.append(t * yi - yi * yi / 2)
        else:
            d = len(nbrs[i])
            out.append((1 - alpha) * t * yi - yi * yi / 2 + sum(delta + alpha * yi * y[j - 1] / d for j in nbrs[i]))
    return out


def oracle_stable(instance: Instance, network: Network) -> bool:
    """Brute force: every non-edge and every nonempty severance subset."""
    n = instance.n
    edges = set(network.edges)
    args = (instance.theta, instance.alpha, instance.delta)
    base = oracle_payoffs(*args, edges, n)
    for i, j in combinations(range(1, n + 1), 2):
        if (i, j) in edges:
            continue
        new = oracle_payoffs(*args, edges | {(i, j)}, n)
        gi, gj = new[i - 1] - base[i - 1], new[j - 1] - base[j - 1]
        if (gi > 0 and gj >= 0) or (gj > 0 and gi >= 0):
            return False
    for i in range(1, n + 1):
        mine = [e for e in edges if i in e]
        for r in range(1, len(mine) + 1):
            for L in combinations(mine, r):
                new = oracle_payoffs(*args, edges - set(L), n)
                if new[i - 1] > base[i - 1]:
                    return False
    return True


# ---------------------------------------------------------------------------
# Seeded random corpus shared by the property-style acceptance checks.


def random_instance(rng: random.Random, n: int | None = None, alpha_max: int = 99) -> tuple[Instance, Network]:
    n = n or rng.randint(1, 6)
    theta = [Fraction(rng.randint(1, 100_000), 1000) for _ in range(n)]
    alpha = Fraction(rng.randint(0, alpha_max), 100)
    delta = Fraction(rng.randint(0, 4000), 100)
    p = rng.random()
    edges = [e for e in combinations(range(1, n + 1), 2) if rng.random() < p]
    return Instance(theta, alpha, delta), Network(n, edges)


def make_corpus(size: int = 1000, seed: int = 20261019):
    rng = random.Random(seed)
    return [random_instance(rng) for _ in range(size)]


@pytest.fixture(scope="session")
def corpus():
    return make_corpus()


@pytest.fixture
def fig2():
    return Instance([20, 10, 11, 13], "2/3", 75), Network(4, [(1, 2), (3, 4)])


@pytest.fixture
def fig3():
    return Instance([20, 10, 11, 13, 19], "2/3", 75), Network(5, [(1, 2), (3, 4)])


@pytest.fixture
def prop1():
    return Instance([20, 17, 11], "1/3", 15), Network(3, [(1, 2), (1, 3)])
