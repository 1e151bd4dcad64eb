"""Exact rational replica of the equilibrium solve and payoffs.

Used as a differential oracle for the float path and as the final arbiter of
strict-inequality decisions whose float margin is too small to trust.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .model import Instance, Network, equilibrium_efforts, neighbors


def solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals.

    Pivots on the first nonzero entry of each column; magnitude does not matter
    for exact arithmetic.
    """
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        if pivot != col:
            M[col], M[pivot] = M[pivot], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def equilibrium_efforts_exact(instance: Instance, network: Network) -> list[Fraction]:
    n = instance.n
    a = instance.alpha
    A = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
    b = []
    for i in range(1, n + 1):
        nbrs = neighbors(network, i)
        if nbrs:
            for j in nbrs:
                A[i - 1][j - 1] -= a / len(nbrs)
            b.append((1 - a) * instance.theta[i - 1])
        else:
            b.append(instance.theta[i - 1])
    return solve_exact(A, b)


def utility_exact(instance: Instance, network: Network, efforts: list[Fraction], i: int) -> Fraction:
    nbrs = neighbors(network, i)
    theta_i = instance.theta[i - 1]
    y_i = efforts[i - 1]
    if not nbrs:
        return theta_i * y_i - y_i * y_i / 2
    a, d = instance.alpha, len(nbrs)
    total = (1 - a) * theta_i * y_i - y_i * y_i / 2
    for j in nbrs:
        total += instance.delta + a * y_i * efforts[j - 1] / d
    return total


def payoffs_exact(instance: Instance, network: Network) -> list[Fraction]:
    y = equilibrium_efforts_exact(instance, network)
    return [utility_exact(instance, network, y, i) for i in range(1, instance.n + 1)]


def compare_exact_float(instance: Instance, network: Network) -> float:
    """Largest gap between the float solve and the rational solve rounded to double."""
    y_float = equilibrium_efforts(instance, network)
    y_exact = np.array([float(v) for v in equilibrium_efforts_exact(instance, network)])
    return float(np.max(np.abs(y_float - y_exact)))
