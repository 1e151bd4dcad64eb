"""Game data types, the equilibrium effort solver and payoff evaluation.

Agents are labelled 1..n everywhere in the public API.  Parameters are stored
as exact ``Fraction`` values so the float and rational paths share one source
of truth; float views are derived on demand.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

MAX_AGENTS = 64
RESIDUAL_TOL = 1e-10

Edge = tuple[int, int]


class ValidationError(ValueError):
    """Raised when an instance or network violates its invariants.

    ``field`` names the offending input so the CLI can report it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class GuardError(ValueError):
    """Raised when an input exceeds a size guard of an exhaustive routine."""


class ConditioningWarning(RuntimeWarning):
    pass


def to_fraction(value, name: str = "value") -> Fraction:
    """Convert ints, floats (exact binary value), Fractions and "p/q" strings."""
    if isinstance(value, bool):
        raise ValidationError(name, f"expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        if isinstance(value, float) and not np.isfinite(value):
            raise ValidationError(name, f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                p, q = int(num), int(den)
            except ValueError:
                raise ValidationError(name, f"malformed rational {value!r}") from None
            if q <= 0:
                raise ValidationError(name, f"denominator must be positive in {value!r}")
            return Fraction(p, q)
        try:
            return Fraction(text)
        except ValueError:
            raise ValidationError(name, f"malformed number {value!r}") from None
    raise ValidationError(name, f"unsupported type {type(value).__name__}")


@dataclass(frozen=True)
class Instance:
    """Game parameters: types ``theta``, spillover weight ``alpha``, link benefit ``delta``."""

    theta: tuple[Fraction, ...]
    alpha: Fraction
    delta: Fraction

    def __init__(self, theta: Iterable, alpha, delta):
        theta = tuple(to_fraction(t, f"theta[{k + 1}]") for k, t in enumerate(theta))
        alpha = to_fraction(alpha, "alpha")
        delta = to_fraction(delta, "delta")
        if not 1 <= len(theta) <= MAX_AGENTS:
            raise ValidationError("theta", f"agent count must be in [1, {MAX_AGENTS}], got {len(theta)}")
        for k, t in enumerate(theta):
            if t <= 0:
                raise ValidationError(f"theta[{k + 1}]", f"types must be positive, got {t}")
        if not 0 <= alpha < 1:
            raise ValidationError("alpha", f"must lie in [0, 1), got {alpha}")
        if delta < 0:
            raise ValidationError("delta", f"must be nonnegative, got {delta}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "delta", delta)

    @property
    def n(self) -> int:
        return len(self.theta)

    @cached_property
    def theta_array(self) -> np.ndarray:
        arr = np.array([float(t) for t in self.theta])
        arr.flags.writeable = False
        return arr

    @property
    def alpha_float(self) -> float:
        return float(self.alpha)

    @property
    def delta_float(self) -> float:
        return float(self.delta)

    def with_delta(self, delta) -> "Instance":
        return Instance(self.theta, self.alpha, delta)

    def permuted(self, perm: Sequence[int]) -> "Instance":
        """Relabel agents so that old agent ``i`` becomes ``perm[i-1]``."""
        theta = [None] * self.n
        for old, new in enumerate(perm, start=1):
            theta[new - 1] = self.theta[old - 1]
        return Instance(theta, self.alpha, self.delta)


@dataclass(frozen=True)
class Network:
    """Undirected simple graph on agents 1..n; edges stored as sorted pairs."""

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= MAX_AGENTS:
            raise ValidationError("n", f"agent count must be an integer in [1, {MAX_AGENTS}], got {n!r}")
        normalized = set()
        for e in edges:
            if len(e) != 2:
                raise ValidationError("edges", f"edge must have two endpoints, got {list(e)}")
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise ValidationError("edges", f"self-loop at agent {i}")
            for v in (i, j):
                if not 1 <= v <= n:
                    raise ValidationError("edges", f"endpoint {v} outside [1, {n}]")
            pair = (min(i, j), max(i, j))
            if pair in normalized:
                raise ValidationError("edges", f"duplicate edge {list(pair)}")
            normalized.add(pair)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def empty(cls, n: int) -> "Network":
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> "Network":
        return cls(n, combinations(range(1, n + 1), 2))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def links_of(self, i: int) -> list[Edge]:
        """Edges incident to ``i`` in canonical (sorted) order."""
        self._check_agent(i)
        return sorted(e for e in self.edges if i in e)

    def degree(self, i: int) -> int:
        return len(neighbors(self, i))

    def add(self, i: int, j: int) -> "Network":
        return Network(self.n, self.edges | {(min(i, j), max(i, j))})

    def remove(self, links: Iterable[Edge]) -> "Network":
        drop = {(min(e), max(e)) for e in links}
        return Network(self.n, self.edges - drop)

    def permuted(self, perm: Sequence[int]) -> "Network":
        return Network(self.n, ((perm[i - 1], perm[j - 1]) for i, j in self.edges))

    def _check_agent(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise IndexError(f"agent {i} outside [1, {self.n}]")

    def __str__(self) -> str:
        return "{" + ", ".join(f"{i}{j}" if self.n < 10 else f"{i}-{j}" for i, j in self.sorted_edges()) + "}"


def neighbors(network: Network, i: int) -> set[int]:
    network._check_agent(i)
    out = set()
    for a, b in network.edges:
        if a == i:
            out.add(b)
        elif b == i:
            out.add(a)
    return out


def _check_profile(instance: Instance, network: Network, efforts) -> None:
    if network.n != instance.n:
        raise ValueError(f"network has {network.n} agents, instance has {instance.n}")
    if len(efforts) != instance.n:
        raise ValueError(f"effort profile has length {len(efforts)}, expected {instance.n}")


def best_response(instance: Instance, network: Network, i: int, efforts: Sequence[float]) -> float:
    """Agent ``i``'s payoff-maximizing effort given the others' efforts."""
    _check_profile(instance, network, efforts)
    nbrs = neighbors(network, i)
    theta_i = instance.theta_array[i - 1]
    if not nbrs:
        return float(theta_i)
    a = instance.alpha_float
    mean = sum(efforts[j - 1] for j in nbrs) / len(nbrs)
    return (1 - a) * theta_i + a * mean


def spillover_matrix(network: Network) -> np.ndarray:
    """Row-normalized adjacency; isolated agents get zero rows."""
    P = np.zeros((network.n, network.n))
    for i, j in network.edges:
        P[i - 1, j - 1] = 1.0
        P[j - 1, i - 1] = 1.0
    deg = P.sum(axis=1)
    nz = deg > 0
    P[nz] /= deg[nz, None]
    return P


def equilibrium_efforts(instance: Instance, network: Network) -> np.ndarray:
    """Unique Nash effort profile on ``network``.

    Solves ``(I - alpha P) y = b`` with ``b_i = (1 - alpha) theta_i`` for agents
    with links and ``b_i = theta_i`` (identity row) for isolated agents.
    Warns with :class:`ConditioningWarning` if the fixed-point residual
    exceeds ``RESIDUAL_TOL``.
    """
    if network.n != instance.n:
        raise ValueError(f"network has {network.n} agents, instance has {instance.n}")
    a = instance.alpha_float
    theta = instance.theta_array
    P = spillover_matrix(network)
    linked = P.sum(axis=1) > 0
    A = np.eye(instance.n) - a * P
    b = np.where(linked, (1 - a) * theta, theta)
    y = np.linalg.solve(A, b)
    residual = fixed_point_residual(instance, network, y, P=P)
    if residual > RESIDUAL_TOL:
        warnings.warn(f"equilibrium residual {residual:.3e} exceeds {RESIDUAL_TOL:g}", ConditioningWarning, stacklevel=2)
    return y


def fixed_point_residual(instance: Instance, network: Network, efforts, P: np.ndarray | None = None) -> float:
    """max_i |y_i - BR_i(y)|."""
    if P is None:
        P = spillover_matrix(network)
    y = np.asarray(efforts, dtype=float)
    a = instance.alpha_float
    theta = instance.theta_array
    linked = P.sum(axis=1) > 0
    br = np.where(linked, (1 - a) * theta + a * (P @ y), theta)
    return float(np.max(np.abs(y - br))) if len(y) else 0.0


def best_response_iteration(
    instance: Instance,
    network: Network,
    start: Sequence[float],
    tol: float = 1e-12,
    max_iter: int = 100_000,
) -> tuple[np.ndarray, int]:
    """Synchronous best-response updates from ``start`` until the step is below ``tol``.

    Returns the final profile and the number of iterations used.
    """
    P = spillover_matrix(network)
    a = instance.alpha_float
    theta = instance.theta_array
    linked = P.sum(axis=1) > 0
    base = np.where(linked, (1 - a) * theta, theta)
    weight = np.where(linked, a, 0.0)[:, None] * P
    y = np.array(start, dtype=float)
    for it in range(1, max_iter + 1):
        nxt = base + weight @ y
        step = np.max(np.abs(nxt - y))
        y = nxt
        if step < tol:
            return y, it
    return y, max_iter


def utility(instance: Instance, network: Network, efforts: Sequence[float], i: int) -> float:
    """Payoff of agent ``i`` at an arbitrary effort profile."""
    _check_profile(instance, network, efforts)
    nbrs = neighbors(network, i)
    theta_i = float(instance.theta[i - 1])
    y_i = float(efforts[i - 1])
    if not nbrs:
        return theta_i * y_i - y_i * y_i / 2
    a = instance.alpha_float
    d = len(nbrs)
    link_terms = sum(instance.delta_float + a * y_i * float(efforts[j - 1]) / d for j in sorted(nbrs))
    return (1 - a) * theta_i * y_i - y_i * y_i / 2 + link_terms


def payoffs(instance: Instance, network: Network) -> np.ndarray:
    """Payoffs of all agents at the equilibrium efforts of ``network``."""
    y = equilibrium_efforts(instance, network)
    return np.array([utility(instance, network, y, i) for i in range(1, instance.n + 1)])
