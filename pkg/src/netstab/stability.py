"""Pairwise Nash stability, local completeness and the partner-monotonicity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence, Union

import numpy as np

from .exact import equilibrium_efforts_exact, payoffs_exact, utility_exact
from .model import (
    Edge,
    GuardError,
    Instance,
    Network,
    equilibrium_efforts,
    neighbors,
    payoffs,
    utility,
)

DEFAULT_EPS = 1e-6
MAX_SEVER_DEGREE = 16


@dataclass(frozen=True)
class AddLink:
    i: int
    j: int

    def apply(self, network: Network) -> Network:
        return network.add(self.i, self.j)

    @property
    def agents(self) -> tuple[int, ...]:
        return (self.i, self.j)

    def __str__(self) -> str:
        return f"add {self.i}-{self.j}"


@dataclass(frozen=True)
class Sever:
    i: int
    links: tuple[Edge, ...]

    def apply(self, network: Network) -> Network:
        return network.remove(self.links)

    @property
    def agents(self) -> tuple[int, ...]:
        return (self.i,)

    def __str__(self) -> str:
        return f"{self.i} severs " + ",".join(f"{a}-{b}" for a, b in self.links)


Deviation = Union[AddLink, Sever]


@dataclass(frozen=True)
class Escalation:
    """A gain whose float margin fell below eps and was re-decided exactly."""

    before: Network
    after: Network
    agent: int
    float_gain: float
    exact_gain: Fraction

    @property
    def disagrees(self) -> bool:
        return _sign(self.float_gain) != _sign(self.exact_gain)


@dataclass(frozen=True)
class Gain:
    value: float
    sign: int
    exact: Fraction | None = None


def _sign(x) -> int:
    return (x > 0) - (x < 0)


class PayoffOracle:
    """Caches re-equilibrated payoffs per network and decides gain signs.

    A gain whose float magnitude is below ``eps`` (or every gain, when
    ``exact`` is set) has its sign decided by rational arithmetic.
    """

    def __init__(self, instance: Instance, eps: float = DEFAULT_EPS, exact: bool = False):
        self.instance = instance
        self.eps = eps
        self.exact = exact
        self._float: dict[Network, np.ndarray] = {}
        self._exact: dict[Network, list[Fraction]] = {}
        self.escalations: list[Escalation] = []

    def payoffs(self, network: Network) -> np.ndarray:
        out = self._float.get(network)
        if out is None:
            out = self._float[network] = payoffs(self.instance, network)
        return out

    def payoffs_exact(self, network: Network) -> list[Fraction]:
        out = self._exact.get(network)
        if out is None:
            out = self._exact[network] = payoffs_exact(self.instance, network)
        return out

    def gain(self, before: Network, after: Network, i: int) -> Gain:
        value = float(self.payoffs(after)[i - 1] - self.payoffs(before)[i - 1])
        if not self.exact and abs(value) >= self.eps:
            return Gain(value, _sign(value))
        exact = self.payoffs_exact(after)[i - 1] - self.payoffs_exact(before)[i - 1]
        if not self.exact:
            self.escalations.append(Escalation(before, after, i, value, exact))
        return Gain(value, _sign(exact), exact)


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    witness: Deviation | None = None
    deltas: dict[int, float] = field(default_factory=dict)
    exact_deltas: dict[int, Fraction] = field(default_factory=dict)
    min_margin: float = float("inf")
    escalations: tuple[Escalation, ...] = ()

    @property
    def disagreements(self) -> tuple[Escalation, ...]:
        return tuple(e for e in self.escalations if e.disagrees)


@dataclass(frozen=True)
class LocalCompletenessReport:
    locally_complete: bool
    violation: tuple[int, int, int] | None = None
    missing: Edge | None = None


def interval_agents(theta: Sequence, i: int, j: int) -> set[int]:
    """Agents whose type lies in the closed interval spanned by ``i`` and ``j``."""
    for v in (i, j):
        if not 1 <= v <= len(theta):
            raise IndexError(f"agent {v} outside [1, {len(theta)}]")
    lo, hi = sorted((theta[i - 1], theta[j - 1]))
    return {k for k in range(1, len(theta) + 1) if lo <= theta[k - 1] <= hi}


def is_locally_complete(network: Network, theta: Sequence) -> LocalCompletenessReport:
    if len(theta) != network.n:
        raise ValueError(f"theta has length {len(theta)}, network has {network.n} agents")
    for i, j in network.sorted_edges():
        if theta[i - 1] > theta[j - 1]:
            i, j = j, i
        block = sorted(interval_agents(theta, i, j))
        for a, b in combinations(block, 2):
            if not network.has_edge(a, b):
                k = a if a not in (i, j) else b
                return LocalCompletenessReport(False, (i, j, k), (a, b))
    return LocalCompletenessReport(True)


def enumerate_deviations(network: Network, max_degree: int = MAX_SEVER_DEGREE) -> list[Deviation]:
    """All link additions, then all nonempty severance subsets, in canonical order."""
    return list(_iter_deviations(network, max_degree))


def _iter_deviations(network: Network, max_degree: int = MAX_SEVER_DEGREE) -> Iterator[Deviation]:
    for i in range(1, network.n + 1):
        d = len(network.links_of(i))
        if d > max_degree:
            raise GuardError(f"agent {i} has degree {d} > {max_degree}; severance enumeration refused")
    for i, j in combinations(range(1, network.n + 1), 2):
        if not network.has_edge(i, j):
            yield AddLink(i, j)
    for i in range(1, network.n + 1):
        yield from severance_subsets(network, i)


def severance_subsets(network: Network, i: int) -> Iterator[Sever]:
    links = network.links_of(i)
    for mask in range(1, 1 << len(links)):
        yield Sever(i, tuple(links[b] for b in range(len(links)) if mask >> b & 1))


def is_pairwise_nash_stable(
    instance: Instance,
    network: Network,
    *,
    eps: float = DEFAULT_EPS,
    exact: bool = False,
    oracle: PayoffOracle | None = None,
    max_degree: int = MAX_SEVER_DEGREE,
) -> StabilityReport:
    """Check every deviation in canonical order; the first blocking one is the witness.

    A non-edge ``ij`` blocks when both agents weakly gain and at least one
    strictly gains.  A severance blocks when the severing agent strictly gains.
    """
    if network.n != instance.n:
        raise ValueError(f"network has {network.n} agents, instance has {instance.n}")
    if oracle is None:
        oracle = PayoffOracle(instance, eps=eps, exact=exact)
    start = len(oracle.escalations)
    min_margin = float("inf")
    for dev in _iter_deviations(network, max_degree):
        after = dev.apply(network)
        gains = {a: oracle.gain(network, after, a) for a in dev.agents}
        min_margin = min([min_margin] + [abs(g.value) for g in gains.values()])
        signs = [g.sign for g in gains.values()]
        if isinstance(dev, AddLink):
            blocking = min(signs) >= 0 and max(signs) > 0
        else:
            blocking = signs[0] > 0
        if blocking:
            return StabilityReport(
                stable=False,
                witness=dev,
                deltas={a: g.value for a, g in gains.items()},
                exact_deltas={a: g.exact for a, g in gains.items() if g.exact is not None},
                min_margin=min_margin,
                escalations=tuple(oracle.escalations[start:]),
            )
    return StabilityReport(True, min_margin=min_margin, escalations=tuple(oracle.escalations[start:]))


@dataclass(frozen=True)
class Lemma2Report:
    """Agent ``i`` linking to ``j`` versus to the higher type ``k``.

    The claim under test is ``U_i(g+ik) > U_i(g+ij)`` and
    ``y_i(g+ik) > y_i(g+ij)``; a flag is set when the strict ordering fails.
    """

    i: int
    j: int
    k: int
    utility_with_j: float
    utility_with_k: float
    effort_with_j: float
    effort_with_k: float
    utility_order_violated: bool
    effort_order_violated: bool
    exact: bool = False


def _check_triple(instance: Instance, network: Network, i: int, j: int, k: int, *, ordered: bool) -> None:
    for v in (i, j, k):
        network._check_agent(v)
    if len({i, j, k}) != 3:
        raise ValueError(f"agents i={i}, j={j}, k={k} must be distinct")
    if ordered and not instance.theta[k - 1] > instance.theta[j - 1]:
        raise ValueError(f"requires theta_k > theta_j, got theta_{k}={instance.theta[k - 1]}, theta_{j}={instance.theta[j - 1]}")
    for v in (j, k):
        if network.has_edge(i, v):
            raise ValueError(f"link {i}-{v} already present")


def lemma2_violation(
    instance: Instance,
    network: Network,
    i: int,
    j: int,
    k: int,
    *,
    eps: float = DEFAULT_EPS,
    exact: bool = False,
) -> Lemma2Report:
    _check_triple(instance, network, i, j, k, ordered=True)
    g_j, g_k = network.add(i, j), network.add(i, k)
    y_j, y_k = equilibrium_efforts(instance, g_j), equilibrium_efforts(instance, g_k)
    u_j, u_k = utility(instance, g_j, y_j, i), utility(instance, g_k, y_k, i)
    du, dy = u_k - u_j, y_k[i - 1] - y_j[i - 1]
    used_exact = bool(exact or abs(du) < eps or abs(dy) < eps)
    if used_exact:
        ye_j, ye_k = equilibrium_efforts_exact(instance, g_j), equilibrium_efforts_exact(instance, g_k)
        du = utility_exact(instance, g_k, ye_k, i) - utility_exact(instance, g_j, ye_j, i)
        dy = ye_k[i - 1] - ye_j[i - 1]
    return Lemma2Report(
        i, j, k,
        utility_with_j=float(u_j),
        utility_with_k=float(u_k),
        effort_with_j=float(y_j[i - 1]),
        effort_with_k=float(y_k[i - 1]),
        utility_order_violated=not du > 0,
        effort_order_violated=not dy > 0,
        exact=used_exact,
    )


def myopic_utility(instance: Instance, network: Network, frozen, i: int, partner: int, *, exact: bool = False):
    """Utility of ``i`` after adding ``i-partner`` with everyone else's effort frozen.

    ``i`` best-responds to the frozen efforts of its new neighbourhood.
    """
    g = network.add(i, partner)
    nbrs = neighbors(g, i)
    y = list(frozen)
    if exact:
        a, theta = instance.alpha, instance.theta[i - 1]
    else:
        a, theta = instance.alpha_float, float(instance.theta[i - 1])
    y[i - 1] = (1 - a) * theta + a * sum(y[m - 1] for m in nbrs) / len(nbrs)
    if exact:
        return utility_exact(instance, g, y, i)
    return utility(instance, g, y, i)


def myopic_link_preference(
    instance: Instance,
    network: Network,
    i: int,
    j: int,
    k: int,
    *,
    eps: float = DEFAULT_EPS,
) -> int:
    """Partner ``i`` prefers when others' efforts stay at their current equilibrium.

    Ties go to the lower index.
    """
    _check_triple(instance, network, i, j, k, ordered=False)
    frozen = equilibrium_efforts(instance, network)
    u_j = myopic_utility(instance, network, frozen, i, j)
    u_k = myopic_utility(instance, network, frozen, i, k)
    diff = u_j - u_k
    if abs(diff) < eps:
        frozen_exact = equilibrium_efforts_exact(instance, network)
        diff = myopic_utility(instance, network, frozen_exact, i, j, exact=True) - myopic_utility(
            instance, network, frozen_exact, i, k, exact=True
        )
    if diff > 0:
        return j
    if diff < 0:
        return k
    return min(j, k)
