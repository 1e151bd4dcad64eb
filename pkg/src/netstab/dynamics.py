"""Sequential network formation process and reachability of stable networks.

Each round a pair (i, j) is selected.  If either can strictly gain by severing
a subset of its own links (the lower index is asked first), it does so and the
round ends.  Otherwise the link ij forms when it weakly benefits both and
strictly benefits at least one.  All payoffs are re-equilibrated.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Union

from .model import Edge, GuardError, Instance, Network
from .stability import (
    DEFAULT_EPS,
    MAX_SEVER_DEGREE,
    PayoffOracle,
    is_pairwise_nash_stable,
    severance_subsets,
)

MAX_REACHABILITY_AGENTS = 6


@dataclass(frozen=True)
class Severed:
    agent: int
    links: tuple[Edge, ...]


@dataclass(frozen=True)
class LinkFormed:
    i: int
    j: int


@dataclass(frozen=True)
class NoChange:
    pass


Action = Union[Severed, LinkFormed, NoChange]


@dataclass(frozen=True)
class FormationEvent:
    t: int
    pair: tuple[int, int]
    action: Action


@dataclass
class Trajectory:
    networks: list[Network]
    events: list[FormationEvent] = field(default_factory=list)
    reached: tuple[Network, int] | None = None

    @property
    def final(self) -> Network:
        return self.networks[-1]


def _oracle(instance: Instance, oracle: PayoffOracle | None, eps: float, exact: bool) -> PayoffOracle:
    if oracle is not None:
        return oracle
    return PayoffOracle(instance, eps=eps, exact=exact)


def best_profitable_severance(
    instance: Instance,
    network: Network,
    i: int,
    *,
    eps: float = DEFAULT_EPS,
    exact: bool = False,
    oracle: PayoffOracle | None = None,
    max_degree: int = MAX_SEVER_DEGREE,
) -> tuple[tuple[Edge, ...], float] | None:
    """Most profitable strictly improving severance for ``i``, or None.

    Equal gains resolve to the lexicographically smallest link subset.
    """
    oracle = _oracle(instance, oracle, eps, exact)
    d = len(network.links_of(i))
    if d > max_degree:
        raise GuardError(f"agent {i} has degree {d} > {max_degree}")
    best = None
    for sev in severance_subsets(network, i):
        g = oracle.gain(network, sev.apply(network), i)
        if g.sign <= 0:
            continue
        if best is None:
            best = (sev.links, g)
            continue
        cmp = _compare_gains(oracle, network, i, sev.links, g, best)
        if cmp > 0 or (cmp == 0 and sev.links < best[0]):
            best = (sev.links, g)
    if best is None:
        return None
    return best[0], best[1].value


def _compare_gains(oracle: PayoffOracle, network: Network, i: int, links, g, best) -> int:
    diff = g.value - best[1].value
    if not oracle.exact and abs(diff) >= oracle.eps:
        return (diff > 0) - (diff < 0)
    ex_new = oracle.payoffs_exact(network.remove(links))[i - 1]
    ex_old = oracle.payoffs_exact(network.remove(best[0]))[i - 1]
    return (ex_new > ex_old) - (ex_new < ex_old)


def mutual_link_beneficial(
    instance: Instance,
    network: Network,
    i: int,
    j: int,
    *,
    eps: float = DEFAULT_EPS,
    exact: bool = False,
    oracle: PayoffOracle | None = None,
) -> bool:
    if i == j or network.has_edge(i, j):
        raise ValueError(f"{i}-{j} is not a candidate link")
    oracle = _oracle(instance, oracle, eps, exact)
    after = network.add(i, j)
    si = oracle.gain(network, after, i).sign
    sj = oracle.gain(network, after, j).sign
    return si >= 0 and sj >= 0 and max(si, sj) > 0


def formation_step(
    instance: Instance,
    network: Network,
    pair: tuple[int, int],
    *,
    t: int = 0,
    eps: float = DEFAULT_EPS,
    exact: bool = False,
    oracle: PayoffOracle | None = None,
) -> tuple[Network, FormationEvent]:
    i, j = sorted(pair)
    if i == j:
        raise ValueError("a pair needs two distinct agents")
    network._check_agent(i)
    network._check_agent(j)
    oracle = _oracle(instance, oracle, eps, exact)
    for agent in (i, j):
        sev = best_profitable_severance(instance, network, agent, oracle=oracle)
        if sev is not None:
            return network.remove(sev[0]), FormationEvent(t, (i, j), Severed(agent, sev[0]))
    if not network.has_edge(i, j) and mutual_link_beneficial(instance, network, i, j, oracle=oracle):
        return network.add(i, j), FormationEvent(t, (i, j), LinkFormed(i, j))
    return network, FormationEvent(t, (i, j), NoChange())


def run_formation(
    instance: Instance,
    seed: int,
    t_max: int,
    *,
    eps: float = DEFAULT_EPS,
    exact: bool = False,
) -> Trajectory:
    """Simulate from the empty network with uniformly drawn pairs.

    Stops as soon as the current network is pairwise Nash stable (recording
    ``reached``) or after ``t_max`` rounds.
    """
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    rng = random.Random(seed)
    oracle = PayoffOracle(instance, eps=eps, exact=exact)
    pairs = list(combinations(range(1, instance.n + 1), 2))
    g = Network.empty(instance.n)
    traj = Trajectory(networks=[g])
    checked = None
    for t in range(t_max + 1):
        if g != checked:
            if is_pairwise_nash_stable(instance, g, oracle=oracle).stable:
                traj.reached = (g, t)
                return traj
            checked = g
        if t == t_max:
            break
        pair = pairs[rng.randrange(len(pairs))]
        g, event = formation_step(instance, g, pair, t=t, oracle=oracle)
        traj.networks.append(g)
        traj.events.append(event)
    return traj


def is_reachable(
    instance: Instance,
    target: Network,
    horizon: int,
    *,
    eps: float = DEFAULT_EPS,
    exact: bool = False,
    oracle: PayoffOracle | None = None,
) -> list[tuple[int, int]] | None:
    """Shortest pair sequence leading the process from the empty network to ``target``.

    Returns None when ``target`` is not pairwise Nash stable or is not reached
    within ``horizon`` rounds.  Pairs are tried in ascending order, so the
    witness is the lexicographically first among the shortest.
    """
    if target.n != instance.n:
        raise ValueError(f"target has {target.n} agents, instance has {instance.n}")
    if instance.n > MAX_REACHABILITY_AGENTS:
        raise GuardError(f"exhaustive reachability limited to n <= {MAX_REACHABILITY_AGENTS}")
    oracle = _oracle(instance, oracle, eps, exact)
    if not is_pairwise_nash_stable(instance, target, oracle=oracle).stable:
        return None
    start = Network.empty(instance.n)
    if start == target:
        return []
    pairs = list(combinations(range(1, instance.n + 1), 2))
    parent: dict[Network, tuple[Network, tuple[int, int]] | None] = {start: None}
    frontier = deque([(start, 0)])
    while frontier:
        g, depth = frontier.popleft()
        if depth >= horizon:
            continue
        for pair in pairs:
            nxt, _ = formation_step(instance, g, pair, oracle=oracle)
            if nxt in parent:
                continue
            parent[nxt] = (g, pair)
            if nxt == target:
                path = []
                node = nxt
                while parent[node] is not None:
                    prev, p = parent[node]
                    path.append(p)
                    node = prev
                return path[::-1]
            frontier.append((nxt, depth + 1))
    return None
