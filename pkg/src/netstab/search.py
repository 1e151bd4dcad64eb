"""Counterexample mining over parameter grids and labeled networks.

Hits are re-verified with rational arithmetic before they are emitted, so a
record never rests on a float comparison.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, islice, permutations, product
from typing import Iterator, Sequence

from .dynamics import formation_step, is_reachable
from .model import GuardError, Instance, Network, to_fraction
from .stability import (
    DEFAULT_EPS,
    LocalCompletenessReport,
    Lemma2Report,
    PayoffOracle,
    StabilityReport,
    is_locally_complete,
    is_pairwise_nash_stable,
    lemma2_violation,
)

log = logging.getLogger(__name__)

MAX_ENUMERATION_AGENTS = 6
PROP1 = "prop1"
LEMMA2 = "lemma2"


@dataclass(frozen=True)
class SearchSpace:
    """Parameter grid (or random sampler) plus the networks to examine.

    ``theta_grid`` holds one list of candidate types per agent; in ``random``
    mode types are drawn uniformly from ``theta_bounds`` instead.  ``networks``
    defaults to every labeled graph on ``n`` agents.
    """

    n: int
    alpha_grid: tuple[Fraction, ...]
    delta_grid: tuple[Fraction, ...]
    theta_grid: tuple[tuple[Fraction, ...], ...] | None = None
    theta_bounds: tuple[Fraction, Fraction] | None = None
    mode: str = "grid"
    seed: int = 0
    max_instances: int = 100_000
    networks: tuple[Network, ...] | None = None
    reachability: bool = False
    horizon: int = 8
    eps: float = DEFAULT_EPS
    workers: int = 1

    def __post_init__(self):
        conv = object.__setattr__
        conv(self, "alpha_grid", tuple(to_fraction(a, "alpha_grid") for a in self.alpha_grid))
        conv(self, "delta_grid", tuple(to_fraction(d, "delta_grid") for d in self.delta_grid))
        if self.mode not in ("grid", "random"):
            raise ValueError(f"mode must be 'grid' or 'random', got {self.mode!r}")
        if self.theta_grid is not None:
            if len(self.theta_grid) != self.n:
                raise ValueError(f"theta_grid needs {self.n} per-agent lists, got {len(self.theta_grid)}")
            conv(self, "theta_grid", tuple(
                tuple(to_fraction(t, f"theta_grid[{k + 1}]") for t in vals) for k, vals in enumerate(self.theta_grid)
            ))
        if self.theta_bounds is not None:
            lo, hi = (to_fraction(b, "theta_bounds") for b in self.theta_bounds)
            if not 0 <= lo < hi:
                raise ValueError("theta_bounds must satisfy 0 <= low < high")
            conv(self, "theta_bounds", (lo, hi))
        if self.mode == "grid" and self.theta_grid is None:
            raise ValueError("grid mode needs theta_grid")
        if self.mode == "random" and self.theta_bounds is None:
            raise ValueError("random mode needs theta_bounds")
        if not self.alpha_grid or not self.delta_grid:
            raise ValueError("alpha_grid and delta_grid must be nonempty")
        # validates alpha/delta/theta against the instance invariants
        for a, d in product(self.alpha_grid, self.delta_grid):
            Instance([1] * self.n, a, d)
        for vals in self.theta_grid or ():
            Instance(vals or [1], 0, 0)
        if self.networks is not None:
            for g in self.networks:
                if g.n != self.n:
                    raise ValueError(f"base network on {g.n} agents, space has n={self.n}")

    def grid_size(self) -> int:
        if self.mode == "random":
            return self.max_instances
        size = len(self.alpha_grid) * len(self.delta_grid)
        for vals in self.theta_grid:
            size *= len(vals)
        return size

    def instances(self) -> Iterator[Instance]:
        """Instances in canonical order (theta grid outermost, then alpha, then delta)."""
        if self.mode == "grid":
            if self.grid_size() > self.max_instances:
                log.warning("search budget exhausted: grid has %d instances, only %d examined",
                            self.grid_size(), self.max_instances)
            it = (
                Instance(theta, a, d)
                for theta in product(*self.theta_grid)
                for a in self.alpha_grid
                for d in self.delta_grid
            )
            yield from islice(it, self.max_instances)
            return
        rng = random.Random(self.seed)
        lo, hi = self.theta_bounds
        for _ in range(self.max_instances):
            theta = []
            for _ in range(self.n):
                # (lo, hi] on a 1/1000 lattice
                ticks = rng.randint(1, int((hi - lo) * 1000))
                theta.append(lo + Fraction(ticks, 1000))
            yield Instance(theta, rng.choice(self.alpha_grid), rng.choice(self.delta_grid))

    def base_networks(self) -> Sequence[Network]:
        return self.networks if self.networks is not None else enumerate_networks(self.n)


@dataclass(frozen=True)
class CounterexampleRecord:
    kind: str
    instance: Instance
    network: Network
    stability: StabilityReport | None = None
    local: LocalCompletenessReport | None = None
    lemma2: Lemma2Report | None = None
    reachable: tuple[tuple[int, int], ...] | None = None
    exact_verified: bool = False
    float_margin: float = field(default=float("inf"), compare=False)


def enumerate_networks(n: int) -> list[Network]:
    """All labeled simple graphs on ``n`` agents; bit b of the index selects the b-th pair."""
    if not 1 <= n <= MAX_ENUMERATION_AGENTS:
        raise GuardError(f"network enumeration limited to 1 <= n <= {MAX_ENUMERATION_AGENTS}, got {n}")
    pairs = list(combinations(range(1, n + 1), 2))
    return [
        Network(n, [p for b, p in enumerate(pairs) if mask >> b & 1])
        for mask in range(1 << len(pairs))
    ]


def _map(fn, items, workers: int):
    if workers <= 1:
        return map(fn, items)
    pool = ProcessPoolExecutor(max_workers=workers)
    try:
        # map preserves input order, so output stays canonical
        return list(pool.map(fn, items, chunksize=16))
    finally:
        pool.shutdown()


def _prop1_for_instance(args) -> list[CounterexampleRecord]:
    space, instance = args
    out = []
    oracle = PayoffOracle(instance, eps=space.eps)
    for g in space.base_networks():
        local = is_locally_complete(g, instance.theta)
        if local.locally_complete:
            continue
        report = is_pairwise_nash_stable(instance, g, oracle=oracle)
        if not report.stable:
            continue
        exact_report = is_pairwise_nash_stable(instance, g, exact=True)
        if not exact_report.stable:
            log.info("float-stable network %s rejected by exact check for %s", g, instance)
            continue
        reach = None
        if space.reachability and instance.n <= 6:
            path = is_reachable(instance, g, space.horizon, exact=True)
            reach = tuple(path) if path is not None else None
        out.append(CounterexampleRecord(
            PROP1, instance, g, stability=exact_report, local=local, reachable=reach,
            exact_verified=True, float_margin=report.min_margin,
        ))
    return out


def find_prop1_counterexamples(space: SearchSpace) -> list[CounterexampleRecord]:
    """Stable networks that are not locally complete, exact-verified."""
    records = []
    for batch in _map(_prop1_for_instance, ((space, inst) for inst in space.instances()), space.workers):
        records.extend(batch)
    return records


def _lemma2_for_instance(args) -> list[CounterexampleRecord]:
    space, instance = args
    out = []
    theta = instance.theta
    agents = range(1, instance.n + 1)
    for g in space.base_networks():
        for i, j, k in permutations(agents, 3):
            if not theta[k - 1] > theta[j - 1] or g.has_edge(i, j) or g.has_edge(i, k):
                continue
            rep = lemma2_violation(instance, g, i, j, k, eps=space.eps)
            if not (rep.utility_order_violated or rep.effort_order_violated):
                continue
            exact_rep = lemma2_violation(instance, g, i, j, k, exact=True)
            if not (exact_rep.utility_order_violated or exact_rep.effort_order_violated):
                continue
            out.append(CounterexampleRecord(LEMMA2, instance, g, lemma2=exact_rep, exact_verified=True))
    return out


def find_lemma2_counterexamples(space: SearchSpace) -> list[CounterexampleRecord]:
    """Triples where linking to the higher type is not strictly better, exact-verified."""
    records = []
    for batch in _map(_lemma2_for_instance, ((space, inst) for inst in space.instances()), space.workers):
        records.extend(batch)
    return records


def replay_pairs(instance: Instance, pairs, *, exact: bool = True) -> Network:
    """Apply a pair sequence through the formation process from the empty network."""
    g = Network.empty(instance.n)
    oracle = PayoffOracle(instance, exact=exact)
    for t, pair in enumerate(pairs):
        g, _ = formation_step(instance, g, tuple(pair), t=t, oracle=oracle)
    return g


def verify_record(record: CounterexampleRecord) -> bool:
    """Recompute every claim in ``record`` with exact arithmetic.

    Mismatches are logged; the record itself is never modified.
    """
    problems = []
    inst, g = record.instance, record.network
    if record.kind == PROP1:
        stab = is_pairwise_nash_stable(inst, g, exact=True)
        local = is_locally_complete(g, inst.theta)
        if record.stability is None or record.stability.stable != stab.stable:
            problems.append("stability flag does not reproduce")
        if not stab.stable:
            problems.append(f"network is not stable: {stab.witness}")
        if record.local is None or record.local != local:
            problems.append("local completeness report does not reproduce")
        if local.locally_complete:
            problems.append("network is locally complete")
        if record.reachable is not None:
            if replay_pairs(inst, record.reachable) != g:
                problems.append("reachability witness does not replay to the network")
    elif record.kind == LEMMA2:
        rep = record.lemma2
        if rep is None:
            problems.append("missing lemma2 evidence")
        else:
            if not inst.theta[rep.k - 1] > inst.theta[rep.j - 1]:
                problems.append("theta_k > theta_j does not hold")
            fresh = lemma2_violation(inst, g, rep.i, rep.j, rep.k, exact=True)
            if (fresh.utility_order_violated, fresh.effort_order_violated) != (
                rep.utility_order_violated, rep.effort_order_violated
            ):
                problems.append("violation flags do not reproduce")
            if not (fresh.utility_order_violated or fresh.effort_order_violated):
                problems.append("no ordering violated")
    else:
        problems.append(f"unknown record kind {record.kind!r}")
    if not record.exact_verified:
        problems.append("record not marked exact-verified")
    for p in problems:
        log.warning("record %s on %s: %s", record.kind, g, p)
    return not problems


def canonical_prop1_space(**overrides) -> SearchSpace:
    """Three-agent grid used for the headline counterexample.

    Keeps the top type at 20 and scans the two other types over 10..18, since
    the stable window in delta is narrow and does not open at (20, 10, 11).
    """
    kwargs = dict(
        n=3,
        theta_grid=((20,), tuple(range(10, 19)), tuple(range(10, 19))),
        alpha_grid=("1/3", "1/2", "2/3"),
        delta_grid=tuple(Fraction(5, 2) * k for k in range(13)),
        reachability=True,
        horizon=4,
    )
    kwargs.update(overrides)
    return SearchSpace(**kwargs)
