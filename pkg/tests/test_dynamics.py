import random
from fractions import Fraction

import pytest

from netstab import (
    Instance,
    Network,
    best_profitable_severance,
    formation_step,
    is_pairwise_nash_stable,
    is_reachable,
    mutual_link_beneficial,
    payoffs,
    run_formation,
)
from netstab.dynamics import LinkFormed, NoChange, Severed
from netstab.exact import payoffs_exact
from netstab.model import GuardError
from netstab.search import replay_pairs

from conftest import oracle_payoffs, random_instance

# agent 1 on {12, 13}: dropping 1-2 gains 127/25, dropping both gains 102/25,
# dropping 1-3 loses (values from the sympy oracle)
SEVER_FIXTURE = Instance([8, 4, 8], "2/3", 1)


def test_severance_fixture_values_from_oracle():
    g = {(1, 2), (1, 3)}
    args = (SEVER_FIXTURE.theta, SEVER_FIXTURE.alpha, SEVER_FIXTURE.delta)
    base = oracle_payoffs(*args, g, 3)[0]
    assert oracle_payoffs(*args, {(1, 3)}, 3)[0] - base == Fraction(127, 25)
    assert oracle_payoffs(*args, set(), 3)[0] - base == Fraction(102, 25)
    assert oracle_payoffs(*args, {(1, 2)}, 3)[0] - base < 0


def test_best_profitable_severance_picks_largest_gain():
    links, gain = best_profitable_severance(SEVER_FIXTURE, Network(3, [(1, 2), (1, 3)]), 1)
    assert links == ((1, 2),)
    assert gain == pytest.approx(127 / 25, abs=1e-9)


def test_no_severance_without_links():
    assert best_profitable_severance(SEVER_FIXTURE, Network(3, [(2, 3)]), 1) is None


def test_no_profitable_severance_at_stable_network(prop1):
    inst, g = prop1
    for i in (1, 2, 3):
        assert best_profitable_severance(inst, g, i) is None


def test_severance_tie_breaks_lexicographically():
    # agents 2 and 3 are interchangeable, so dropping 1-2 or 1-3 gains exactly 1191/156800
    inst = Instance([2, 2, 2, 5], "1/3", 0)
    g = Network(4, [(1, 2), (1, 3), (2, 4), (3, 4)])
    base = payoffs_exact(inst, g)[0]
    for L in (((1, 2),), ((1, 3),)):
        assert payoffs_exact(inst, g.remove(L))[0] - base == Fraction(1191, 156800)
    links, gain = best_profitable_severance(inst, g, 1)
    assert links == ((1, 2),)
    assert gain == pytest.approx(1191 / 156800, abs=1e-12)


def test_severance_degree_guard():
    with pytest.raises(GuardError):
        best_profitable_severance(Instance([1] * 5, 0, 0), Network.complete(5), 1, max_degree=2)


def test_mutual_link_beneficial_path(prop1):
    inst, _ = prop1
    assert mutual_link_beneficial(inst, Network.empty(3), 1, 2)
    assert mutual_link_beneficial(inst, Network(3, [(1, 2)]), 1, 3)
    # the stable network rejects 2-3: somebody loses
    assert not mutual_link_beneficial(inst, Network(3, [(1, 2), (1, 3)]), 2, 3)
    with pytest.raises(ValueError):
        mutual_link_beneficial(inst, Network(3, [(1, 2)]), 1, 2)


def test_formation_step_forms_link(prop1):
    inst, _ = prop1
    g, ev = formation_step(inst, Network.empty(3), (2, 1))
    assert g == Network(3, [(1, 2)])
    assert ev.action == LinkFormed(1, 2)
    assert ev.pair == (1, 2)


def test_severance_preempts_link_formation():
    # agent 1 has a profitable severance, while 1-4 would also be mutually beneficial
    inst = Instance([4, 4, 8, 4], "1/3", 1)
    g = Network(4, [(1, 2), (1, 3)])
    assert mutual_link_beneficial(inst, g, 1, 4)
    assert best_profitable_severance(inst, g, 1) is not None
    g2, ev = formation_step(inst, g, (1, 4))
    assert isinstance(ev.action, Severed) and ev.action.agent == 1
    assert not g2.has_edge(1, 4)
    assert g2 == g.remove(ev.action.links)


def test_formation_step_no_change_on_linked_pair(prop1):
    inst, g = prop1
    g2, ev = formation_step(inst, g, (1, 2))
    assert g2 == g and ev.action == NoChange()


def test_run_formation_reaches_counterexample(prop1):
    inst, g = prop1
    for seed in range(10):
        traj = run_formation(inst, seed, 200)
        assert traj.reached is not None
        net, t = traj.reached
        assert net == g
        assert traj.networks[0] == Network.empty(3)
        assert traj.networks[t] == g and traj.final == g


def test_single_agent_reached_immediately():
    traj = run_formation(Instance([4], "1/2", 1), 0, 10)
    assert traj.reached == (Network.empty(1), 0)
    assert traj.events == []


def test_seed_determinism():
    rng = random.Random(1)
    inst, _ = random_instance(rng, n=5)
    a, b = run_formation(inst, 42, 100), run_formation(inst, 42, 100)
    assert a == b


def test_trajectory_step_invariants():
    rng = random.Random(8)
    for _ in range(15):
        inst, _ = random_instance(rng, n=rng.randint(2, 5))
        traj = run_formation(inst, rng.randint(0, 10**6), 60)
        for ev, before, after in zip(traj.events, traj.networks, traj.networks[1:]):
            ub, ua = payoffs(inst, before), payoffs(inst, after)
            if isinstance(ev.action, Severed):
                assert ua[ev.action.agent - 1] > ub[ev.action.agent - 1]
                assert after == before.remove(ev.action.links)
            elif isinstance(ev.action, LinkFormed):
                gi, gj = ua[ev.action.i - 1] - ub[ev.action.i - 1], ua[ev.action.j - 1] - ub[ev.action.j - 1]
                assert gi >= -1e-6 and gj >= -1e-6 and max(gi, gj) > 0
                assert after == before.add(ev.action.i, ev.action.j)
            else:
                assert after == before
        if traj.reached:
            assert is_pairwise_nash_stable(inst, traj.reached[0], exact=True).stable


def test_reachable_witness(prop1):
    inst, g = prop1
    path = is_reachable(inst, g, horizon=4)
    assert path == [(1, 2), (1, 3)]
    assert replay_pairs(inst, path) == g


def test_reachable_rejects_unstable_target(prop1):
    inst, _ = prop1
    assert is_reachable(inst, Network(3, [(1, 2)]), horizon=5) is None


def test_empty_target_unreachable_when_a_pair_benefits(prop1):
    inst, _ = prop1
    assert is_reachable(inst, Network.empty(3), horizon=5) is None


def test_reachability_guard():
    with pytest.raises(GuardError):
        is_reachable(Instance([1] * 7, 0, 0), Network.empty(7), 2)


def test_reachability_witnesses_replay():
    rng = random.Random(12)
    found = 0
    for _ in range(20):
        inst, _ = random_instance(rng, n=rng.randint(2, 4))
        traj = run_formation(inst, 0, 200)
        if traj.reached is None:
            continue
        path = is_reachable(inst, traj.reached[0], horizon=8)
        if path is not None:
            found += 1
            assert replay_pairs(inst, path) == traj.reached[0]
    assert found > 5
