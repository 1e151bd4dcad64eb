import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netstab import Instance, Network, ValidationError, equilibrium_efforts, payoffs
from netstab.cli import main
from netstab.io import (
    dump_instance,
    export_dot,
    parse_instance,
    parse_network,
    parse_space,
    records_to_jsonl,
)
from netstab.search import canonical_prop1_space, find_prop1_counterexamples

FIG2_DOC = json.dumps({"version": "netstab/1", "n": 4, "theta": [20, 10, 11, 13], "alpha": "2/3", "delta": 75,
                       "edges": [[1, 2], [3, 4]]})


@pytest.fixture
def fig2_file(tmp_path):
    p = tmp_path / "fig2.json"
    p.write_text(FIG2_DOC)
    return p


@pytest.fixture
def prop1_file(tmp_path):
    p = tmp_path / "prop1.json"
    p.write_text(dump_instance(Instance([20, 17, 11], "1/3", 15), Network(3, [(1, 2), (1, 3)])))
    return p


def test_parse_fig2():
    inst, g = parse_instance(FIG2_DOC)
    assert inst == Instance([20, 10, 11, 13], Fraction(2, 3), 75)
    assert g == Network(4, [(1, 2), (3, 4)])


@pytest.mark.parametrize("patch, field", [
    ({"alpha": 1}, "alpha"),
    ({"alpha": "2/0"}, "alpha"),
    ({"edges": [[2, 2]]}, "edges"),
    ({"edges": [[1, 2], [2, 1]]}, "edges"),
    ({"theta": [20, 0, 11, 13]}, "theta[2]"),
    ({"n": 5}, "n"),
    ({"version": "other/9"}, "version"),
    ({"edges": [[1.5, 2]]}, "edges"),
])
def test_parse_errors_name_the_field(patch, field):
    doc = {**json.loads(FIG2_DOC), **patch}
    with pytest.raises(ValidationError) as exc:
        parse_instance(json.dumps(doc))
    assert exc.value.field == field


def test_malformed_json():
    with pytest.raises(ValidationError, match="malformed JSON"):
        parse_instance("{not json")


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000), min_size=1, max_size=6),
    st.fractions(min_value=0, max_value=Fraction(99, 100), max_denominator=100),
    st.fractions(min_value=0, max_value=100, max_denominator=50),
    st.data(),
)
def test_round_trip(theta, alpha, delta, data):
    n = len(theta)
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    inst, g = Instance(theta, alpha, delta), Network(n, edges)
    text = dump_instance(inst, g)
    assert parse_instance(text) == (inst, g)
    assert dump_instance(*parse_instance(text)) == text


def test_parse_network_inline_and_file(tmp_path):
    assert parse_network("1-2, 1-3", 3) == Network(3, [(1, 2), (1, 3)])
    assert parse_network("", 3) == Network.empty(3)
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"n": 3, "edges": [[1, 3]]}))
    assert parse_network(str(p), 3) == Network(3, [(1, 3)])
    with pytest.raises(ValidationError):
        parse_network("1:2", 3)


def test_parse_space_round_values():
    space = parse_space(json.dumps({
        "n": 3, "theta_grid": [[20], [17], [11]], "alpha_grid": ["1/3"], "delta_grid": [15],
        "networks": [[[1, 2], [1, 3]]], "reachability": True, "horizon": 3,
    }))
    recs = find_prop1_counterexamples(space)
    assert len(recs) == 1 and recs[0].reachable == ((1, 2), (1, 3))
    with pytest.raises(ValidationError):
        parse_space(json.dumps({"n": 3, "bogus": 1}))


def test_export_dot_fig2():
    inst, g = parse_instance(FIG2_DOC)
    dot = export_dot(g, inst.theta, equilibrium_efforts(inst, g), payoffs(inst, g))
    for label in ("y*=16,", "y*=14,", "y*=11.8,", "y*=12.2,"):
        assert label in dot
    assert "1 -- 2;" in dot and "3 -- 4;" in dot
    assert dot == export_dot(g, inst.theta, equilibrium_efforts(inst, g), payoffs(inst, g))


def test_export_dot_empty_network():
    inst = Instance([1, 2], 0, 0)
    g = Network.empty(2)
    dot = export_dot(g, inst.theta, equilibrium_efforts(inst, g), payoffs(inst, g))
    assert "--" not in dot and 'label="2: θ=2, y*=2, U=2"' in dot


def test_records_jsonl_sorted_keys():
    recs = find_prop1_counterexamples(canonical_prop1_space(reachability=False))
    lines = records_to_jsonl(recs).splitlines()
    assert len(lines) == len(recs) > 0
    for line in lines:
        doc = json.loads(line)
        assert list(doc) == sorted(doc)
        assert doc["stable"] is True and doc["locally_complete"] is False


# ---------------------------------------------------------------------------
# CLI


def test_cli_solve_exact(fig2_file, capsys):
    assert main(["solve", str(fig2_file), "--exact"]) == 0
    out = capsys.readouterr().out
    assert "y*=11.8 (59/5)" in out and "U=203" in out


def test_cli_solve_json(fig2_file, capsys):
    assert main(["--json", "--exact", "solve", str(fig2_file)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["efforts"]["exact"] == [16, 14, "59/5", "61/5"]
    assert list(doc) == sorted(doc)


def test_cli_stability_exit_codes(fig2_file, prop1_file, capsys):
    assert main(["stability", str(fig2_file)]) == 1
    assert main(["stability", str(prop1_file), "--json"]) == 0
    out = capsys.readouterr().out
    assert '"stable": true' in out


def test_cli_local_complete(prop1_file, capsys):
    assert main(["local-complete", str(prop1_file)]) == 1
    assert "NOT locally complete" in capsys.readouterr().out


def test_cli_dynamics_and_reachable(prop1_file, capsys):
    assert main(["dynamics", str(prop1_file), "--seed", "5", "--t-max", "100", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["reached"]["edges"] == [[1, 2], [1, 3]]
    assert main(["reachable", str(prop1_file), "--target", "1-2,1-3", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["witness"] == [[1, 2], [1, 3]]
    assert main(["reachable", str(prop1_file), "--target", "1-2"]) == 1


def test_cli_search_jsonl(tmp_path, capsys):
    space = tmp_path / "space.json"
    space.write_text(json.dumps({"n": 3, "theta_grid": [[20], [17], [11]], "alpha_grid": ["1/3"],
                                 "delta_grid": [15], "reachability": True, "horizon": 3}))
    assert main(["search", "prop1", str(space), "--exact"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[0])["reachable"] == [[1, 2], [1, 3]]


def test_cli_export_dot(fig2_file, capsys):
    assert main(["export-dot", str(fig2_file)]) == 0
    assert capsys.readouterr().out.startswith("graph network {")


def test_cli_invalid_input(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"theta": [1, 2], "alpha": 1, "delta": 0}))
    assert main(["solve", str(p)]) == 2
    assert "alpha" in capsys.readouterr().err
    assert main(["solve", str(tmp_path / "missing.json")]) == 2


def test_cli_replicate(capsys):
    assert main(["replicate"]) == 0
    out = capsys.readouterr().out
    assert "FAIL]" not in out and "ALL PASS" in out
    assert "[INFO]" in out
