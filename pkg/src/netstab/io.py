"""Instance documents, record serialization and DOT export."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .model import Instance, Network, ValidationError, to_fraction
from .search import CounterexampleRecord, SearchSpace
from .stability import AddLink, Deviation, Sever

FORMAT_VERSION = "netstab/1"


def number_to_json(x: Fraction) -> int | str:
    """Integers stay integers; everything else becomes an exact "p/q" string."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt(x, exact: Fraction | None = None) -> str:
    """10 significant digits, plus the exact fraction when one is known and not an integer."""
    if isinstance(x, Fraction):
        exact, x = x, float(x)
    s = f"{float(x):.10g}"
    if exact is not None and exact.denominator != 1:
        s += f" ({exact.numerator}/{exact.denominator})"
    return s


def _load(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError("document", f"malformed JSON: {e.msg} at line {e.lineno} column {e.colno}") from None
    if not isinstance(doc, dict):
        raise ValidationError("document", "top level must be a JSON object")
    return doc


def _parse_edges(raw, n: int, name: str = "edges") -> Network:
    if not isinstance(raw, list):
        raise ValidationError(name, "must be an array of [i, j] pairs")
    edges = []
    for e in raw:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in e)):
            raise ValidationError(name, f"each edge must be a pair of integers, got {e!r}")
        edges.append(tuple(e))
    return Network(n, edges)


def parse_instance(text: str) -> tuple[Instance, Network]:
    doc = _load(text)
    version = doc.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ValidationError("version", f"unsupported format {version!r}, expected {FORMAT_VERSION!r}")
    for key in ("theta", "alpha", "delta"):
        if key not in doc:
            raise ValidationError(key, "missing")
    theta = doc["theta"]
    if not isinstance(theta, list):
        raise ValidationError("theta", "must be an array")
    n = doc.get("n", len(theta))
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValidationError("n", f"must be an integer, got {n!r}")
    if n != len(theta):
        raise ValidationError("n", f"n={n} but theta has {len(theta)} entries")
    instance = Instance(theta, doc["alpha"], doc["delta"])
    network = _parse_edges(doc.get("edges", []), n)
    return instance, network


def load_instance(path: str | Path) -> tuple[Instance, Network]:
    return parse_instance(Path(path).read_text())


def instance_document(instance: Instance, network: Network | None = None) -> dict[str, Any]:
    network = network if network is not None else Network.empty(instance.n)
    return {
        "alpha": number_to_json(instance.alpha),
        "delta": number_to_json(instance.delta),
        "edges": [list(e) for e in network.sorted_edges()],
        "n": instance.n,
        "theta": [number_to_json(t) for t in instance.theta],
        "version": FORMAT_VERSION,
    }


def dump_instance(instance: Instance, network: Network | None = None) -> str:
    return json.dumps(instance_document(instance, network), sort_keys=True, indent=2) + "\n"


def parse_network(spec: str, n: int) -> Network:
    """A network given as a document path or inline as ``"1-2,1-3"`` (empty string: no edges)."""
    path = Path(spec)
    if spec and path.is_file():
        doc = _load(path.read_text())
        if "edges" not in doc:
            raise ValidationError("edges", "missing")
        if doc.get("n", n) != n:
            raise ValidationError("n", f"target has n={doc['n']}, instance has n={n}")
        return _parse_edges(doc["edges"], n)
    edges = []
    for part in filter(None, (p.strip() for p in spec.split(","))):
        try:
            i, j = (int(v) for v in part.split("-"))
        except ValueError:
            raise ValidationError("target", f"cannot parse edge {part!r}; use i-j") from None
        edges.append((i, j))
    return Network(n, edges)


def parse_space(text: str) -> SearchSpace:
    doc = _load(text)
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValidationError("n", "missing or not an integer")
    networks = doc.get("networks")
    if networks is not None:
        networks = tuple(_parse_edges(g, n, "networks") for g in networks)
    known = {"n", "theta_grid", "theta_bounds", "alpha_grid", "delta_grid", "mode", "seed",
             "max_instances", "networks", "reachability", "horizon", "eps", "workers"}
    unknown = set(doc) - known
    if unknown:
        raise ValidationError(sorted(unknown)[0], "unknown search-space field")
    kwargs = {k: v for k, v in doc.items() if k != "networks"}
    if "theta_grid" in kwargs:
        kwargs["theta_grid"] = tuple(tuple(v) for v in kwargs["theta_grid"])
    if "theta_bounds" in kwargs:
        kwargs["theta_bounds"] = tuple(kwargs["theta_bounds"])
    try:
        return SearchSpace(networks=networks, **kwargs)
    except TypeError as e:
        raise ValidationError("space", str(e)) from None


def deviation_to_json(dev: Deviation | None) -> dict | None:
    if dev is None:
        return None
    if isinstance(dev, AddLink):
        return {"kind": "add", "i": dev.i, "j": dev.j}
    assert isinstance(dev, Sever)
    return {"kind": "sever", "i": dev.i, "links": [list(e) for e in dev.links]}


def record_to_json(record: CounterexampleRecord) -> dict[str, Any]:
    out: dict[str, Any] = {
        "kind": record.kind,
        "instance": instance_document(record.instance, record.network),
        "exact_verified": record.exact_verified,
        "reachable": [list(p) for p in record.reachable] if record.reachable is not None else None,
    }
    if record.stability is not None:
        out["stable"] = record.stability.stable
    if record.local is not None:
        out["locally_complete"] = record.local.locally_complete
        out["violation"] = list(record.local.violation) if record.local.violation else None
        out["missing_link"] = list(record.local.missing) if record.local.missing else None
    if record.lemma2 is not None:
        r = record.lemma2
        out["lemma2"] = {
            "i": r.i, "j": r.j, "k": r.k,
            "utility_with_j": r.utility_with_j,
            "utility_with_k": r.utility_with_k,
            "effort_with_j": r.effort_with_j,
            "effort_with_k": r.effort_with_k,
            "utility_order_violated": r.utility_order_violated,
            "effort_order_violated": r.effort_order_violated,
        }
    return out


def records_to_jsonl(records: Sequence[CounterexampleRecord]) -> str:
    return "".join(json.dumps(record_to_json(r), sort_keys=True) + "\n" for r in records)


def _dot_number(x) -> str:
    return f"{float(x):.10g}"


def export_dot(network: Network, theta: Sequence, efforts: Sequence, payoffs: Sequence) -> str:
    if not (len(theta) == len(efforts) == len(payoffs) == network.n):
        raise ValueError("theta, efforts and payoffs must all have one entry per agent")
    lines = ["graph network {", "  node [shape=circle];"]
    for i in range(1, network.n + 1):
        label = f"{i}: θ={_dot_number(theta[i - 1])}, y*={_dot_number(efforts[i - 1])}, U={_dot_number(payoffs[i - 1])}"
        lines.append(f'  {i} [label="{label}"];')
    for i, j in network.sorted_edges():
        lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
