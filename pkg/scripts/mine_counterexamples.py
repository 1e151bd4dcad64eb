"""Run both counterexample miners and write the verified records as JSON lines.

    python scripts/mine_counterexamples.py --out results/records --workers 4
"""

import argparse
import logging
import time
from collections import Counter
from pathlib import Path

from netstab import Network, SearchSpace, find_lemma2_counterexamples, find_prop1_counterexamples
from netstab.io import records_to_jsonl
from netstab.search import canonical_prop1_space

# neighbourhood of the five-agent example: perturb the newcomer's type and the weight
LEMMA2_SPACE = SearchSpace(
    n=5,
    theta_grid=((20,), (10,), (11,), (13,), tuple(range(12, 25))),
    alpha_grid=("1/3", "1/2", "2/3", "4/5"),
    delta_grid=(75,),
    networks=(Network(5, [(1, 2), (3, 4)]),),
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/records"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args.out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    prop1 = find_prop1_counterexamples(canonical_prop1_space(workers=args.workers))
    t1 = time.perf_counter()
    (args.out / "prop1.jsonl").write_text(records_to_jsonl(prop1))
    print(f"prop1: {len(prop1)} records in {t1 - t0:.1f}s")
    for net, count in Counter(str(r.network) for r in prop1).most_common():
        print(f"  {net}: {count}")
    for r in prop1:
        if r.reachable:
            print(f"  theta={[str(t) for t in r.instance.theta]} alpha={r.instance.alpha} "
                  f"delta={r.instance.delta} {r.network} via {list(r.reachable)}")

    lemma2 = find_lemma2_counterexamples(LEMMA2_SPACE)
    (args.out / "lemma2.jsonl").write_text(records_to_jsonl(lemma2))
    print(f"lemma2: {len(lemma2)} records in {time.perf_counter() - t1:.1f}s")
    triples = Counter((r.lemma2.i, r.lemma2.j, r.lemma2.k) for r in lemma2)
    for triple, count in sorted(triples.items()):
        print(f"  (i, j, k)={triple}: {count}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
