"""Reproduce the worked examples and write DOT renderings of each network.

    python scripts/replicate_figures.py --out results/figures
"""

import argparse
from pathlib import Path

from netstab import equilibrium_efforts, payoffs
from netstab.io import export_dot
from netstab.replicate import (
    FIG2_INSTANCE,
    FIG2_NETWORK,
    FIG3_INSTANCE,
    FIG3_LEFT,
    FIG3_RIGHT,
    PROP1_INSTANCE,
    PROP1_NETWORK,
    replicate_paper,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/figures"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rep = replicate_paper()
    for it in rep.items:
        status = "INFO" if it.informational else ("PASS" if it.passed else "FAIL")
        print(f"[{status}] {it.figure}: {it.name}: {it.computed}")

    panels = {
        "fig2": (FIG2_INSTANCE, FIG2_NETWORK),
        "fig3_left": (FIG3_INSTANCE, FIG3_LEFT),
        "fig3_right": (FIG3_INSTANCE, FIG3_RIGHT),
        "prop1_fixture": (PROP1_INSTANCE, PROP1_NETWORK),
    }
    for name, (inst, g) in panels.items():
        path = args.out / f"{name}.dot"
        path.write_text(export_dot(g, inst.theta, equilibrium_efforts(inst, g), payoffs(inst, g)))
        print(f"wrote {path}")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
