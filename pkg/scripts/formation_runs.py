"""Run the formation process on one instance over many seeds and tally where it rests.

    python scripts/formation_runs.py data/prop1.json --seeds 200 --t-max 500
"""

import argparse
from collections import Counter

from netstab import is_locally_complete, run_formation
from netstab.io import load_instance


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("instance")
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--t-max", type=int, default=500)
    args = ap.parse_args()
    inst, _ = load_instance(args.instance)

    rested, nets, times = Counter(), {}, []
    for seed in range(args.seeds):
        traj = run_formation(inst, seed, args.t_max)
        if traj.reached is None:
            rested["(not reached)"] += 1
            continue
        g, t = traj.reached
        rested[str(g)] += 1
        nets.setdefault(str(g), g)
        times.append(t)

    print(f"{args.seeds} runs, t_max={args.t_max}")
    for net, count in rested.most_common():
        g = nets.get(net)
        tag = "  (not locally complete)" if g and not is_locally_complete(g, inst.theta).locally_complete else ""
        print(f"  {net}: {count}{tag}")
    if times:
        print(f"mean rest time {sum(times) / len(times):.1f}, max {max(times)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
