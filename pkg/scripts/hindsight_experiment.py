"""How often does algebraic gossip finish exactly at the hindsight-optimal round?

Sweeps the field size on one graph and prints the observed equality rate next to
the 1 - n/q floor.

    python3 scripts/hindsight_experiment.py --graph cycle:8 --k 2 --trials 200
"""

import argparse

from algossip.analysis import global_hindsight_time
from algossip.engine import RunConfig, eccentric_node, run, sources_at, sources_spread
from algossip.field import FieldSpec
from algossip.graph import parse_graph


def equality_rate(g, k, field, trials, spread=False, base_seed=0):
    sources = sources_spread(g.n, k) if spread else sources_at(eccentric_node(g), k)
    equal, gaps = 0, []
    for seed in range(base_seed, base_seed + trials):
        res = run(RunConfig("ag", g, k, sources, field=field, seed=seed, record_trace=True))
        hind = global_hindsight_time(res.trace, sources, k, g.n)
        equal += hind == res.rounds
        gaps.append(res.rounds - hind)
    return equal / trials, max(gaps)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph", default="cycle:8")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--fields", type=int, nargs="+", default=[1, 8, 16])
    ap.add_argument("--spread", action="store_true", help="spread sources instead of one eccentric node")
    args = ap.parse_args(argv)
    g = parse_graph(args.graph)
    print(f"{g.name}: n={g.n} Delta={g.max_degree} D={g.diameter} k={args.k} trials={args.trials}")
    print(f"{'q':>6} {'equal':>6} {'floor':>7} {'max gap':>7}")
    for m in args.fields:
        spec = FieldSpec(m)
        rate, gap = equality_rate(g, args.k, spec, args.trials, args.spread)
        print(f"{spec.order:>6} {rate:6.3f} {max(0.0, 1 - g.n / spec.order):7.3f} {gap:>7}")


if __name__ == "__main__":
    main()
