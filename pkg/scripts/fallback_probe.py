"""Exercise the breadth-first fallback where no norm-one pair exists.

For nu = 1, delta = 2 over Z/3^s every vertex whose two tail coordinates
have different valuations needs the fallback.  This prints, per valuation
pair (r, t), how many such vertices there are, which labels they reach and
the time spent.

    python3 scripts/fallback_probe.py --s 3 4 --sample 40
"""

import argparse
import random
import time
from collections import Counter, defaultdict

from grgraph.errors import NormOneUnavailable
from grgraph.galois_ring import make_ring
from grgraph.orthograph import build_graph
from grgraph.ring_linalg import make_space
from grgraph.suborbits import reduce_fallback, reduce_in_stabilizer


def probe(s: int, sample: int, seed: int) -> None:
    space = make_space(make_ring(3, s, 1), 1, 2)
    ring = space.ring
    g = build_graph(space)
    hard = defaultdict(list)
    for row in g.coords:
        w0, w1 = int(row[2]), int(row[3])
        if ring.is_unit(int(row[1])) or not (w0 and w1):
            continue
        r, t = ring.valuation(w0), ring.valuation(w1)
        if r != t:
            hard[(r, t)].append(row)
    print(f"{space.describe()}: n={g.n}, vertices needing the fallback: {sum(map(len, hard.values()))}")
    rng = random.Random(seed)
    for key in sorted(hard):
        rows = hard[key]
        picked = rows if len(rows) <= sample else rng.sample(rows, sample)
        labels = Counter()
        t0 = time.perf_counter()
        for row in picked:
            try:
                reduce_in_stabilizer(space, row)
                raise AssertionError("expected NormOneUnavailable")
            except NormOneUnavailable:
                pass
            label, _ = reduce_fallback(space, row)
            labels[str(label)] += 1
        dt = time.perf_counter() - t0
        print(f"  (r,t)={key}: {len(rows)} vertices, {len(picked)} probed, {dt / len(picked):.3f}s each, {dict(labels)}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--s", type=int, nargs="+", default=[3])
    ap.add_argument("--sample", type=int, default=40)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    for s in args.s:
        probe(s, args.sample, args.seed)


if __name__ == "__main__":
    main()
