"""Census over the desk spaces plus a few larger or boundary ones.

Writes one JSON report per space into results/census/ and prints a table
of parameters and label counts.

    python3 scripts/desk_census.py [--extended] [--jobs N]
"""

import argparse
import json
import os
import time
from pathlib import Path

from grgraph.cli import DESK_SPACES, census_report
from grgraph.galois_ring import make_ring
from grgraph.parameters import DEFAULT_SEED, PAIR_BUDGET
from grgraph.ring_linalg import make_space

EXTENDED = [
    (3, 3, 1, 1, 1, "1"),
    (3, 3, 1, 1, 2, "1"),
    (5, 2, 1, 1, 2, "1"),
    (3, 1, 1, 2, 1, "1"),
    (3, 2, 1, 3, 0, "1"),
    (3, 2, 2, 1, 2, "1"),
    (3, 3, 1, 2, 1, "1"),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--extended", action="store_true", help="add the larger/boundary spaces")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/census")
    args = ap.parse_args()

    spaces = list(DESK_SPACES) + (EXTENDED if args.extended else [])
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for key in spaces:
        p, s, m, nu, delta, variant = key
        space = make_space(make_ring(p, s, m), nu, delta, variant)
        t0 = time.perf_counter()
        doc = census_report(space, 10**7, PAIR_BUDGET, DEFAULT_SEED, args.jobs)
        dt = time.perf_counter() - t0
        name = "_".join(map(str, key))
        (outdir / f"{name}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        emp, f = doc["empirical"], doc["formula"]
        ok = all(doc["matches"].values())
        print(
            f"{name:<16} n={emp['n']:<6} k={f['k']:<6} adj={emp['adjacent_values']} "
            f"non={emp['nonadjacent_values']} mode={emp['mode']} ok={ok} ({dt:.1f}s)"
        )
        print("    " + ", ".join(f"{k}:{v}" for k, v in doc["census"].items()))


if __name__ == "__main__":
    main()
