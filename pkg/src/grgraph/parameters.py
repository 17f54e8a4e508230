"""Closed-form graph parameters and their empirical check on built graphs.

All formula arithmetic is exact integer arithmetic.  Common-neighbour counts
come from AND + popcount over the packed adjacency rows.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, IntegralityViolation, InvariantViolation
from .galois_ring import DEFAULT_BUDGET, GaloisRing
from .orthograph import OrthoGraph
from .ring_linalg import FormSpace

PAIR_BUDGET = 2 * 10**8
SAMPLE_PAIRS = 10**6
DEFAULT_SEED = 20240607
_SAMPLE_CHUNK = 1 << 16


def _exact_div(a: int, b: int, what: str) -> int:
    q, r = divmod(a, b)
    if r:
        raise IntegralityViolation(f"{what}: {a}/{b} is not an integer")
    return q


def _pow(p: int, e: int, what: str) -> int:
    if e < 0:
        raise IntegralityViolation(f"{what}: negative exponent {e}")
    return p**e


def formula_n_k(space: FormSpace) -> tuple[int, int]:
    p, s, m = space.ring.p, space.ring.s, space.ring.m
    nu, d = space.nu, space.delta
    num = (p ** (m * nu) - 1) * (p ** (m * (nu + d - 1)) + 1) * p ** (m * (s - 1) * (2 * nu - 2 + d))
    n = _exact_div(num, p**m - 1, "vertex count")
    k = p ** (m * s * (2 * nu - 2 + d))
    return n, k


def formula_srg(space: FormSpace) -> tuple[int, int, int, int]:
    """(n, k, lambda, mu) for nu = 1."""
    if space.nu != 1:
        raise ValueError("strongly regular parameters need nu = 1")
    p, s, m, d = space.ring.p, space.ring.s, space.ring.m, space.delta
    n, k = formula_n_k(space)
    lam = (p ** (m * d) - 1) * p ** (m * d * (s - 1))
    mu = -(-d // 2) * p ** (m * s * d)
    if mu > 0 and k * (k - lam - 1) != (n - k - 1) * mu:
        raise InvariantViolation(f"feasibility k(k-lambda-1) = (n-k-1)mu fails for {space.describe()}")
    return n, k, lam, mu


def formula_qsrg(space: FormSpace) -> tuple[int, int, int, int, int]:
    """(n, k, lambda, c1, c2) for nu >= 2."""
    if space.nu < 2:
        raise ValueError("quasi-strongly regular parameters need nu >= 2")
    p, s, m = space.ring.p, space.ring.s, space.ring.m
    nu, d = space.nu, space.delta
    n, k = formula_n_k(space)
    E = m * (2 * s * nu - 2 * s - 1 + s * d)
    lam = p**E
    if d != 1:
        # m(1 - nu - delta/2) is an integer for delta in {0, 2}
        lam += (d - 1) * _pow(p, E + m * (1 - nu) - m * d // 2, "lambda")
    lam *= p**m - 1
    c1 = (p**m - 1) * _pow(p, m * (s * (2 * nu - 2 + d) - 1), "c1")
    c2 = p ** (m * s * (2 * nu - 2 + d))
    if c2 != k:
        raise InvariantViolation("c2 differs from the valency")
    return n, k, lam, c1, c2


def formula_deza(space: FormSpace) -> tuple[int, int, int, int]:
    """(n, k, b, c) for nu >= 2, delta = 1."""
    if space.nu < 2 or space.delta != 1:
        raise ValueError("Deza parameters need nu >= 2 and delta = 1")
    p, s, m, nu = space.ring.p, space.ring.s, space.ring.m, space.nu
    n = _exact_div(
        (p ** (2 * m * nu) - 1) * p ** (m * (s - 1) * (2 * nu - 1)), p**m - 1, "Deza vertex count"
    )
    k = p ** (m * s * (2 * nu - 1))
    b = (p**m - 1) * p ** (m * (2 * s * nu - s - 1))
    c = k
    qn, qk, lam, c1, c2 = formula_qsrg(space)
    if (n, k) != (qn, qk) or not (b == lam == c1) or c != c2:
        raise InvariantViolation(f"Deza tuple inconsistent with the other formulas for {space.describe()}")
    return n, k, b, c


def proposition_count_check(ring: GaloisRing, budget: int = DEFAULT_BUDGET) -> tuple[int, int]:
    """Count (x, y) in R x R with x^2 - z y^2 a non-unit; the set must be pR x pR."""
    size = ring.size
    if size * size > budget:
        raise BudgetExceeded(f"{size * size} pairs exceed budget {budget}")
    z = ring.teich.xi.code
    codes = np.arange(size, dtype=np.int64)
    sq = ring.vmul(codes, codes)
    zsq = ring.vmul(np.full(size, z, dtype=np.int64), sq)
    vals = ring.vsub(sq[:, None], zsq[None, :])
    bad = ~ring.vis_unit(vals)
    observed = int(bad.sum())
    expected = ring.p ** (2 * ring.m * (ring.s - 1))
    nonunit = ~ring.vis_unit(codes)
    if not np.array_equal(bad, nonunit[:, None] & nonunit[None, :]):
        raise InvariantViolation("non-unit set of x^2 - z y^2 is not pR x pR")
    return observed, expected


# -- empirical scan ---------------------------------------------------------------


def _bit(bits: np.ndarray, i: int, j: np.ndarray) -> np.ndarray:
    return ((bits[i, j >> 6] >> (j & 63).astype(np.uint64)) & np.uint64(1)).astype(bool)


def _scan_rows(bits: np.ndarray, n: int, lo: int, hi: int) -> tuple[Counter, Counter]:
    adj, non = Counter(), Counter()
    for i in range(lo, hi):
        if i + 1 >= n:
            break
        common = np.bitwise_count(bits[i + 1 : n] & bits[i]).sum(axis=1, dtype=np.int64)
        flags = _bit(bits, i, np.arange(i + 1, n))
        for vals, out in ((common[flags], adj), (common[~flags], non)):
            u, c = np.unique(vals, return_counts=True)
            out.update(dict(zip(u.tolist(), c.tolist())))
    return adj, non


def _row_ranges(n: int, parts: int) -> list[tuple[int, int]]:
    """Split 0..n into ranges holding roughly equal shares of the upper triangle."""
    parts = max(1, min(parts, n))
    total = n * (n - 1) / 2
    cuts, acc, target = [0], 0.0, total / parts
    for i in range(n):
        acc += n - 1 - i
        if acc >= target * len(cuts) and len(cuts) < parts:
            cuts.append(i + 1)
    cuts.append(n)
    return [(a, b) for a, b in zip(cuts, cuts[1:]) if b > a]


def _scan_pairs(bits: np.ndarray, I: np.ndarray, J: np.ndarray) -> tuple[Counter, Counter]:
    adj, non = Counter(), Counter()
    for lo in range(0, len(I), _SAMPLE_CHUNK):
        i, j = I[lo : lo + _SAMPLE_CHUNK], J[lo : lo + _SAMPLE_CHUNK]
        common = np.bitwise_count(bits[i] & bits[j]).sum(axis=1, dtype=np.int64)
        flags = ((bits[i, j >> 6] >> (j & 63).astype(np.uint64)) & np.uint64(1)).astype(bool)
        for vals, out in ((common[flags], adj), (common[~flags], non)):
            u, c = np.unique(vals, return_counts=True)
            out.update(dict(zip(u.tolist(), c.tolist())))
    return adj, non


def _merge(parts) -> tuple[Counter, Counter]:
    adj, non = Counter(), Counter()
    for a, b in parts:
        adj.update(a)
        non.update(b)
    return adj, non


def scan_common_neighbors(
    g: OrthoGraph,
    pair_budget: int = PAIR_BUDGET,
    seed: int = DEFAULT_SEED,
    sample: int = SAMPLE_PAIRS,
    jobs: int = 1,
) -> tuple[Counter, Counter, str]:
    """Multisets of common-neighbour counts over adjacent and non-adjacent pairs.

    Exhaustive when the upper triangle costs at most ``pair_budget`` word
    operations; otherwise all pairs through vertex 0 plus ``sample`` seeded
    random pairs.  The result does not depend on ``jobs``.
    """
    n, words = g.n, g.bits.shape[1] if g.n else 0
    jobs = max(1, jobs)
    if n * (n - 1) // 2 * words <= pair_budget:
        ranges = _row_ranges(n, jobs * 4 if jobs > 1 else 1)
        if jobs == 1:
            parts = [_scan_rows(g.bits, n, a, b) for a, b in ranges]
        else:
            with ThreadPoolExecutor(jobs) as ex:
                parts = list(ex.map(lambda r: _scan_rows(g.bits, n, *r), ranges))
        adj, non = _merge(parts)
        return adj, non, "exhaustive"
    rng = np.random.default_rng(seed)
    I = rng.integers(0, n, size=sample, dtype=np.int64)
    J = rng.integers(0, n, size=sample, dtype=np.int64)
    keep = (I != J) & (I != 0) & (J != 0)
    I = np.concatenate([np.zeros(n - 1, dtype=np.int64), I[keep]])
    J = np.concatenate([np.arange(1, n, dtype=np.int64), J[keep]])
    chunks = [(lo, lo + _SAMPLE_CHUNK) for lo in range(0, len(I), _SAMPLE_CHUNK)]
    if jobs == 1:
        parts = [_scan_pairs(g.bits, I[a:b], J[a:b]) for a, b in chunks]
    else:
        with ThreadPoolExecutor(jobs) as ex:
            parts = list(ex.map(lambda r: _scan_pairs(g.bits, I[r[0] : r[1]], J[r[0] : r[1]]), chunks))
    adj, non = _merge(parts)
    return adj, non, "sampled"


@dataclass
class ParamReport:
    space: FormSpace
    formula: dict
    n: int
    degrees: list[int]
    adjacent: dict[int, int]
    nonadjacent: dict[int, int]
    mode: str
    seed: int | None
    matches: dict[str, bool] = field(default_factory=dict)
    informational: list[str] = field(default_factory=list)

    @property
    def adjacent_values(self) -> list[int]:
        return sorted(self.adjacent)

    @property
    def nonadjacent_values(self) -> list[int]:
        return sorted(self.nonadjacent)

    @property
    def grade(self) -> int:
        return len(self.nonadjacent)

    @property
    def all_match(self) -> bool:
        return all(self.matches.values())

    def to_json(self) -> dict:
        ring, sp = self.space.ring, self.space
        return {
            "ring": {"p": ring.p, "s": ring.s, "m": ring.m, "h": list(ring.h)},
            "space": {"nu": sp.nu, "delta": sp.delta, "variant": sp.variant},
            "formula": self.formula,
            "empirical": {
                "n": self.n,
                "degrees": self.degrees,
                "adjacent_values": self.adjacent_values,
                "nonadjacent_values": self.nonadjacent_values,
                "adjacent_pairs": {str(v): c for v, c in sorted(self.adjacent.items())},
                "nonadjacent_pairs": {str(v): c for v, c in sorted(self.nonadjacent.items())},
                "mode": self.mode,
                "seed": self.seed,
            },
            "matches": dict(sorted(self.matches.items())),
            "informational": sorted(self.informational),
            "grade": self.grade,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def formula_block(space: FormSpace) -> dict:
    if space.nu == 1:
        n, k, lam, mu = formula_srg(space)
        return {"n": n, "k": k, "lambda": lam, "mu": mu}
    n, k, lam, c1, c2 = formula_qsrg(space)
    out = {"n": n, "k": k, "lambda": lam, "c1": c1, "c2": c2, "deza": None}
    if space.delta == 1:
        out["deza"] = list(formula_deza(space))
    return out


def empirical_params(
    g: OrthoGraph,
    pair_budget: int = PAIR_BUDGET,
    seed: int = DEFAULT_SEED,
    jobs: int | None = None,
) -> ParamReport:
    space = g.space
    f = formula_block(space)
    jobs = jobs if jobs is not None else (os.cpu_count() or 1)
    adj, non, mode = scan_common_neighbors(g, pair_budget, seed, jobs=jobs)
    degs = sorted(set(g.degrees().tolist()))
    rep = ParamReport(
        space, f, g.n, degs, dict(adj), dict(non), mode, seed
    )
    full = mode == "exhaustive"
    m = rep.matches
    m["n"] = g.n == f["n"]
    m["k"] = degs == [f["k"]]
    A, N = set(adj), set(non)
    m["lambda"] = A == {f["lambda"]} if full else A <= {f["lambda"]}
    if full:
        m["handshake"] = sum(adj.values()) * 2 == int(g.degrees().sum())
    if space.nu == 1:
        expect = {f["mu"]} if g.n - f["k"] - 1 > 0 else set()
        m["mu"] = N == expect if full else N <= expect
    else:
        allowed = {f["c1"], f["c2"]}
        m["c1_c2"] = N <= allowed
        if space.ring.s >= 2:
            m["grade"] = N == allowed if full else True
            if not full:
                rep.informational.append("grade not asserted in sampled mode")
        else:
            rep.informational.append("grade not asserted for s = 1")
        if f["deza"] is not None:
            _, _, b, c = f["deza"]
            if full and space.ring.s >= 2:
                m["deza"] = (A | N) == {b, c}
            else:
                m["deza"] = (A | N) <= {b, c}
                rep.informational.append("Deza value set checked as a subset only")
    return rep
