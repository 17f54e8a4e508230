"""Certified classification of vertices under the stabiliser of [e_1].

Every vertex is carried by an explicit element of the orthogonal group to
one of the listed representatives of the suborbits.  The reduction follows
the constructive case analysis: first the transitivity argument (any vertex
to [e_1]), then, inside the stabiliser G_[e1], the "some coordinate among
2..2nu is a unit" branch and the "all of them are non-units" branch with
its tail sub-cases.  Each step is a named generator (H, T, K, diagonal
rescales, hyperbolic swaps) whose orthogonality and action on [e_1] are
checked as it is applied.

Indices in this module are 0-based: x = coords[:nu], y = coords[nu:2nu],
tail = coords[2nu:].
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    FallbackExhausted,
    InternalWitnessFailure,
    IsE1,
    NormOneUnavailable,
    NotAVertex,
)
from .galois_ring import RingElem, is_square_unit, sqrt_unit
from .orthograph import OrthoGraph, ProjPoint, build_graph, canonicalize
from .ring_linalg import (
    FormSpace,
    block_diag,
    delta_orthogonal_group,
    diag,
    gen_D,
    gen_H,
    gen_K,
    gen_K_dual,
    gen_Q,
    gen_T,
    hyperbolic_swap,
    identity,
    inverse,
    is_orthogonal,
    matmul,
    quad,
    render_matrix,
    render_vector,
    solve_norm_one,
    tail_block,
    unimodular_reduce_row,
    vecmat,
)

FALLBACK_DEPTH = 6


@dataclass(frozen=True)
class OrbitLabel:
    """Tag of a listed representative together with its parameters."""

    tag: str
    r: int | None = None
    t: int | None = None
    a: str | None = None
    b: RingElem | None = None

    def __str__(self) -> str:
        params = []
        if self.r is not None:
            params.append(f"r={self.r}")
        if self.t is not None:
            params.append(f"t={self.t}")
        if self.a is not None:
            params.append(f"a={self.a}")
        if self.b is not None:
            b = str(self.b)
            params.append(f"b={b}" if self.b.ring.m == 1 else f"b=({b})")
        return f"{self.tag}({','.join(params)})" if params else self.tag


TAG_ORDER = ("E1", "ADJ", "NADJ_E2", "NADJ_E2P", "NADJ_E1P", "NADJ_E1PQ", "N1", "M1", "M2", "M3")


def label_key(label: OrbitLabel) -> tuple:
    """Sort key following the order of the representative lists."""
    return (
        TAG_ORDER.index(label.tag),
        label.r or 0,
        label.t or 0,
        label.a or "",
        label.b.code if label.b is not None else -1,
    )


E1 = OrbitLabel("E1")
ADJ = OrbitLabel("ADJ")
NADJ_E2 = OrbitLabel("NADJ_E2")


@dataclass(frozen=True, eq=False)
class Witness:
    matrix: np.ndarray
    source: ProjPoint
    target: ProjPoint
    fixes_e1: bool
    label: OrbitLabel | None = field(default=None)

    def to_json(self, space: FormSpace) -> dict:
        ring = space.ring
        return {
            "source": render_vector(ring, self.source.coords),
            "target": render_vector(ring, self.target.coords),
            "label": str(self.label) if self.label is not None else None,
            "matrix": render_matrix(ring, self.matrix),
        }

    def dumps(self, space: FormSpace) -> str:
        return json.dumps(self.to_json(space), sort_keys=True)


# -- representatives ------------------------------------------------------------


def e(space: FormSpace, i: int) -> np.ndarray:
    v = np.zeros(space.dim, dtype=np.int64)
    v[i] = 1
    return v


def rep_vector(space: FormSpace, label: OrbitLabel) -> ProjPoint:
    """Canonical coordinates of the representative named by ``label``."""
    ring, nu = space.ring, space.nu
    z = space.z
    half = space.half
    v = [ring.zero] * space.dim
    tag = label.tag
    if tag == "E1":
        v[0] = ring.one
    elif tag == "ADJ":
        v[nu] = ring.one
    elif tag == "NADJ_E2":
        v[1] = ring.one
    elif tag == "NADJ_E2P":
        v[1] = ring.one
        v[nu] = ring(ring.p_power(label.r))
    elif tag == "NADJ_E1P":
        v[0] = ring.one
        v[1] = ring(ring.p_power(label.r))
    elif tag == "NADJ_E1PQ":
        a = ring.one if label.a == "1" else z
        v[0] = ring.one
        v[1] = ring(ring.p_power(label.r))
        v[nu] = -a * ring(ring.p_power(label.r + label.t))
        v[nu + 1] = a * ring(ring.p_power(label.t))
    elif tag == "N1":
        D = ring.elem(space.delta_diag[0])
        pr = ring(ring.p_power(label.r))
        v = [ring.one, -half * D * pr * pr, pr]
    elif tag == "M1":
        pr = ring(ring.p_power(label.r))
        v = [ring.one, -half * pr * pr, pr, ring.zero]
    elif tag == "M2":
        pr = ring(ring.p_power(label.r))
        v = [ring.one, half * z * pr * pr, ring.zero, pr]
    elif tag == "M3":
        pr = ring(ring.p_power(label.r))
        b = label.b
        v = [ring.one, -half * (b * b - z) * pr * pr, b * pr, pr]
    else:
        raise ValueError(f"unknown label {label}")
    return canonicalize(space, [x.code for x in v])


def listed_labels(space: FormSpace) -> list[OrbitLabel]:
    """Every label the representative lists allow for this space (M3 over all
    units b)."""
    ring, nu, d, s = space.ring, space.nu, space.delta, space.ring.s
    out = [ADJ]
    rs = range(1, s)
    if nu == 1:
        if d == 1:
            out += [OrbitLabel("N1", r=r) for r in rs]
        elif d == 2:
            out += [OrbitLabel("M1", r=r) for r in rs]
            out += [OrbitLabel("M2", r=r) for r in rs]
            units = [ring.elem(c) for c in range(ring.size) if ring.is_unit(c)]
            out += [OrbitLabel("M3", r=r, b=b) for r in rs for b in units]
        return out
    out.append(NADJ_E2)
    out += [OrbitLabel("NADJ_E2P", r=r) for r in rs]
    out += [OrbitLabel("NADJ_E1P", r=r) for r in rs]
    out += [
        OrbitLabel("NADJ_E1PQ", r=r, t=t, a=a)
        for r in rs
        for t in range(r, s)
        for a in ("1", "z")
    ]
    return out


# -- step tracking ----------------------------------------------------------------


def _fixes_e1(M: np.ndarray) -> bool:
    return not np.any(M[0, 1:])


class _Walk:
    """Running vector v and accumulated matrix W with v = v0 W (up to scalar)."""

    def __init__(self, space: FormSpace, v: Sequence[int], stabilise: bool, strict: bool):
        self.space = space
        self.ring = space.ring
        self.v = np.array(v, dtype=np.int64)
        self.W = identity(space.dim)
        self.stabilise = stabilise
        self.strict = strict

    def apply(self, M: np.ndarray, what: str) -> None:
        if self.strict:
            if not is_orthogonal(self.space, M):
                raise InternalWitnessFailure(f"{what} is not orthogonal")
            if self.stabilise and not _fixes_e1(M):
                raise InternalWitnessFailure(f"{what} moves [e1]")
        self.v = vecmat(self.ring, self.v, M)
        self.W = matmul(self.ring, self.W, M)

    def scale(self, pos: int) -> None:
        """Projectively rescale so that coordinate ``pos`` equals 1."""
        u = self.ring.inv(int(self.v[pos]))
        self.v = np.asarray(self.ring.vmul(self.v, u), dtype=np.int64)

    def val(self, i: int) -> int:
        return self.ring.valuation(int(self.v[i]))

    def min_val(self, lo: int, hi: int) -> int:
        return min((self.val(i) for i in range(lo, hi)), default=self.ring.s)

    def P(self, row: int, col: int, value: int) -> np.ndarray:
        P = np.zeros((self.space.nu, self.space.delta), dtype=np.int64)
        P[row, col] = value
        return P


def certify(space: FormSpace, w: Witness) -> None:
    """Raise InternalWitnessFailure unless the witness does what it claims."""
    M = w.matrix
    if not is_orthogonal(space, M):
        raise InternalWitnessFailure("witness matrix is not orthogonal")
    image = canonicalize(space, vecmat(space.ring, w.source.coords, M))
    if image != w.target:
        raise InternalWitnessFailure(
            f"witness maps {render_vector(space.ring, w.source.coords)} to "
            f"{render_vector(space.ring, image.coords)}, expected "
            f"{render_vector(space.ring, w.target.coords)}"
        )
    if w.fixes_e1 and not _fixes_e1(M):
        raise InternalWitnessFailure("witness claims to fix [e1] but does not")


def _vertex(space: FormSpace, v: Sequence[int]) -> ProjPoint:
    pt = canonicalize(space, v)
    if quad(space, pt.coords) != 0:
        raise NotAVertex(f"{render_vector(space.ring, pt.coords)} is not isotropic")
    return pt


# -- transitivity ---------------------------------------------------------------


def move_to_e1(space: FormSpace, v: Sequence[int], strict: bool = True) -> Witness:
    """An element of the orthogonal group carrying [v] to [e_1]."""
    pt = _vertex(space, v)
    ring, nu, d = space.ring, space.nu, space.delta
    walk = _Walk(space, pt.coords, stabilise=False, strict=strict)
    if not any(ring.is_unit(int(x)) for x in walk.v[:nu]):
        walk.apply(hyperbolic_swap(space), "hyperbolic swap")
    S11, _ = unimodular_reduce_row(ring, walk.v[:nu])
    walk.apply(gen_D(space, S11), "S1")
    b = walk.v[nu : 2 * nu]
    walk.apply(gen_K(space, gen_Q(ring, nu, b[1:])), "K(Q_nu)")
    if d:
        P = np.zeros((nu, d), dtype=np.int64)
        P[0, :] = walk.v[2 * nu :]
        walk.apply(gen_H(space, P), "H(tail E_1)")
    target = canonicalize(space, e(space, 0))
    w = Witness(walk.W, pt, target, fixes_e1=False, label=E1)
    certify(space, w)
    return w


# -- stabiliser reductions -------------------------------------------------------


def _to_adjacent_rep(walk: _Walk) -> OrbitLabel:
    """[v] adjacent to [e_1] -> [e_{nu+1}] inside G_[e1]."""
    space, ring, nu, d = walk.space, walk.ring, walk.space.nu, walk.space.delta
    walk.scale(nu)
    if d:
        P = np.zeros((nu, d), dtype=np.int64)
        P[0, :] = walk.v[2 * nu :]
        walk.apply(gen_T(space, P), "T(tail E_1)")
    Binv = identity(nu)
    Binv[0, :] = walk.v[nu : 2 * nu]
    walk.apply(gen_D(space, Binv.T), "diag(A, A^-t) sending y to e_1")
    c = walk.v[:nu]
    walk.apply(gen_K_dual(space, gen_Q(ring, nu, c[1:])), "lower K(Q_nu)")
    return ADJ


def _scale_unit_pair(walk: _Walk, pos: int) -> None:
    """Rescale hyperbolic pair (pos, nu+pos) so that coordinate ``pos`` becomes p^k."""
    space, ring, nu = walk.space, walk.ring, walk.space.nu
    _, c = ring.split_valuation(int(walk.v[pos]))
    A = identity(nu)
    A[pos, pos] = ring.inv(c)
    walk.apply(gen_D(space, A), f"diag rescale of pair {pos + 1}")


def _reduce_unit_among_rest(walk: _Walk) -> OrbitLabel:
    """Some coordinate in positions 2..2nu other than nu+1 is a unit (nu >= 2)."""
    space, ring, nu, d = walk.space, walk.ring, walk.space.nu, walk.space.delta
    if not any(ring.is_unit(int(x)) for x in walk.v[1:nu]):
        walk.apply(hyperbolic_swap(space, range(1, nu)), "swap pairs 2..nu")
    T11, _ = unimodular_reduce_row(ring, walk.v[1:nu])
    walk.apply(gen_D(space, block_diag(identity(1), T11)), "diag(1, T11, 1, T11^-t)")
    b = walk.v[nu + 1 : 2 * nu]
    Q = np.zeros((nu, nu), dtype=np.int64)
    Q[1:, 1:] = gen_Q(ring, nu - 1, b[1:])
    walk.apply(gen_K(space, Q), "K(0 + Q_{nu-1})")
    A = identity(nu)
    A[1, 0] = ring.neg(int(walk.v[0]))
    walk.apply(gen_D(space, A), "T2")
    if d:
        P = np.zeros((nu, d), dtype=np.int64)
        P[1, :] = walk.v[2 * nu :]
        walk.apply(gen_H(space, P), "H(tail E_2)")
    if walk.v[nu] == 0:
        return NADJ_E2
    r, x = ring.split_valuation(int(walk.v[nu]))
    A = identity(nu)
    A[0, 0] = x
    walk.apply(gen_D(space, A), "diag(x, I, x^-1, I)")
    return OrbitLabel("NADJ_E2P", r=r)


def _reduce_all_nonunit_nu1(walk: _Walk) -> OrbitLabel:
    space, ring, d = walk.space, walk.ring, walk.space.delta
    if d == 1:
        r, x = ring.split_valuation(int(walk.v[2]))
        walk.apply(gen_D(space, diag([x])), "diag(x, x^-1, 1)")
        return OrbitLabel("N1", r=r)
    w0, w1 = int(walk.v[2]), int(walk.v[3])
    if w1 == 0:
        r, x = ring.split_valuation(w0)
        walk.apply(gen_D(space, diag([x])), "diag(x, x^-1, I2)")
        return OrbitLabel("M1", r=r)
    if w0 == 0:
        r, x = ring.split_valuation(w1)
        walk.apply(gen_D(space, diag([x])), "diag(x, x^-1, I2)")
        return OrbitLabel("M2", r=r)
    if ring.valuation(w0) != ring.valuation(w1):
        cd = solve_norm_one(ring)
        if cd is None:
            raise NormOneUnavailable(f"no units c, d with c^2 - d^2 z = 1 in {ring}")
        c, dd = cd
        z = space.z
        U = np.array([[c.code, dd.code], [(dd * z).code, c.code]], dtype=np.int64)
        walk.apply(tail_block(space, U), "diag(I2, [[c, d], [dz, c]])")
        if walk.val(2) != walk.val(3):
            raise InternalWitnessFailure("norm-one rotation did not equalise tail valuations")
    r, x = ring.split_valuation(int(walk.v[2]))
    _, y = ring.split_valuation(int(walk.v[3]))
    walk.apply(gen_D(space, diag([y])), "diag(y, y^-1, I2)")
    b = ring.elem(x) / ring.elem(y)
    return OrbitLabel("M3", r=r, b=b)


def _reduce_all_nonunit(walk: _Walk) -> OrbitLabel:
    """Every coordinate in positions 2..2nu is a non-unit; [v] != [e_1]."""
    space, ring, nu, d, s = walk.space, walk.ring, walk.space.nu, walk.space.delta, walk.ring.s
    walk.scale(0)
    if nu == 1:
        return _reduce_all_nonunit_nu1(walk)

    rest = np.concatenate([walk.v[1:nu], walk.v[nu + 1 : 2 * nu]])
    if not rest.any():
        if d == 1:
            walk.apply(gen_T(space, walk.P(1, 0, 1)), "T(E_2)")
        elif walk.v[2 * nu] != 0:
            walk.apply(gen_T(space, walk.P(1, 0, 1)), "T(E_21)")
        else:
            walk.apply(gen_T(space, walk.P(1, 1, 1)), "T(E_22)")

    if walk.min_val(1, nu) > walk.min_val(nu + 1, 2 * nu):
        walk.apply(hyperbolic_swap(space, range(1, nu)), "swap pairs 2..nu")
    T11, r = unimodular_reduce_row(ring, walk.v[1:nu])
    walk.apply(gen_D(space, block_diag(identity(1), T11)), "T1")
    if nu >= 3 and walk.v[nu + 2 : 2 * nu].any():
        T22, r2 = unimodular_reduce_row(ring, walk.v[nu + 2 : 2 * nu])
        walk.apply(gen_D(space, block_diag(identity(2), inverse(ring, T22).T)), "T2")
        if r2 < r:
            raise InternalWitnessFailure("valuation ordering r <= r2 violated")
        Q = np.zeros((nu, nu), dtype=np.int64)
        Q[1, 2] = ring.neg(ring.p_power(r2 - r))
        Q[2, 1] = ring.p_power(r2 - r)
        walk.apply(gen_K(space, Q), "T3")

    # tail elimination; every round either clears a tail entry or lowers r
    for _ in range(4 * s + 4):
        tail = walk.v[2 * nu :]
        if not tail.any():
            break
        r = walk.val(1)
        ks = [walk.val(2 * nu + i) for i in range(d)]
        lowest = min([r] + ks)
        if lowest == r:
            col = 0 if tail[0] != 0 else 1
            e_val = ring.divide_p_power(int(tail[col]), r)
            walk.apply(gen_H(space, walk.P(1, col, e_val)), f"H(p^(k-r) E_2{col + 1})")
        else:
            col = ks.index(lowest)
            walk.apply(gen_T(space, walk.P(1, col, 1)), f"T(E_2{col + 1})")
            _scale_unit_pair(walk, 1)
    else:
        raise InternalWitnessFailure("tail elimination did not terminate")

    r = walk.val(1)
    b = int(walk.v[nu + 1])
    if b == 0:
        return OrbitLabel("NADJ_E1P", r=r)
    t, u = ring.split_valuation(b)
    u = ring.elem(u)
    a = "1" if is_square_unit(u) else "z"
    x1 = sqrt_unit(u if a == "1" else u / space.z)
    walk.apply(gen_D(space, identity(nu) * x1.code), "diag(x1 I, x1^-1 I)")
    return OrbitLabel("NADJ_E1PQ", r=r, t=t, a=a)


def _finish(space: FormSpace, walk: _Walk, source: ProjPoint, label: OrbitLabel) -> Witness:
    target = rep_vector(space, label)
    w = Witness(walk.W, source, target, fixes_e1=True, label=label)
    certify(space, w)
    return w


def reduce_in_stabilizer(
    space: FormSpace, v: Sequence[int], strict: bool = True
) -> tuple[OrbitLabel, Witness]:
    """Label of [v] and an element of G_[e1] carrying [v] to its representative."""
    pt = _vertex(space, v)
    ring, nu = space.ring, space.nu
    if pt.coords == rep_vector(space, E1).coords:
        raise IsE1("[e1] is its own orbit")
    walk = _Walk(space, pt.coords, stabilise=True, strict=strict)
    if ring.is_unit(pt.coords[nu]):
        label = _to_adjacent_rep(walk)
    elif any(ring.is_unit(x) for i, x in enumerate(pt.coords[1 : 2 * nu], 1) if i != nu):
        label = _reduce_unit_among_rest(walk)
    else:
        label = _reduce_all_nonunit(walk)
    return label, _finish(space, walk, pt, label)


def _directly_reducible(space: FormSpace, v: np.ndarray) -> bool:
    ring = space.ring
    w0, w1 = int(v[2]), int(v[3])
    return w0 == 0 or w1 == 0 or ring.valuation(w0) == ring.valuation(w1)


def fallback_generators(space: FormSpace) -> list[tuple[str, np.ndarray]]:
    """Stabiliser elements searched by :func:`reduce_fallback`."""
    ring = space.ring
    gens = []
    for U in delta_orthogonal_group(space):
        if not np.array_equal(U, identity(2)):
            gens.append((f"diag(I2, {render_matrix(ring, U)})", tail_block(space, U)))
    for col in range(2):
        for lam in range(1, ring.size):
            P = np.zeros((1, 2), dtype=np.int64)
            P[0, col] = lam
            gens.append((f"T({ring.render(lam)} E_1{col + 1})", gen_T(space, P)))
    for x in range(2, ring.size):
        if ring.is_unit(x):
            gens.append((f"diag({ring.render(x)}, .., I2)", gen_D(space, diag([x]))))
    return gens


def reduce_fallback(
    space: FormSpace, v: Sequence[int], strict: bool = True, depth: int = FALLBACK_DEPTH
) -> tuple[OrbitLabel, Witness]:
    """Breadth-first search over stabiliser generators until the tail
    valuations can be handled without a norm-one pair (nu = 1, delta = 2)."""
    if (space.nu, space.delta) != (1, 2):
        raise ValueError("fallback applies to nu = 1, delta = 2 only")
    pt = _vertex(space, v)
    ring = space.ring
    start = np.array(pt.coords, dtype=np.int64)
    gens = fallback_generators(space)
    seen = {pt.coords: None}
    queue = deque([(pt.coords, 0)])
    hit = None
    while queue:
        coords, dist = queue.popleft()
        if _directly_reducible(space, np.array(coords)):
            hit = coords
            break
        if dist >= depth:
            continue
        for gi, (_, M) in enumerate(gens):
            nxt = canonicalize(space, vecmat(ring, coords, M)).coords
            if nxt not in seen:
                seen[nxt] = (coords, gi)
                queue.append((nxt, dist + 1))
    if hit is None:
        raise FallbackExhausted(
            f"no stabiliser word of length <= {depth} reaches a listed form from "
            f"{render_vector(ring, pt.coords)} ({len(seen)} states explored)"
        )
    path = []
    cur = hit
    while seen[cur] is not None:
        prev, gi = seen[cur]
        path.append(gi)
        cur = prev
    walk = _Walk(space, start, stabilise=True, strict=strict)
    for gi in reversed(path):
        name, M = gens[gi]
        walk.apply(M, name)
    label = _reduce_all_nonunit(walk)
    return label, _finish(space, walk, pt, label)


def classify(space: FormSpace, v: Sequence[int], strict: bool = True) -> tuple[OrbitLabel, Witness]:
    """Label plus certified witness for any vertex, [e_1] included."""
    pt = _vertex(space, v)
    if pt.coords == rep_vector(space, E1).coords:
        return E1, Witness(identity(space.dim), pt, pt, fixes_e1=True, label=E1)
    try:
        return reduce_in_stabilizer(space, pt.coords, strict)
    except NormOneUnavailable:
        return reduce_fallback(space, pt.coords, strict)


def classify_all(graph: OrthoGraph, strict: bool = True) -> list[tuple[OrbitLabel, Witness]]:
    return [classify(graph.space, row, strict) for row in graph.coords]


def orbit_census(
    space: FormSpace, graph: OrthoGraph | None = None, strict: bool = True
) -> dict[OrbitLabel, int]:
    """Label counts over all vertices (E1 included, so counts sum to n).

    Labels are unions of suborbits; the census checks that adjacency to
    [e_1] and the valuation of the pairing with e_1 are constant per label
    and that every neighbour of [e_1] is labelled ADJ.
    """
    from .errors import InvariantViolation

    g = graph if graph is not None else build_graph(space)
    ring, nu = space.ring, space.nu
    counts: dict[OrbitLabel, int] = {}
    profile: dict[OrbitLabel, tuple[bool, int]] = {}
    for i, (label, _) in enumerate(classify_all(g, strict)):
        counts[label] = counts.get(label, 0) + 1
        pairing = int(g.coords[i][nu])
        prof = (g.is_adjacent(0, i), ring.valuation(pairing))
        if profile.setdefault(label, prof) != prof:
            raise InvariantViolation(f"label {label} mixes pairing profiles")
        if prof[0] and label != ADJ:
            raise InvariantViolation(f"neighbour of [e1] labelled {label}")
    k = int(g.degrees()[0]) if g.n else 0
    if counts.get(ADJ, 0) != k:
        raise InvariantViolation(f"ADJ count {counts.get(ADJ, 0)} != valency {k}")
    return {label: counts[label] for label in sorted(counts, key=label_key)}


def coincidence_check(space: FormSpace) -> list[tuple[OrbitLabel, OrbitLabel, Witness]]:
    """For nu = 1, delta = 2 and -1 a non-square: the stabiliser element
    diag(x, 1/x) + [[0, x], [xz, 0]] with z x^2 = -1 merges M1(r) and M2(r)."""
    if (space.nu, space.delta) != (1, 2):
        raise ValueError("coincidence check applies to nu = 1, delta = 2")
    ring = space.ring
    minus_one = ring(-1)
    if is_square_unit(minus_one):
        return []
    z = space.z
    x = sqrt_unit(minus_one / z)
    M = block_diag(
        diag([x.code, x.inv().code]),
        np.array([[0, x.code], [(x * z).code, 0]], dtype=np.int64),
    )
    out = []
    for r in range(1, ring.s):
        src, dst = OrbitLabel("M1", r=r), OrbitLabel("M2", r=r)
        w = Witness(M, rep_vector(space, src), rep_vector(space, dst), fixes_e1=True, label=dst)
        certify(space, w)
        out.append((src, dst, w))
    return out
