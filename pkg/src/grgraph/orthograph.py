"""Projective points, vertex enumeration and adjacency bitsets of the
orthogonal graph over GR(p^s, m)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence, TextIO

import numpy as np

from .errors import BudgetExceeded, InvariantViolation, NoUnitCoordinate
from .galois_ring import DEFAULT_BUDGET, GaloisRing
from .ring_linalg import FormSpace, as_codes, bilinear, quad, render_vector


@dataclass(frozen=True)
class ProjPoint:
    """Canonical representative of a projective class: the first unit
    coordinate (at ``pivot``, 0-based) is 1."""

    coords: tuple[int, ...]
    pivot: int


def canonicalize(space: FormSpace, v: Sequence[int]) -> ProjPoint:
    ring = space.ring
    v = [int(x) for x in as_codes(ring, list(v))]
    for i, x in enumerate(v):
        if ring.is_unit(x):
            u = ring.inv(x)
            return ProjPoint(tuple(ring.mul(u, y) for y in v), i)
    raise NoUnitCoordinate(f"no unit coordinate in {render_vector(ring, v)}")


def canonicalize_rows(ring: GaloisRing, A: np.ndarray) -> np.ndarray:
    """Row-wise canonicalisation of an array of vectors (each must have a unit)."""
    A = np.asarray(A, dtype=np.int64)
    units = ring.vis_unit(A)
    if not units.any(axis=1).all():
        raise NoUnitCoordinate("some row has no unit coordinate")
    piv = units.argmax(axis=1)
    lead = A[np.arange(len(A)), piv]
    return np.asarray(ring.vmul(A, ring.vinv(lead)[:, None]), dtype=np.int64)


def is_vertex(space: FormSpace, v: Sequence[int]) -> bool:
    pt = canonicalize(space, v)
    if quad(space, pt.coords) != 0:
        return False
    if pt.pivot >= 2 * space.nu:
        raise InvariantViolation(f"isotropic point with no unit among the first 2nu coordinates: {pt}")
    return True


def adjacent(space: FormSpace, u: Sequence[int], v: Sequence[int]) -> bool:
    if isinstance(u, ProjPoint):
        u = u.coords
    if isinstance(v, ProjPoint):
        v = v.coords
    return bilinear(space, u, v).is_unit()


# -- enumeration --------------------------------------------------------------


def formula_vertex_count(space: FormSpace) -> int:
    p, s, m = space.ring.p, space.ring.s, space.ring.m
    nu, d = space.nu, space.delta
    num = (p ** (m * nu) - 1) * (p ** (m * (nu + d - 1)) + 1) * p ** (m * (s - 1) * (2 * nu - 2 + d))
    return num // (p**m - 1)


def omega_sizes_formula(space: FormSpace) -> list[int]:
    """|Omega_i| for pivots i = 1..2nu as derived in the vertex count proof."""
    p, s, m = space.ring.p, space.ring.s, space.ring.m
    nu, d = space.nu, space.delta
    first = [p ** (m * (s * (2 * nu - 2 + d) + 1 - i)) for i in range(1, nu + 1)]
    second = [p ** (m * (s * nu + (s - 1) * (nu - 2 + d) - i)) for i in range(1, nu + 1)]
    return first + second


def _solve_coordinate(space: FormSpace, cols: np.ndarray, i: int) -> np.ndarray:
    """-sum_{j != i} x_j x_{nu+j} - 1/2 Delta(tail): the coordinate paired with pivot i."""
    ring = space.ring
    nu = space.nu
    n = cols.shape[0]
    acc = np.zeros(n, dtype=np.int64)
    for j in range(nu):
        if j != i:
            acc = ring.vadd(acc, ring.vmul(cols[:, j], cols[:, nu + j]))
    tail = np.zeros(n, dtype=np.int64)
    for t, dt in enumerate(space.delta_diag):
        w = cols[:, 2 * nu + t]
        tail = ring.vadd(tail, ring.vmul(dt, ring.vmul(w, w)))
    acc = ring.vadd(acc, ring.vmul(space.half.code, tail))
    return np.asarray(ring.vneg(acc), dtype=np.int64)


def _pivot_block(space: FormSpace, pivot: int) -> np.ndarray:
    ring = space.ring
    nu, dim = space.nu, space.dim
    everything = np.arange(ring.size, dtype=np.int64)
    nonunits = ring.non_unit_codes()
    if pivot < nu:
        partner = nu + pivot
        choices = []
        for j in range(dim):
            if j < pivot:
                choices.append(nonunits)
            elif j == pivot:
                choices.append(np.array([1], dtype=np.int64))
            elif j == partner:
                choices.append(None)
            else:
                choices.append(everything)
    else:
        partner = pivot - nu
        choices = []
        for j in range(dim):
            if j == partner:
                choices.append(None)
            elif j < pivot:
                choices.append(nonunits)
            elif j == pivot:
                choices.append(np.array([1], dtype=np.int64))
            elif j < 2 * nu:
                choices.append(everything)
            else:
                choices.append(nonunits)
    free = [c for c in choices if c is not None]
    grids = np.meshgrid(*free, indexing="ij")
    cols = np.zeros((grids[0].size, dim), dtype=np.int64)
    k = 0
    for j, c in enumerate(choices):
        if c is not None:
            cols[:, j] = grids[k].ravel()
            k += 1
    cols[:, partner] = _solve_coordinate(space, cols, pivot % nu)
    if pivot >= nu and ring.vis_unit(cols[:, partner]).any():
        raise InvariantViolation("solved coordinate left of the pivot is a unit")
    return cols[np.lexsort(cols.T[::-1])]


def enumerate_vertex_array(
    space: FormSpace, budget: int = DEFAULT_BUDGET
) -> tuple[np.ndarray, list[int]]:
    """Canonical coordinates of every vertex, pivot-major then lexicographic,
    together with the block size for each pivot."""
    n = formula_vertex_count(space)
    if n > budget:
        raise BudgetExceeded(f"{n} vertices of dimension {space.dim} exceed budget {budget}")
    blocks = [_pivot_block(space, i) for i in range(2 * space.nu)]
    return np.concatenate(blocks, axis=0), [len(b) for b in blocks]


def enumerate_vertices(space: FormSpace, budget: int = DEFAULT_BUDGET) -> list[ProjPoint]:
    coords, sizes = enumerate_vertex_array(space, budget)
    pivots = np.repeat(np.arange(len(sizes)), sizes)
    return [ProjPoint(tuple(int(x) for x in row), int(pv)) for row, pv in zip(coords, pivots)]


def brute_force_isotropic(space: FormSpace, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Every isotropic tuple with a unit coordinate, by filtering R^dim."""
    ring = space.ring
    total = ring.size**space.dim
    if total > budget:
        raise BudgetExceeded(f"|R|^{space.dim} = {total} exceeds budget {budget}")
    codes = np.arange(ring.size, dtype=np.int64)
    grids = np.meshgrid(*([codes] * space.dim), indexing="ij")
    V = np.stack([g.ravel() for g in grids], axis=1)
    V = V[ring.vis_unit(V).any(axis=1)]
    q = _quad_rows(space, V)
    return V[q == 0]


def _quad_rows(space: FormSpace, V: np.ndarray) -> np.ndarray:
    ring = space.ring
    VS = _times_gram(space, V)
    acc = np.zeros(len(V), dtype=np.int64)
    for c in range(space.dim):
        acc = ring.vadd(acc, ring.vmul(VS[:, c], V[:, c]))
    return acc


def _times_gram(space: FormSpace, V: np.ndarray) -> np.ndarray:
    """Rows of V S: swap the hyperbolic halves and scale the tail by Delta."""
    nu = space.nu
    out = np.empty_like(V)
    out[:, :nu] = V[:, nu : 2 * nu]
    out[:, nu : 2 * nu] = V[:, :nu]
    for t, dt in enumerate(space.delta_diag):
        out[:, 2 * nu + t] = space.ring.vmul(V[:, 2 * nu + t], dt)
    return out


def brute_force_vertices(space: FormSpace, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Sorted canonical vertex coordinates from exhaustive filtering."""
    iso = brute_force_isotropic(space, budget)
    canon = canonicalize_rows(space.ring, iso)
    return np.unique(canon, axis=0)


# -- adjacency ----------------------------------------------------------------

_CHUNK_CELLS = 1 << 22


def _adjacency_rows(space: FormSpace, coords: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Boolean adjacency of rows lo..hi-1 against all vertices."""
    ring = space.ring
    AS = _times_gram(space, coords[lo:hi])
    if ring.m == 1:
        # only residues decide unit-ness; float matmul is exact at these magnitudes
        p = ring.p
        prod = (AS % p).astype(np.float64) @ (coords % p).astype(np.float64).T
        return (np.rint(prod).astype(np.int64) % p) != 0
    acc = np.zeros((hi - lo, len(coords)), dtype=np.int64)
    for c in range(space.dim):
        acc = ring.vadd(acc, ring.vmul(AS[:, c, None], coords[None, :, c]))
    return ring.vis_unit(acc)


def pack_rows(adj: np.ndarray) -> np.ndarray:
    """Pack a boolean matrix into little-endian uint64 words per row."""
    n, cols = adj.shape
    words = (cols + 63) // 64
    packed = np.packbits(adj, axis=1, bitorder="little")
    out = np.zeros((n, words * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view(np.uint64)


def popcount_rows(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class OrthoGraph:
    space: FormSpace
    coords: np.ndarray
    bits: np.ndarray
    omega_sizes: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.coords)

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {tuple(int(x) for x in row): i for i, row in enumerate(self.coords)}

    def vertex(self, i: int) -> ProjPoint:
        row = tuple(int(x) for x in self.coords[i])
        piv = next(j for j, x in enumerate(row) if self.space.ring.is_unit(x))
        return ProjPoint(row, piv)

    @cached_property
    def vertices(self) -> list[ProjPoint]:
        return [self.vertex(i) for i in range(self.n)]

    def find(self, v: Sequence[int]) -> int:
        return self.index[canonicalize(self.space, v).coords]

    def is_adjacent(self, i: int, j: int) -> bool:
        return bool((int(self.bits[i, j >> 6]) >> (j & 63)) & 1)

    def neighbors(self, i: int) -> np.ndarray:
        row = np.unpackbits(self.bits[i].view(np.uint8), bitorder="little")[: self.n]
        return np.nonzero(row)[0]

    def degrees(self) -> np.ndarray:
        return popcount_rows(self.bits)

    def dense(self) -> np.ndarray:
        return np.unpackbits(self.bits.view(np.uint8), axis=1, bitorder="little")[:, : self.n].astype(bool)

    def edges(self) -> Iterator[tuple[int, int]]:
        for i in range(self.n):
            for j in self.neighbors(i):
                if j > i:
                    yield i, int(j)


def build_graph(space: FormSpace, budget: int = DEFAULT_BUDGET) -> OrthoGraph:
    coords, sizes = enumerate_vertex_array(space, budget)
    n = len(coords)
    rows = max(1, _CHUNK_CELLS // max(n, 1))
    bits = np.zeros((n, (n + 63) // 64), dtype=np.uint64)
    for lo in range(0, n, rows):
        hi = min(n, lo + rows)
        bits[lo:hi] = pack_rows(_adjacency_rows(space, coords, lo, hi))
    return OrthoGraph(space, coords, bits, tuple(sizes))


def common_neighbors(g: OrthoGraph, i: int, j: int) -> int:
    return int(np.bitwise_count(g.bits[i] & g.bits[j]).sum())


def degree(g: OrthoGraph, i: int) -> int:
    return int(np.bitwise_count(g.bits[i]).sum())


def diameter(g: OrthoGraph) -> float:
    """Graph diameter by bitset BFS from every vertex (inf if disconnected)."""
    n = g.n
    full = pack_rows(np.ones((1, n), dtype=bool))[0]
    best = 0
    for src in range(n):
        seen = np.zeros_like(full)
        seen[src >> 6] |= np.uint64(1) << np.uint64(src & 63)
        frontier = [src]
        depth = 0
        while frontier:
            reach = np.bitwise_or.reduce(g.bits[frontier], axis=0) & ~seen
            if not reach.any():
                break
            seen |= reach
            depth += 1
            frontier = list(np.nonzero(np.unpackbits(reach.view(np.uint8), bitorder="little")[:n])[0])
        if not np.array_equal(seen, full):
            return float("inf")
        best = max(best, depth)
    return best


# -- exports ------------------------------------------------------------------


def edge_list_header(g: OrthoGraph) -> str:
    sp = g.space
    k = degree(g, 0) if g.n else 0
    return f"# {sp.ring.short_name} nu={sp.nu} delta={sp.delta} variant={sp.variant} n={g.n} k={k}"


def write_edge_list(g: OrthoGraph, fh: TextIO) -> int:
    fh.write(edge_list_header(g) + "\n")
    count = 0
    for i, j in g.edges():
        fh.write(f"{i} {j}\n")
        count += 1
    return count


def write_vertex_table(g: OrthoGraph, fh: TextIO) -> None:
    ring = g.space.ring
    for i, row in enumerate(g.coords):
        fh.write(f"{i}: {render_vector(ring, row)}\n")
