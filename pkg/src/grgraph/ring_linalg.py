"""Vectors and matrices over GR(p^s, m), the Gram matrix of the orthogonal
geometry, and the generator families of the orthogonal group.

Vectors and matrices are numpy int64 arrays of element codes (see
:mod:`grgraph.galois_ring`).  Everything is dense; dimensions stay small.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    NotAlternate,
    NotAUnit,
    ZeroVector,
)
from .galois_ring import (
    DEFAULT_BUDGET,
    GaloisRing,
    RingElem,
    nonsquare_z,
    sqrt_unit,
)


@dataclass(frozen=True)
class FormSpace:
    """R^(2nu+delta) with the Gram matrix [[0, I, 0], [I, 0, 0], [0, 0, Delta]].

    ``variant`` picks Delta = (1) or (z) when delta = 1; for delta = 2 Delta
    is always diag(1, -z) and for delta = 0 it is empty.
    """

    ring: GaloisRing
    nu: int
    delta: int
    variant: str = "1"

    def __post_init__(self) -> None:
        if self.nu < 1:
            raise DimensionMismatch("nu must be >= 1")
        if self.delta not in (0, 1, 2):
            raise DimensionMismatch("delta must be 0, 1 or 2")
        if self.delta == 1 and self.variant not in ("1", "z"):
            raise ValueError("variant must be '1' or 'z'")
        if self.delta != 1 and self.variant != "1":
            # only delta = 1 has a choice; normalise so equal spaces compare equal
            object.__setattr__(self, "variant", "1")

    @property
    def dim(self) -> int:
        return 2 * self.nu + self.delta

    @property
    def z(self) -> RingElem:
        return nonsquare_z(self.ring)

    @cached_property
    def delta_diag(self) -> tuple[int, ...]:
        z = self.z
        if self.delta == 0:
            return ()
        if self.delta == 1:
            return (1,) if self.variant == "1" else (z.code,)
        return (1, (-z).code)

    @cached_property
    def Delta(self) -> np.ndarray:
        return diag(self.delta_diag)

    @cached_property
    def gram(self) -> np.ndarray:
        nu = self.nu
        I = identity(nu)
        Z = np.zeros((nu, nu), dtype=np.int64)
        return block_diag(np.block([[Z, I], [I, Z]]), self.Delta)

    @cached_property
    def half(self) -> RingElem:
        return self.ring(2).inv()

    def describe(self) -> str:
        return f"{self.ring.short_name} nu={self.nu} delta={self.delta} variant={self.variant}"


def make_space(ring: GaloisRing, nu: int, delta: int, variant: str = "1") -> FormSpace:
    return FormSpace(ring, nu, delta, variant)


# -- plumbing -----------------------------------------------------------------


def as_codes(ring: GaloisRing, x) -> np.ndarray:
    """Array of codes from a nested sequence of ints / RingElems or an array.

    Integers are reduced modulo p^s when m = 1; for m > 1 they must already
    be valid codes.
    """
    if isinstance(x, np.ndarray) and x.dtype != object:
        a = x.astype(np.int64)
    else:
        arr = np.asarray(x, dtype=object)
        flat = []
        for e in arr.ravel():
            if isinstance(e, RingElem):
                if e.ring != ring:
                    raise ValueError(f"element of {e.ring} used in {ring}")
                flat.append(e.code)
            else:
                flat.append(int(e))
        a = np.array(flat, dtype=np.int64).reshape(arr.shape)
    if ring.m == 1:
        return a % ring.q
    if a.size and (a.min() < 0 or a.max() >= ring.size):
        raise ValueError("codes out of range for m > 1 ring")
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def diag(entries: Sequence[int]) -> np.ndarray:
    return np.diag(np.asarray(entries, dtype=np.int64)).reshape(len(entries), len(entries))


def block_diag(*blocks: np.ndarray) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.int64)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out


def matmul(ring: GaloisRing, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.shape[-1] != B.shape[0]:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    if ring.m == 1:
        return (A @ B) % ring.q
    squeeze = A.ndim == 1
    A2 = A[None, :] if squeeze else A
    out = np.zeros((A2.shape[0],) + B.shape[1:], dtype=np.int64)
    for k in range(A2.shape[1]):
        if B.ndim == 1:
            term = ring.vmul(A2[:, k], B[k])
        else:
            term = ring.vmul(A2[:, k, None], B[k][None, :])
        out = ring.vadd(out, term).astype(np.int64)
    return out[0] if squeeze else out


def vecmat(ring: GaloisRing, v: Sequence[int], A: np.ndarray) -> np.ndarray:
    return matmul(ring, np.asarray(v, dtype=np.int64), A)


def mat_neg(ring: GaloisRing, A: np.ndarray) -> np.ndarray:
    return np.asarray(ring.vneg(np.asarray(A, dtype=np.int64)), dtype=np.int64)


def mat_scale(ring: GaloisRing, c: int | RingElem, A: np.ndarray) -> np.ndarray:
    if isinstance(c, RingElem):
        c = c.code
    elif ring.m == 1:
        c = int(c) % ring.q
    return np.asarray(ring.vmul(np.asarray(A, dtype=np.int64), c), dtype=np.int64)


def mat_add(ring: GaloisRing, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.asarray(ring.vadd(np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)), dtype=np.int64)


def inverse(ring: GaloisRing, A: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse; over a local ring every invertible matrix has a
    unit pivot available in each column."""
    A = np.array(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch("inverse of a non-square matrix")
    M = [[int(x) for x in row] + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if ring.is_unit(M[r][col])), None)
        if piv is None:
            raise NotAUnit("matrix is not invertible over the ring")
        M[col], M[piv] = M[piv], M[col]
        u = ring.inv(M[col][col])
        M[col] = [ring.mul(u, x) for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(M[r], M[col])]
    return np.array([row[n:] for row in M], dtype=np.int64).reshape(n, n)


def det(ring: GaloisRing, A: np.ndarray) -> RingElem:
    """Determinant by cofactor expansion (small matrices only)."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if n == 0:
        return ring.one
    if n == 1:
        return ring.elem(A[0, 0])
    total = ring.zero
    for j in range(n):
        if A[0, j] == 0:
            continue
        minor = np.delete(np.delete(A, 0, axis=0), j, axis=1)
        term = ring.elem(A[0, j]) * det(ring, minor)
        total = total + term if j % 2 == 0 else total - term
    return total


# -- forms --------------------------------------------------------------------


def _check_len(space: FormSpace, *vs) -> None:
    for v in vs:
        if len(v) != space.dim:
            raise DimensionMismatch(f"vector of length {len(v)} in dimension {space.dim}")


def bilinear(space: FormSpace, a: Sequence[int], b: Sequence[int]) -> RingElem:
    """a S b^t."""
    _check_len(space, a, b)
    ring = space.ring
    aS = vecmat(ring, a, space.gram)
    return ring.elem(int(matmul(ring, aS, np.asarray(b, dtype=np.int64))))


def quad(space: FormSpace, a: Sequence[int]) -> RingElem:
    return bilinear(space, a, a)


def is_orthogonal(space: FormSpace, T: np.ndarray) -> bool:
    """T S T^t == S."""
    T = np.asarray(T, dtype=np.int64)
    if T.shape != (space.dim, space.dim):
        raise DimensionMismatch(f"expected {space.dim}x{space.dim}, got {T.shape}")
    ring = space.ring
    return bool(np.array_equal(matmul(ring, matmul(ring, T, space.gram), T.T), space.gram))


# -- generators ---------------------------------------------------------------


def _check_P(space: FormSpace, P: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=np.int64)
    if P.size == 0:
        P = P.reshape(space.nu, space.delta)
    if P.shape != (space.nu, space.delta):
        raise DimensionMismatch(f"P must be {space.nu}x{space.delta}, got {P.shape}")
    return P


def _h_pieces(space: FormSpace, P: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(-1/2 P Delta P^t, -P, Delta P^t)."""
    ring = space.ring
    PDPt = matmul(ring, matmul(ring, P, space.Delta), P.T) if space.delta else np.zeros((space.nu, space.nu), dtype=np.int64)
    corner = mat_neg(ring, mat_scale(ring, space.half, PDPt))
    return corner, mat_neg(ring, P), matmul(ring, space.Delta, P.T) if space.delta else np.zeros((0, space.nu), dtype=np.int64)


def gen_H(space: FormSpace, P: np.ndarray) -> np.ndarray:
    """[[I, -1/2 P Delta P^t, -P], [0, I, 0], [0, Delta P^t, I]]."""
    P = _check_P(space, P)
    nu, d = space.nu, space.delta
    corner, negP, DPt = _h_pieces(space, P)
    M = identity(space.dim)
    M[:nu, nu : 2 * nu] = corner
    M[:nu, 2 * nu :] = negP
    M[2 * nu :, nu : 2 * nu] = DPt
    return M


def gen_T(space: FormSpace, P: np.ndarray) -> np.ndarray:
    """[[I, 0, 0], [-1/2 P Delta P^t, I, -P], [Delta P^t, 0, I]]."""
    P = _check_P(space, P)
    nu = space.nu
    corner, negP, DPt = _h_pieces(space, P)
    M = identity(space.dim)
    M[nu : 2 * nu, :nu] = corner
    M[nu : 2 * nu, 2 * nu :] = negP
    M[2 * nu :, :nu] = DPt
    return M


def _check_alternate(ring: GaloisRing, Q: np.ndarray, nu: int) -> np.ndarray:
    Q = np.asarray(Q, dtype=np.int64)
    if Q.shape != (nu, nu):
        raise DimensionMismatch(f"Q must be {nu}x{nu}")
    if np.any(np.diag(Q) != 0) or not np.array_equal(mat_neg(ring, Q.T), Q):
        raise NotAlternate("Q must satisfy Q^t = -Q with zero diagonal")
    return Q


def gen_K(space: FormSpace, Q: np.ndarray) -> np.ndarray:
    """[[I, Q, 0], [0, I, 0], [0, 0, I]] for alternate Q."""
    nu = space.nu
    Q = _check_alternate(space.ring, Q, nu)
    M = identity(space.dim)
    M[:nu, nu : 2 * nu] = Q
    return M


def gen_K_dual(space: FormSpace, Q: np.ndarray) -> np.ndarray:
    """[[I, 0, 0], [Q, I, 0], [0, 0, I]]; fixes every e_i with i <= nu."""
    nu = space.nu
    Q = _check_alternate(space.ring, Q, nu)
    M = identity(space.dim)
    M[nu : 2 * nu, :nu] = Q
    return M


def gen_Q(ring: GaloisRing, t: int, xs: Sequence[int]) -> np.ndarray:
    """The t x t alternate matrix with first row (0, -x_1, ..., -x_{t-1}) and
    first column (0, x_1, ..., x_{t-1})."""
    if len(xs) != t - 1:
        raise DimensionMismatch(f"Q_{t} takes {t - 1} entries")
    Q = np.zeros((t, t), dtype=np.int64)
    if t > 1:
        x = as_codes(ring, list(xs))
        Q[1:, 0] = x
        Q[0, 1:] = mat_neg(ring, x)
    return Q


def gen_D(space: FormSpace, A: np.ndarray) -> np.ndarray:
    """diag(A, (A^{-1})^t, I_delta) for invertible nu x nu A."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape != (space.nu, space.nu):
        raise DimensionMismatch(f"A must be {space.nu}x{space.nu}")
    return block_diag(A, inverse(space.ring, A).T, identity(space.delta))


def hyperbolic_swap(space: FormSpace, indices: Sequence[int] | None = None) -> np.ndarray:
    """Exchange e_j and e_{nu+j} for each (0-based) j in ``indices`` (all by default)."""
    nu = space.nu
    idx = range(nu) if indices is None else indices
    perm = list(range(space.dim))
    for j in idx:
        perm[j], perm[nu + j] = nu + j, j
    return identity(space.dim)[perm]


def tail_block(space: FormSpace, U: np.ndarray) -> np.ndarray:
    """diag(I_{2nu}, U)."""
    return block_diag(identity(2 * space.nu), np.asarray(U, dtype=np.int64))


# -- reductions -----------------------------------------------------------------


def unimodular_reduce_row(ring: GaloisRing, v: Sequence[int]) -> tuple[np.ndarray, int]:
    """Invertible T and r with v T = (p^r, 0, ..., 0), r the minimal valuation.

    Pivot is the leftmost entry of minimal valuation; it is moved to the
    front, its unit part divided out, and the other entries cleared by
    column additions.
    """
    v = [int(x) for x in as_codes(ring, list(v))]
    n = len(v)
    vals = [ring.valuation(x) for x in v]
    if n == 0 or min(vals) >= ring.s:
        raise ZeroVector("vector has no entry of valuation < s")
    r = min(vals)
    j = vals.index(r)
    u = ring.divide_p_power(v[j], r)
    T = identity(n)
    if j:
        T[:, [0, j]] = T[:, [j, 0]]
    T[:, 0] = mat_scale(ring, ring.inv(u), T[:, 0])
    w = [int(x) for x in vecmat(ring, v, T)]
    for k in range(1, n):
        if w[k]:
            f = ring.divide_p_power(w[k], r)
            T[:, k] = mat_add(ring, T[:, k], mat_neg(ring, mat_scale(ring, f, T[:, 0])))
    return T, r


def solve_norm_one(ring: GaloisRing) -> tuple[RingElem, RingElem] | None:
    """Units c, d with c^2 - d^2 z = 1, or None when none exist (p^m = 3)."""
    z = nonsquare_z(ring)
    table = ring.teich
    for dres in range(1, ring.residue_size):
        d = table.lift[dres]
        c2 = 1 + d * d * z
        if not c2.is_unit():
            continue
        if ring.residue(ring.pow(c2.code, (ring.residue_size - 1) // 2)) != 1:
            continue
        c = sqrt_unit(c2)
        if c * c - d * d * z == 1 and c.is_unit() and d.is_unit():
            return c, d
    return None


def delta_orthogonal_group(
    space: FormSpace, budget: int = DEFAULT_BUDGET, brute: bool = False
) -> list[np.ndarray]:
    """All 2x2 U with U Delta U^t = Delta for Delta = diag(1, -z).

    The default construction enumerates first rows (a, b) with
    a^2 - z b^2 = 1; the second row is then +-(z b, a).  ``brute`` filters
    all |R|^4 matrices instead.
    """
    if space.delta != 2:
        raise DimensionMismatch("delta_orthogonal_group needs delta = 2")
    ring = space.ring
    z = space.z.code
    codes = np.arange(ring.size, dtype=np.int64)
    if brute:
        if ring.size**4 > budget:
            raise BudgetExceeded(f"|R|^4 = {ring.size ** 4} exceeds budget {budget}")
        a, b, c, d = (g.ravel() for g in np.meshgrid(codes, codes, codes, codes, indexing="ij"))
        negz = ring.neg(z)
        # U Delta U^t = [[a^2 - z b^2, ac - z bd], [ac - z bd, c^2 - z d^2]]
        e11 = ring.vsub(ring.vmul(a, a), ring.vmul(z, ring.vmul(b, b)))
        e12 = ring.vsub(ring.vmul(a, c), ring.vmul(z, ring.vmul(b, d)))
        e22 = ring.vsub(ring.vmul(c, c), ring.vmul(z, ring.vmul(d, d)))
        ok = (e11 == 1) & (e12 == 0) & (e22 == negz)
        return [np.array([[a[i], b[i]], [c[i], d[i]]], dtype=np.int64) for i in np.nonzero(ok)[0]]
    if ring.size**2 > budget:
        raise BudgetExceeded(f"|R|^2 = {ring.size ** 2} exceeds budget {budget}")
    a, b = (g.ravel() for g in np.meshgrid(codes, codes, indexing="ij"))
    norm = ring.vsub(ring.vmul(a, a), ring.vmul(z, ring.vmul(b, b)))
    out = []
    for i in np.nonzero(norm == 1)[0]:
        ai, bi = int(a[i]), int(b[i])
        row2 = np.array([ring.mul(z, bi), ai], dtype=np.int64)
        for sign in (1, -1):
            second = row2 if sign == 1 else mat_neg(ring, row2)
            out.append(np.array([[ai, bi], list(second)], dtype=np.int64))
    out.sort(key=lambda U: tuple(U.ravel()))
    return out


# -- text formats -------------------------------------------------------------


def render_entry(ring: GaloisRing, code: int) -> str:
    text = ring.render(int(code))
    return text if ring.m == 1 else f"({text})"


def render_vector(ring: GaloisRing, v: Sequence[int]) -> str:
    return ",".join(render_entry(ring, x) for x in v)


def render_matrix(ring: GaloisRing, M: np.ndarray) -> str:
    return ";".join(render_vector(ring, row) for row in np.asarray(M))


def parse_vector(ring: GaloisRing, text: str) -> np.ndarray:
    """Inverse of :func:`render_vector`; m > 1 entries are "(c0,c1,...)"."""
    text = text.strip()
    if ring.m == 1:
        return np.array([int(t) % ring.q for t in text.split(",")], dtype=np.int64)
    out = []
    for part in text.replace(" ", "").split("),"):
        part = part.strip("()")
        coeffs = [int(t) for t in part.split(",")]
        out.append(ring.encode(coeffs))
    return np.array(out, dtype=np.int64)


def parse_matrix(ring: GaloisRing, text: str) -> np.ndarray:
    return np.array([parse_vector(ring, row) for row in text.split(";")], dtype=np.int64)


def all_vectors(ring: GaloisRing, length: int):
    """Every length-``length`` tuple of codes, lexicographic."""
    return itertools.product(range(ring.size), repeat=length)
