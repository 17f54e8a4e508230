"""Exact arithmetic in the Galois ring GR(p^s, m).

An element is stored as an integer *code*: the coefficient vector
(c_0, ..., c_{m-1}) of a residue polynomial modulo (h, p^s), packed as
sum c_j * q^j with q = p^s.  For m = 1 the code is simply the integer
modulo q, and an integer n < q always encodes the constant n.

Scalar operations work on codes; :class:`RingElem` wraps a code with
operator overloading for readable algebra.  The ``v*`` methods of
:class:`GaloisRing` act elementwise on numpy arrays of codes and back the
vectorised enumeration and adjacency code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    DegreeMismatch,
    InvariantViolation,
    MixedRings,
    NotASquare,
    NotAUnit,
    NotOddPrime,
    ReducibleModulus,
)

DEFAULT_BUDGET = 5 * 10**7
# m > 1 rings use full |R| x |R| lookup tables for vectorised arithmetic.
TABLE_CAP = 1024


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over Z/N, coefficient lists with least degree first -------


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divides_mod_p(f: Sequence[int], g: Sequence[int], p: int) -> bool:
    """True if monic f divides g over F_p."""
    r = [c % p for c in g]
    df = len(f) - 1
    for i in range(len(r) - 1, df - 1, -1):
        c = r[i]
        if c:
            for j in range(df + 1):
                r[i - df + j] = (r[i - df + j] - c * f[j]) % p
    return not any(r[:df])


def is_irreducible_mod_p(h: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial over F_p by exhaustive trial division."""
    m = len(h) - 1
    if m <= 1:
        return True
    for d in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if _poly_divides_mod_p(list(low) + [1], h, p):
                return False
    return True


def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """Least monic irreducible of degree m over F_p (ordered by sum c_i p^i)."""
    if m == 1:
        return (0, 1)
    for code in range(p**m):
        low = [(code // p**i) % p for i in range(m)]
        h = tuple(low) + (1,)
        if low[0] != 0 and is_irreducible_mod_p(h, p):
            return h
    raise InvariantViolation(f"no irreducible polynomial of degree {m} over F_{p}")


def format_poly(h: Sequence[int]) -> str:
    terms = []
    for i in range(len(h) - 1, -1, -1):
        c = h[i]
        if c == 0:
            continue
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if i == 0:
            terms.append(str(c))
        elif c == 1:
            terms.append(mono)
        else:
            terms.append(f"{c}{mono}")
    return "+".join(terms) if terms else "0"


@dataclass(frozen=True)
class GaloisRing:
    """RingSpec: the ring Z/p^s[x]/(h) with h basic irreducible of degree m."""

    p: int
    s: int
    m: int
    h: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (isinstance(self.p, int) and self.p % 2 == 1 and _is_prime(self.p)):
            raise NotOddPrime(f"p={self.p} is not an odd prime")
        if self.s < 1 or self.m < 1:
            raise DegreeMismatch("s and m must be positive")
        if len(self.h) != self.m + 1 or self.h[-1] % self.q != 1:
            raise DegreeMismatch(f"modulus must be monic of degree {self.m}")
        if not is_irreducible_mod_p([c % self.p for c in self.h], self.p):
            raise ReducibleModulus(f"{format_poly(self.h)} is reducible mod {self.p}")

    # -- sizes -------------------------------------------------------------

    @property
    def q(self) -> int:
        return self.p**self.s

    @property
    def size(self) -> int:
        return self.q**self.m

    @property
    def residue_size(self) -> int:
        return self.p**self.m

    @property
    def unit_count(self) -> int:
        return (self.p**self.m - 1) * self.p ** (self.m * (self.s - 1))

    def __str__(self) -> str:
        return f"GR({self.p}^{self.s},{self.m};{format_poly(self.h)})"

    @property
    def short_name(self) -> str:
        return f"GR({self.p}^{self.s},{self.m})"

    # -- code <-> coefficients ----------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        q = self.q
        return tuple((a // q**j) % q for j in range(self.m))

    def encode(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.m:
            raise DegreeMismatch(f"expected {self.m} coefficients, got {len(coeffs)}")
        q = self.q
        return sum((c % q) * q**j for j, c in enumerate(coeffs))

    def from_int(self, n: int) -> int:
        return n % self.q

    def __call__(self, x: int | Sequence[int] | "RingElem") -> "RingElem":
        if isinstance(x, RingElem):
            if x.ring != self:
                raise MixedRings(f"{x.ring} vs {self}")
            return x
        if isinstance(x, (int, np.integer)):
            return RingElem(self, self.from_int(int(x)))
        return RingElem(self, self.encode(list(x)))

    def elem(self, code: int) -> "RingElem":
        return RingElem(self, int(code))

    @property
    def zero(self) -> "RingElem":
        return RingElem(self, 0)

    @property
    def one(self) -> "RingElem":
        return RingElem(self, 1)

    # -- scalar arithmetic on codes -----------------------------------------

    def _poly_mul(self, a: int, b: int) -> int:
        q, m, h = self.q, self.m, self.h
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        for i in range(2 * m - 2, m - 1, -1):
            c = prod[i] % q
            if c:
                for j in range(m + 1):
                    prod[i - m + j] -= c * h[j]
        return self.encode([c % q for c in prod[:m]])

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.q
        ca, cb = self.coeffs(a), self.coeffs(b)
        return self.encode([x + y for x, y in zip(ca, cb)])

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.q
        return self.encode([-x for x in self.coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a * b) % self.q
        if self._tables is not None:
            return int(self._tables["mul"][a, b])
        return self._poly_mul(a, b)

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if self.m == 1:
            return pow(a, n, self.q)
        result, base = 1, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def residue(self, a: int) -> int:
        """Code of a mod p in F_{p^m}, packed as sum (c_j mod p) p^j."""
        p = self.p
        return sum((c % p) * p**j for j, c in enumerate(self.coeffs(a)))

    def is_unit(self, a: int) -> bool:
        return any(c % self.p for c in self.coeffs(a))

    def valuation(self, a: int) -> int:
        """Largest r with a in p^r R; valuation(0) = s."""
        cs = self.coeffs(a)
        r = 0
        while r < self.s and all(c % self.p ** (r + 1) == 0 for c in cs):
            r += 1
        return r

    def inv(self, a: int) -> int:
        if not self.is_unit(a):
            raise NotAUnit(f"{self.render(a)} is not a unit in {self}")
        if self.m == 1:
            return pow(a, -1, self.q)
        if self._tables is not None:
            return int(self._tables["inv"][a])
        # a^{|R*|-1} is the inverse in the unit group
        return self.pow(a, self.unit_count - 1)

    def p_power(self, r: int) -> int:
        return self.from_int(self.p**r) if r < self.s else 0

    def divide_p_power(self, a: int, r: int) -> int:
        """Coefficientwise a / p^r; requires valuation(a) >= r.

        The quotient is defined modulo p^{s-r}; the representative with
        coefficients in [0, p^{s-r}) is returned.
        """
        if self.valuation(a) < r:
            raise ArithmeticError(f"{self.render(a)} is not divisible by p^{r}")
        d = self.p**r
        return self.encode([c // d for c in self.coeffs(a)])

    def split_valuation(self, a: int) -> tuple[int, int]:
        """(r, u) with a = p^r * u and u a unit; a must be nonzero."""
        r = self.valuation(a)
        if r >= self.s:
            raise NotAUnit("zero has no unit part")
        return r, self.divide_p_power(a, r)

    def render(self, a: int) -> str:
        return ",".join(str(c) for c in self.coeffs(a))

    # -- vectorised arithmetic on numpy code arrays ---------------------------

    @cached_property
    def _tables(self) -> dict[str, np.ndarray] | None:
        if self.m == 1 or self.size > TABLE_CAP:
            return None
        n, q, m = self.size, self.q, self.m
        codes = np.arange(n, dtype=np.int64)
        cf = np.stack([(codes // q**j) % q for j in range(m)], axis=1)
        weights = q ** np.arange(m, dtype=np.int64)

        add = ((cf[:, None, :] + cf[None, :, :]) % q) @ weights
        neg = ((-cf) % q) @ weights

        prod = np.zeros((n, n, 2 * m - 1), dtype=np.int64)
        for i in range(m):
            for j in range(m):
                prod[:, :, i + j] += cf[:, None, i] * cf[None, :, j]
        prod %= q
        h = np.array(self.h, dtype=np.int64)
        for i in range(2 * m - 2, m - 1, -1):
            c = prod[:, :, i] % q
            for j in range(m + 1):
                prod[:, :, i - m + j] = (prod[:, :, i - m + j] - c * h[j]) % q
        mul = prod[:, :, :m] @ weights

        residue = (cf % self.p) @ (self.p ** np.arange(m, dtype=np.int64))
        unit = residue != 0
        inv = np.zeros(n, dtype=np.int64)
        rows, cols = np.nonzero(mul == 1)
        inv[rows] = cols
        dtype = np.int32
        return {
            "add": add.astype(dtype),
            "neg": neg.astype(dtype),
            "mul": mul.astype(dtype),
            "residue": residue.astype(dtype),
            "unit": unit,
            "inv": inv.astype(dtype),
        }

    def _need_tables(self) -> dict[str, np.ndarray]:
        t = self._tables
        if t is None:
            raise BudgetExceeded(
                f"vectorised arithmetic needs |R| <= {TABLE_CAP} when m > 1 ({self})"
            )
        return t

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.q
        return self._need_tables()["add"][a, b]

    def vneg(self, a: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.q
        return self._need_tables()["neg"][a]

    def vsub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (np.asarray(a, dtype=np.int64) * b) % self.q
        return self._need_tables()["mul"][a, b]

    def vresidue(self, a: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return np.asarray(a, dtype=np.int64) % self.p
        return self._need_tables()["residue"][a]

    def vis_unit(self, a: np.ndarray) -> np.ndarray:
        return self.vresidue(a) != 0

    def vinv(self, a: np.ndarray) -> np.ndarray:
        """Elementwise inverse; entries that are not units map to 0."""
        if self.m == 1:
            table = np.zeros(self.q, dtype=np.int64)
            units = np.array([u for u in range(self.q) if u % self.p], dtype=np.int64)
            table[units] = [pow(int(u), -1, self.q) for u in units]
            return table[np.asarray(a)]
        return self._need_tables()["inv"][a]

    def non_unit_codes(self) -> np.ndarray:
        """Codes of pR in increasing order."""
        codes = np.arange(self.size, dtype=np.int64)
        return codes[~self.vis_unit(codes)]

    # -- structure ----------------------------------------------------------

    @cached_property
    def teich(self) -> "TeichmullerTable":
        return teichmuller(self)


@dataclass(frozen=True, eq=False)
class RingElem:
    """An immutable element of a :class:`GaloisRing`."""

    ring: GaloisRing
    code: int

    def _other(self, other: "RingElem | int") -> int:
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise MixedRings(f"{self.ring} vs {other.ring}")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.ring.from_int(int(other))
        return NotImplemented  # type: ignore[return-value]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RingElem):
            return self.ring == other.ring and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.ring.from_int(int(other))
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, self.code))

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return RingElem(self.ring, self.ring.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return RingElem(self.ring, self.ring.sub(self.code, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return RingElem(self.ring, self.ring.sub(b, self.code))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return RingElem(self.ring, self.ring.mul(self.code, b))

    __rmul__ = __mul__

    def __neg__(self) -> "RingElem":
        return RingElem(self.ring, self.ring.neg(self.code))

    def __pow__(self, n: int) -> "RingElem":
        return RingElem(self.ring, self.ring.pow(self.code, n))

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return RingElem(self.ring, self.ring.mul(self.code, self.ring.inv(b)))

    def __rtruediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return RingElem(self.ring, self.ring.mul(b, self.ring.inv(self.code)))

    def __int__(self) -> int:
        return self.code

    def __index__(self) -> int:
        return self.code

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ring.coeffs(self.code)

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.code)

    def valuation(self) -> int:
        return self.ring.valuation(self.code)

    def inv(self) -> "RingElem":
        return RingElem(self.ring, self.ring.inv(self.code))

    def __str__(self) -> str:
        return self.ring.render(self.code)

    def __repr__(self) -> str:
        return f"RingElem({self}; {self.ring.short_name})"


def make_ring(p: int, s: int, m: int, h: Sequence[int] | None = None) -> GaloisRing:
    """Validated GR(p^s, m).  Without ``h`` the least irreducible mod p is lifted."""
    if not (isinstance(p, int) and p % 2 == 1 and _is_prime(p)):
        raise NotOddPrime(f"p={p} is not an odd prime")
    if s < 1 or m < 1:
        raise DegreeMismatch("s and m must be positive")
    if h is None:
        h = default_modulus(p, m)
    h = tuple(int(c) % p**s for c in h)
    if len(h) != m + 1:
        raise DegreeMismatch(f"modulus has degree {len(h) - 1}, expected {m}")
    if h[-1] != 1:
        raise DegreeMismatch("modulus must be monic")
    return GaloisRing(p, s, m, h)


# -- module-level operations --------------------------------------------------


def _same(a: RingElem, b: RingElem) -> GaloisRing:
    if a.ring != b.ring:
        raise MixedRings(f"{a.ring} vs {b.ring}")
    return a.ring


def add(a: RingElem, b: RingElem) -> RingElem:
    return RingElem(_same(a, b), a.ring.add(a.code, b.code))


def sub(a: RingElem, b: RingElem) -> RingElem:
    return RingElem(_same(a, b), a.ring.sub(a.code, b.code))


def mul(a: RingElem, b: RingElem) -> RingElem:
    return RingElem(_same(a, b), a.ring.mul(a.code, b.code))


def neg(a: RingElem) -> RingElem:
    return -a


def power(a: RingElem, n: int) -> RingElem:
    return a**n


def is_unit(a: RingElem) -> bool:
    return a.is_unit()


def inv(a: RingElem) -> RingElem:
    return a.inv()


def valuation(a: RingElem) -> int:
    return a.valuation()


@dataclass(frozen=True)
class TeichmullerTable:
    """{0, 1, xi, ..., xi^(p^m - 2)} with residue lookups."""

    xi: RingElem
    powers: tuple[RingElem, ...]
    dlog: dict[int, int]  # residue code -> exponent k with xi^k having that residue
    lift: dict[int, RingElem]  # residue code -> Teichmuller representative


def teichmuller(ring: GaloisRing) -> TeichmullerTable:
    pm = ring.residue_size
    order = pm - 1
    primes = _prime_factors(order) if order > 1 else []

    def residue_order_is_full(g: int) -> bool:
        if ring.residue(ring.pow(g, order)) != 1:
            return False
        return all(ring.residue(ring.pow(g, order // ell)) != 1 for ell in primes)

    g = None
    for rcode in range(1, pm):
        cand = ring.encode([(rcode // ring.p**j) % ring.p for j in range(ring.m)])
        if residue_order_is_full(cand):
            g = cand
            break
    if g is None:
        raise InvariantViolation(f"no generator of the residue field of {ring}")
    xi = ring.pow(g, ring.p ** (ring.m * (ring.s - 1)))
    if ring.pow(xi, order) != 1 or any(ring.pow(xi, order // ell) == 1 for ell in primes):
        raise InvariantViolation(f"xi={ring.render(xi)} does not have order {order}")

    powers = [ring.zero]
    dlog: dict[int, int] = {}
    lift: dict[int, RingElem] = {0: ring.zero}
    cur = 1
    for k in range(order):
        e = ring.elem(cur)
        powers.append(e)
        res = ring.residue(cur)
        if res in dlog:
            raise InvariantViolation("Teichmuller residues are not distinct")
        dlog[res] = k
        lift[res] = e
        cur = ring.mul(cur, xi)
    return TeichmullerTable(ring.elem(xi), tuple(powers), dlog, lift)


def padic_digits(a: RingElem) -> tuple[RingElem, ...]:
    """Teichmuller digits (a_0, ..., a_{s-1}) with a = sum a_i p^i."""
    ring = a.ring
    table = ring.teich
    digits = []
    cur = a.code
    for i in range(ring.s):
        t = table.lift[ring.residue(cur)]
        digits.append(t)
        if i < ring.s - 1:
            cur = ring.divide_p_power(ring.sub(cur, t.code), 1)
    return tuple(digits)


def is_square_unit(a: RingElem) -> bool:
    if not a.is_unit():
        raise NotAUnit(f"{a} is not a unit")
    ring = a.ring
    return ring.residue(ring.pow(a.code, (ring.residue_size - 1) // 2)) == 1


def sqrt_unit(a: RingElem) -> RingElem:
    """Square root of a unit square.

    The residue root comes from the discrete log of the Teichmuller digit;
    Newton steps x <- x - (x^2 - a)/(2x) lift it to full precision.  Of the
    two roots +-x the one whose 0-th digit has even discrete log wins; when
    p^m = 1 mod 4 both do, and the one with the smaller log is taken.
    """
    if not is_square_unit(a):
        raise NotASquare(f"{a} is not a square unit")
    ring = a.ring
    table = ring.teich
    order = ring.residue_size - 1
    k = table.dlog[ring.residue(a.code)]
    x = table.powers[1 + (k // 2)]
    for _ in range(ring.s):
        err = x * x - a
        if err == 0:
            break
        x = x - err / (2 * x)
    if x * x != a:
        raise InvariantViolation(f"square root lifting failed for {a}")

    def key(y: RingElem) -> tuple[int, int]:
        kk = table.dlog[ring.residue(y.code)]
        return (kk % 2, kk)

    return min(x, -x, key=key)


def nonsquare_z(ring: GaloisRing) -> RingElem:
    """The fixed non-square unit z, always the Teichmuller generator xi."""
    return ring.teich.xi


def _check_budget(ring: GaloisRing, budget: int) -> None:
    if ring.size > budget:
        raise BudgetExceeded(f"|R| = {ring.size} exceeds budget {budget}")


def enumerate_elements(ring: GaloisRing, budget: int = DEFAULT_BUDGET) -> Iterator[RingElem]:
    _check_budget(ring, budget)
    for code in range(ring.size):
        yield RingElem(ring, code)


def enumerate_units(ring: GaloisRing, budget: int = DEFAULT_BUDGET) -> Iterator[RingElem]:
    _check_budget(ring, budget)
    for code in range(ring.size):
        if ring.is_unit(code):
            yield RingElem(ring, code)
