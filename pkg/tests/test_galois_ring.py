import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from grgraph import galois_ring as gr
from grgraph.errors import DegreeMismatch, MixedRings, NotASquare, NotAUnit, NotOddPrime, ReducibleModulus


# naive oracle: polynomials as coefficient lists, reduced mod (p^s, h)
def poly_mulmod(a, b, h, q):
    m = len(h) - 1
    prod = [0] * (2 * m)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] += x * y
    for d in range(2 * m - 1, m - 1, -1):
        c = prod[d]
        if c:
            for k in range(m + 1):
                prod[d - m + k] -= c * h[k]
    return [c % q for c in prod[:m]]


def elems(R):
    return st.integers(0, R.size - 1).map(R.elem)


def unit_elems(R):
    return elems(R).filter(lambda a: a.is_unit())


def test_unit_count_formula(ring):
    units = sum(1 for a in gr.enumerate_elements(ring) if a.is_unit())
    assert units == ring.unit_count == (ring.p**ring.m - 1) * ring.p ** (ring.m * (ring.s - 1))


def test_mul_matches_naive_polynomials(ring):
    h, q = list(ring.h), ring.q
    for a, b in itertools.product(range(min(ring.size, 30)), range(ring.size)):
        want = poly_mulmod(list(ring.coeffs(a)), list(ring.coeffs(b)), h, q)
        assert ring.coeffs(ring.mul(a, b)) == tuple(want)


def test_vector_ops_match_scalar(ring):
    codes = np.arange(ring.size, dtype=np.int64)
    b = codes[::-1].copy()
    assert [int(x) for x in ring.vmul(codes, b)] == [ring.mul(int(x), int(y)) for x, y in zip(codes, b)]
    assert [int(x) for x in ring.vadd(codes, b)] == [ring.add(int(x), int(y)) for x, y in zip(codes, b)]
    assert [bool(x) for x in ring.vis_unit(codes)] == [ring.is_unit(int(x)) for x in codes]


@given(data=st.data())
def test_ring_axioms(ring, data):
    a, b, c = (data.draw(elems(ring)) for _ in range(3))
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == 0
    assert a + (-a) == ring.zero


@given(data=st.data())
def test_inverse(ring, data):
    a = data.draw(unit_elems(ring))
    assert a * a.inv() == 1
    assert (a / a) == ring.one


def test_non_unit_has_no_inverse(ring):
    if ring.s == 1:
        pytest.skip("field")
    with pytest.raises(NotAUnit):
        ring(ring.p).inv()


@given(data=st.data())
def test_valuation_and_split(ring, data):
    a = data.draw(elems(ring))
    if a == 0:
        assert a.valuation() == ring.s
        with pytest.raises(NotAUnit):
            ring.split_valuation(0)
        return
    r, u = ring.split_valuation(a.code)
    assert r == a.valuation() < ring.s
    assert ring.is_unit(u)
    assert ring.mul(ring.p_power(r), u) == a.code


def test_teichmuller_xi_order(ring):
    t = gr.teichmuller(ring)
    xi = t.xi
    order = ring.residue_size - 1
    assert xi**order == 1
    assert all(xi**k != 1 for k in range(1, order))
    # Teichmuller elements are fixed by the p^m-th power map
    assert all(x ** ring.residue_size == x for x in t.powers)


def test_digits_round_trip_exhaustive(ring):
    table = ring.teich
    teich_set = set(table.powers)
    for a in gr.enumerate_elements(ring):
        digits = gr.padic_digits(a)
        assert len(digits) == ring.s
        assert all(d in teich_set for d in digits)
        back = ring.zero
        for i, d in enumerate(digits):
            back = back + d * ring(ring.p_power(i))
        assert back == a


def test_digit_examples():
    R = gr.make_ring(3, 2, 1)
    assert tuple(int(d) for d in gr.padic_digits(R(5))) == (8, 8)
    assert tuple(int(d) for d in gr.padic_digits(R(3))) == (0, 1)


def test_sqrt_exhaustive(ring):
    squares = {}
    for a in gr.enumerate_units(ring):
        squares.setdefault(a * a, []).append(a)
    for a in gr.enumerate_units(ring):
        assert gr.is_square_unit(a) == (a in squares)
        if a in squares:
            x = gr.sqrt_unit(a)
            assert x * x == a
            assert x in squares[a]
        else:
            with pytest.raises(NotASquare):
                gr.sqrt_unit(a)


def test_sqrt_examples():
    R = gr.make_ring(3, 2, 1)
    assert int(gr.sqrt_unit(R(7))) == 4
    assert int(gr.sqrt_unit(R(1))) == 1
    assert not gr.is_square_unit(R(8))


@pytest.mark.parametrize(
    "pm,xi",
    [((3, 2, 1), 8), ((5, 2, 1), 7), ((3, 3, 1), 26), ((3, 1, 1), 2)],
)
def test_nonsquare_z_values(pm, xi):
    R = gr.make_ring(*pm)
    z = gr.nonsquare_z(R)
    assert int(z) == xi
    assert not gr.is_square_unit(z)


def test_nonsquare_gr92():
    R = gr.make_ring(3, 2, 2)
    assert R.h == (1, 0, 1)
    z = gr.nonsquare_z(R)
    assert z.coeffs == (7, 7)
    assert not gr.is_square_unit(z)


def test_validation_errors():
    with pytest.raises(NotOddPrime):
        gr.make_ring(2, 2, 1)
    with pytest.raises(NotOddPrime):
        gr.make_ring(9, 1, 1)
    with pytest.raises(ReducibleModulus):
        gr.make_ring(3, 2, 2, (2, 0, 1))  # x^2 + 2 = (x-1)(x+1) mod 3
    with pytest.raises(DegreeMismatch):
        gr.make_ring(3, 2, 2, (1, 1))


def test_mixed_rings():
    a = gr.make_ring(3, 2, 1)(1)
    b = gr.make_ring(5, 2, 1)(1)
    with pytest.raises(MixedRings):
        a + b


@pytest.mark.parametrize("p,m", [(3, 2), (3, 3), (5, 2), (7, 2)])
def test_default_modulus_is_least_irreducible(p, m):
    # for degree 2 and 3, irreducible over F_p <=> no root
    def has_root(poly):
        return any(sum(c * x**i for i, c in enumerate(poly)) % p == 0 for x in range(p))

    least = None
    for code in range(p**m):
        lower = [(code // p**i) % p for i in range(m)]
        if lower[0] and not has_root(lower + [1]):
            least = tuple(lower + [1])
            break
    assert gr.default_modulus(p, m) == least
    assert gr.is_irreducible_mod_p(least, p)
