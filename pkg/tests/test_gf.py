import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nbpolar.gf import (PRIMITIVE_POLYS, FieldError, FieldSpec, field_new, field_of_size,
                        is_irreducible, prime_power)

SMALL = [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4), (13, 1)]
LARGE = [(2, 6), (2, 8), (3, 4), (5, 3), (251, 1), (3, 5)]


def poly_mul_oracle(a, b, p, m, poly):
    """Multiply encoded elements via schoolbook polynomial arithmetic."""
    da = [(a // p ** i) % p for i in range(m)]
    db = [(b // p ** i) % p for i in range(m)]
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(da):
        for j, y in enumerate(db):
            prod[i + j] = (prod[i + j] + x * y) % p
    for deg in range(2 * m - 2, m - 1, -1):
        c = prod[deg]
        if c:
            for k in range(m + 1):
                prod[deg - m + k] = (prod[deg - m + k] - c * poly[k]) % p
    return sum(prod[i] * p ** i for i in range(m))


def poly_add_oracle(a, b, p, m):
    return sum((((a // p ** i) + (b // p ** i)) % p) * p ** i for i in range(m))


def test_prime_fields_and_gf4_examples():
    f2 = field_new(2, 1)
    assert f2.q == 2 and f2.mul(1, 1) == 1 and f2.add(1, 1) == 0
    f3 = field_new(3, 1)
    assert f3.mul(2, 2) == 1
    f4 = field_new(2, 2)
    assert f4.mul(2, 2) == 3
    assert f4.add(2, 3) == 1
    assert f4.alpha == 2


def test_canonical_polynomials():
    expected = {
        (2, 2): [1, 1, 1], (2, 3): [1, 1, 0, 1], (3, 2): [2, 1, 1],
        (2, 4): [1, 1, 0, 0, 1], (2, 6): [1, 1, 0, 0, 0, 0, 1], (2, 8): [1, 0, 1, 1, 1, 0, 0, 0, 1],
    }
    for (p, m), poly in expected.items():
        assert list(PRIMITIVE_POLYS[(p, m)]) == poly
        assert list(field_new(p, m).primitive_poly) == poly


@pytest.mark.parametrize("p,m", SMALL + LARGE)
def test_tables_match_polynomial_oracle(p, m):
    f = field_new(p, m)
    rng = np.random.default_rng(p * 100 + m)
    pairs = rng.integers(0, f.q, size=(300, 2))
    for a, b in pairs:
        a, b = int(a), int(b)
        assert f.mul(a, b) == poly_mul_oracle(a, b, p, m, f.primitive_poly)
        assert f.add(a, b) == poly_add_oracle(a, b, p, m)


@pytest.mark.parametrize("p,m", SMALL)
def test_axioms_exhaustive_small(p, m):
    f = field_new(p, m)
    x = np.arange(f.q)
    A, B = np.meshgrid(x, x, indexing="ij")
    assert np.array_equal(f.add(A, B), f.add(B, A))
    assert np.array_equal(f.mul(A, B), f.mul(B, A))
    for c in range(f.q):
        assert np.array_equal(f.add(f.add(A, B), c), f.add(A, f.add(B, c)))
        assert np.array_equal(f.mul(f.mul(A, B), c), f.mul(A, f.mul(B, c)))
        assert np.array_equal(f.mul(c, f.add(A, B)), f.add(f.mul(c, A), f.mul(c, B)))
    assert np.all(f.add(x, f.neg(x)) == 0)
    nz = x[1:]
    assert np.all(f.mul(nz, f.inv(nz)) == 1)
    # unique inverses: each nonzero row of the multiplication table is a permutation
    assert all(sorted(f.mul_table[a]) == list(range(f.q)) for a in nz)


@pytest.mark.parametrize("p,m", [(2, 5), (2, 6), (2, 7), (2, 8), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)])
def test_axioms_large(p, m):
    f = field_new(p, m)
    x = np.arange(f.q)
    A, B = np.meshgrid(x, x, indexing="ij")
    assert np.array_equal(f.add(A, B), f.add(B, A))
    assert np.array_equal(f.mul(A, B), f.mul(B, A))
    assert np.all(f.mul(x[1:], f.inv(x[1:])) == 1)
    assert np.all(f.add(x, f.neg(x)) == 0)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, f.q - 1), st.integers(0, f.q - 1), st.integers(0, f.q - 1))
    def sampled(a, b, c):
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))

    sampled()


@pytest.mark.parametrize("p,m", SMALL + LARGE)
def test_alpha_primitive(p, m):
    f = field_new(p, m)
    powers = [f.pow(f.alpha, k) for k in range(f.q - 1)]
    assert sorted(powers) == list(range(1, f.q))
    assert f.mul(f.alpha, f.pow(f.alpha, f.q - 2)) == 1
    if m > 1:
        assert f.alpha == p


@pytest.mark.parametrize("p,m", SMALL + LARGE)
def test_characteristic(p, m):
    f = field_new(p, m)
    x = np.arange(f.q)
    acc = np.zeros_like(x)
    for _ in range(p):
        acc = f.add(acc, x)
    assert np.all(acc == 0)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        field_new(2, 2).inv(0)


@pytest.mark.parametrize("p,m", [(4, 1), (6, 1), (1, 1), (2, 0), (2, 17), (257, 2)])
def test_bad_parameters(p, m):
    with pytest.raises(FieldError):
        field_new(p, m)


def test_field_of_size():
    assert field_of_size(9) == field_new(3, 2)
    assert prime_power(64) == (2, 6)
    with pytest.raises(FieldError):
        field_of_size(12)


def test_irreducibility_check():
    assert is_irreducible([1, 1, 1], 2)
    assert not is_irreducible([1, 0, 1], 2)          # (X+1)^2
    assert not is_irreducible([1, 0, 1, 0, 1], 2)    # (X^2+X+1)^2, no roots
    assert is_irreducible([2, 1, 1], 3)


def test_large_field_without_tables():
    f = field_new(2, 10)
    assert f.add_table is None
    x = np.arange(1, f.q)
    assert np.all(f.mul(x, f.inv(x)) == 1)
    rng = np.random.default_rng(3)
    for a, b in rng.integers(0, f.q, size=(100, 2)):
        assert f.mul(int(a), int(b)) == poly_mul_oracle(int(a), int(b), 2, 10, f.primitive_poly)


def test_vec_matmul_examples():
    f2 = field_new(2, 1)
    assert f2.vec_matmul([0, 1], [[1, 0], [1, 1]]).tolist() == [1, 1]
    assert f2.vec_matmul([0, 0], [[1, 0], [1, 1]]).tolist() == [0, 0]
    assert f2.vec_matmul([1, 0], np.eye(2, dtype=int)).tolist() == [1, 0]
    with pytest.raises(ValueError):
        f2.vec_matmul([1, 0, 1], [[1, 0], [1, 1]])


@pytest.mark.parametrize("p,m", [(2, 2), (3, 2), (5, 1), (2, 4), (2, 10)])
def test_vec_matmul_against_scalar_loop(p, m):
    f = field_new(p, m)
    rng = np.random.default_rng(7)
    M = rng.integers(0, f.q, size=(5, 6))
    V = rng.integers(0, f.q, size=(4, 5))
    out = f.vec_matmul(V, M)
    for v, row in zip(V, out):
        ref = [0] * 6
        for i, j in itertools.product(range(5), range(6)):
            ref[j] = f.add(ref[j], f.mul(int(v[i]), int(M[i, j])))
        assert row.tolist() == ref


def test_matrix_inverse_and_rank():
    f = field_new(3, 2)
    rng = np.random.default_rng(11)
    for _ in range(20):
        M = rng.integers(0, f.q, size=(4, 4))
        if f.rank(M) == 4:
            assert np.array_equal(f.matmul(M, f.inverse(M)), np.eye(4, dtype=np.int64))
    assert f.rank([[1, 2], [2, f.mul(2, 2)]]) == 1


def test_immutable_tables():
    f = field_new(2, 2)
    with pytest.raises(ValueError):
        f.mul_table[1, 1] = 0
    assert isinstance(f, FieldSpec) and hash(f) == hash(field_new(2, 2))
