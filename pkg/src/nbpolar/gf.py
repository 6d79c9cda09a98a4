"""Finite field arithmetic over GF(p^m).

Elements are integers in [0, q).  An element with polynomial coefficients
(c_0, ..., c_{m-1}) in powers of the primitive element alpha is encoded as
sum(c_i * p**i), so 0 -> 0, 1 -> 1 and alpha -> p.  For prime fields the
encoding is just the residue.

Fields with q <= 256 carry full q x q addition and multiplication tables,
which the encoder and decoder index directly with numpy arrays.  Larger
fields (up to 2**16) fall back to log/exp tables and digit-wise addition.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

MAX_FIELD_SIZE = 1 << 16
TABLE_LIMIT = 256

# Coefficients c_0..c_m of the monic primitive polynomial, lowest degree first.
PRIMITIVE_POLYS = {
    (2, 2): (1, 1, 1),                    # X^2 + X + 1
    (2, 3): (1, 1, 0, 1),                 # X^3 + X + 1
    (3, 2): (2, 1, 1),                    # X^2 + X + 2
    (2, 4): (1, 1, 0, 0, 1),              # X^4 + X + 1
    (2, 6): (1, 1, 0, 0, 0, 0, 1),        # X^6 + X + 1
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),  # X^8 + X^4 + X^3 + X^2 + 1
}


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, m) with q == p**m, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, rest = 0, q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, m


# -- polynomials over GF(p), coefficient lists lowest degree first ----------

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    a = _poly_trim(a)
    b = _poly_trim(b)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * c) % p
        a = _poly_trim(a)
    return a


def is_irreducible(poly, p: int) -> bool:
    """Irreducibility of a monic polynomial over GF(p).

    Degrees <= 3 only need a root check; otherwise every monic divisor of
    degree up to m // 2 is tried.
    """
    poly = list(poly)
    m = len(poly) - 1
    if m < 1 or poly[-1] % p != 1:
        return False
    if m == 1:
        return True
    if m <= 3:
        for x in range(p):
            if sum(c * pow(x, i, p) for i, c in enumerate(poly)) % p == 0:
                return False
        return True
    for d in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def _exp_table(poly, p: int) -> list[int] | None:
    """Powers alpha^0 .. alpha^(q-2) as encoded ints; None if alpha is not primitive."""
    m = len(poly) - 1
    q = p ** m
    coeffs = [1] + [0] * (m - 1)
    table = []
    seen = set()
    for _ in range(q - 1):
        code = sum(c * p ** i for i, c in enumerate(coeffs))
        if code in seen:
            return None
        seen.add(code)
        table.append(code)
        # multiply by X, then reduce X^m = -(c_0 + ... + c_{m-1} X^{m-1})
        top = coeffs[-1]
        coeffs = [0] + coeffs[:-1]
        coeffs = [(c - top * poly[i]) % p for i, c in enumerate(coeffs)]
    return table


def _find_primitive_poly(p: int, m: int):
    for low in itertools.product(range(p), repeat=m):
        poly = tuple(reversed(low)) + (1,)
        if poly[0] == 0:
            continue
        if is_irreducible(poly, p) and _exp_table(poly, p) is not None:
            return poly
    raise FieldError(f"no primitive polynomial found for GF({p}^{m})")


class FieldSpec:
    """The finite field GF(p^m) with a fixed primitive polynomial.

    Parameters
    ----------
    p : int
        Prime characteristic.
    m : int
        Extension degree, at least 1.
    primitive_poly : sequence of int, optional
        Monic polynomial coefficients, lowest degree first.  Defaults to the
        canonical choice for (p, m).

    Operations accept python ints or integer numpy arrays and broadcast.
    """

    def __init__(self, p: int, m: int, primitive_poly=None):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if m < 1:
            raise FieldError(f"extension degree must be >= 1, got {m}")
        q = p ** m
        if q > MAX_FIELD_SIZE:
            raise FieldError(f"GF({p}^{m}) exceeds the supported size {MAX_FIELD_SIZE}")
        if primitive_poly is None:
            if m == 1:
                # X - g for the smallest generator g of Z_p^*
                g = next(g for g in range(1, p) if p == 2 or all(
                    pow(g, (p - 1) // f, p) != 1 for f in range(2, p) if (p - 1) % f == 0 and is_prime(f)))
                primitive_poly = ((-g) % p, 1)
            else:
                primitive_poly = PRIMITIVE_POLYS.get((p, m)) or _find_primitive_poly(p, m)
        primitive_poly = tuple(int(c) % p for c in primitive_poly)
        if len(primitive_poly) != m + 1 or primitive_poly[-1] != 1:
            raise FieldError(f"primitive polynomial must be monic of degree {m}")
        if not is_irreducible(primitive_poly, p):
            raise FieldError(f"polynomial {primitive_poly} is reducible over GF({p})")

        self.p = p
        self.m = m
        self.q = q
        self.primitive_poly = primitive_poly

        if m == 1:
            # integer encoding is the residue; the generator only feeds exp/log
            g = (-primitive_poly[0]) % p
            exp = [pow(g, k, p) for k in range(q - 1)]
        else:
            exp = _exp_table(primitive_poly, p)
            if exp is None:
                raise FieldError(f"polynomial {primitive_poly} is not primitive")
        self.exp = np.array(exp + exp, dtype=np.int64)
        self.log = np.zeros(q, dtype=np.int64)
        self.log[self.exp[: q - 1]] = np.arange(q - 1)
        self.alpha = int(self.exp[1]) if q > 2 else 1

        self._digits = np.array(
            [[(x // p ** i) % p for i in range(m)] for x in range(q)] if q <= TABLE_LIMIT else [[0]],
            dtype=np.int64)
        self._weights = p ** np.arange(m, dtype=np.int64)

        self.add_table = None
        self.mul_table = None
        if q <= TABLE_LIMIT:
            d = self._digits
            self.add_table = (((d[:, None, :] + d[None, :, :]) % p) @ self._weights).astype(np.int64)
            a = np.arange(q)
            la = self.log[a]
            mt = self.exp[(la[:, None] + la[None, :]) % (q - 1)]
            mt[0, :] = 0
            mt[:, 0] = 0
            self.mul_table = mt.astype(np.int64)
            for t in (self.add_table, self.mul_table):
                t.setflags(write=False)
        self.neg_table = self._neg_all()
        self.inv_table = np.zeros(q, dtype=np.int64)
        self.inv_table[1:] = self.exp[(-self.log[1:]) % (q - 1)]
        for t in (self.exp, self.log, self.neg_table, self.inv_table):
            t.setflags(write=False)

    def _neg_all(self):
        x = np.arange(self.q, dtype=np.int64)
        if self.p == 2:
            return x.copy()
        out = np.zeros_like(x)
        rest = x.copy()
        for i in range(self.m):
            out += ((-(rest % self.p)) % self.p) * self.p ** i
            rest //= self.p
        return out

    def __repr__(self):
        return f"FieldSpec(p={self.p}, m={self.m})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.m, self.primitive_poly) == (
            other.p, other.m, other.primitive_poly)

    def __hash__(self):
        return hash((self.p, self.m, self.primitive_poly))

    # -- element-wise operations ------------------------------------------

    def add(self, a, b):
        if self.add_table is not None:
            return _unbox(self.add_table[a, b])
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return _unbox(a ^ b)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for i in range(self.m):
            w = self.p ** i
            out += ((a // w % self.p + b // w % self.p) % self.p) * w
        return _unbox(out)

    def neg(self, a):
        return _unbox(self.neg_table[a])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.mul_table is not None:
            return _unbox(self.mul_table[a, b])
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return _unbox(np.where((a == 0) | (b == 0), 0, out))

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in a finite field")
        return _unbox(self.inv_table[a])

    def pow(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            return _unbox(np.ones_like(a))
        out = self.exp[(self.log[a] * k) % (self.q - 1)]
        return _unbox(np.where(a == 0, 0, out))

    # -- vectors and matrices ---------------------------------------------

    def vec_matmul(self, v, M):
        """Row vector(s) times matrix, v @ M over the field.

        ``v`` may carry leading batch dimensions.  Rows of M are grouped by the
        coefficient they are scaled with and summed in the base-p digit space
        with an integer matrix product.
        """
        v = np.asarray(v, dtype=np.int64)
        M = np.asarray(M, dtype=np.int64)
        if M.ndim != 2 or v.shape[-1] != M.shape[0]:
            raise ValueError(f"dimension mismatch: vector {v.shape} vs matrix {M.shape}")
        lead = v.shape[:-1]
        R, C = M.shape
        V = v.reshape(-1, R)
        if self.add_table is None:
            out = np.zeros((V.shape[0], C), dtype=np.int64)
            for i in range(R):
                out = self.add(out, self.mul(V[:, i:i + 1], M[i]))
            return out.reshape(lead + (C,))
        digits = self._digits[M].reshape(R, C * self.m).astype(np.float64)
        out = np.zeros((V.shape[0], C), dtype=np.int64)
        for a in np.unique(V):
            if a == 0:
                continue
            counts = (V == a).astype(np.float64) @ digits
            summed = ((counts.astype(np.int64) % self.p).reshape(-1, C, self.m) @ self._weights)
            out = self.add_table[out, self.mul_table[a, summed]]
        return out.reshape(lead + (C,))

    def matmul(self, A, B):
        return self.vec_matmul(A, B)

    def rank(self, M) -> int:
        """Rank by Gaussian elimination."""
        return self._eliminate(np.array(M, dtype=np.int64, copy=True))

    def inverse(self, M) -> np.ndarray:
        M = np.asarray(M, dtype=np.int64)
        ell = M.shape[0]
        if M.shape != (ell, ell):
            raise ValueError("only square matrices are invertible")
        A = np.concatenate([M, np.eye(ell, dtype=np.int64)], axis=1)
        if self._eliminate(A, ell) != ell:
            raise ValueError("matrix is singular")
        return A[:, ell:]

    def _eliminate(self, A, cols=None) -> int:
        """Reduced row echelon form in place over the first ``cols`` columns; returns the rank."""
        rows = A.shape[0]
        cols = A.shape[1] if cols is None else cols
        r = 0
        for c in range(cols):
            pivot = next((i for i in range(r, rows) if A[i, c] != 0), None)
            if pivot is None:
                continue
            A[[r, pivot]] = A[[pivot, r]]
            A[r] = self.mul(A[r], self.inv(int(A[r, c])))
            for i in range(rows):
                if i != r and A[i, c] != 0:
                    A[i] = self.sub(A[i], self.mul(A[r], int(A[i, c])))
            r += 1
            if r == rows:
                break
        return r


def _unbox(x):
    if isinstance(x, np.ndarray) and x.ndim == 0:
        return int(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


@lru_cache(maxsize=None)
def field_new(p: int, m: int = 1) -> FieldSpec:
    """Canonical GF(p^m); cached, so repeated calls return the same object."""
    return FieldSpec(p, m)


def field_of_size(q: int) -> FieldSpec:
    return field_new(*prime_power(q))
