"""Polarization kernels and their exponents.

A kernel is an invertible l x l matrix over a finite field.  Its speed of
polarization is measured by the exponent, the mean of log_l D_i over the
partial distances D_i, i.e. the distance from row i to the span of the rows
below it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf import FieldSpec, field_of_size, prime_power

RS = "rs"
HERMITIAN = "hermitian"
MODIFIED_RS42 = "modified-rs42"
CUSTOM = "custom"

DEFAULT_BUDGET = 1 << 20


class KernelError(ValueError):
    pass


class Kernel:
    """An l x l invertible matrix over ``field``.

    ``label`` records how the matrix was built (``rs``, ``hermitian``,
    ``modified-rs42`` or ``custom``).  Partial distances may be supplied when
    they are known analytically; otherwise :func:`partial_distances` computes
    and caches them.
    """

    def __init__(self, field: FieldSpec, matrix, label: str = CUSTOM,
                 partial_distances: Sequence[int] | None = None):
        G = np.array(matrix, dtype=np.int64)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 2:
            raise KernelError(f"kernel must be a square matrix of size >= 2, got shape {G.shape}")
        if G.min() < 0 or G.max() >= field.q:
            raise KernelError("kernel entries are not valid field elements")
        if field.rank(G) != G.shape[0]:
            raise KernelError("kernel matrix is singular")
        G.setflags(write=False)
        self.field = field
        self.matrix = G
        self.ell = G.shape[0]
        self.label = label
        self._distances = tuple(partial_distances) if partial_distances is not None else None

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def cached_distances(self):
        return self._distances

    def __repr__(self):
        return f"Kernel(q={self.q}, ell={self.ell}, label={self.label!r})"

    def __eq__(self, other):
        return (isinstance(other, Kernel) and self.field == other.field
                and self.label == other.label and np.array_equal(self.matrix, other.matrix))


# -- constructions ----------------------------------------------------------

def rs_kernel(field: FieldSpec, ell: int) -> Kernel:
    """Reed-Solomon kernel G_RS(q, ell).

    Row j evaluates X^(ell-1-j) at the points q-1, q-2, ..., q-ell (integer
    encoding), so rows i..ell-1 generate an [ell, ell-i, i+1] RS code.
    """
    q = field.q
    if not 2 <= ell <= q:
        raise KernelError(f"RS kernel needs 2 <= ell <= q, got ell={ell}, q={q}")
    points = np.arange(q - 1, q - 1 - ell, -1)
    G = np.array([field.pow(points, ell - 1 - j) for j in range(ell)], dtype=np.int64)
    return Kernel(field, G, RS, partial_distances=range(1, ell + 1))


def rs_kernel_modified_4_2(field: FieldSpec) -> Kernel:
    """The 4-ary kernel [[1, 0], [1, alpha]].

    Over GF(4) the plain [[1, 0], [1, 1]] polarizes each bit of the binary
    image separately; scaling by alpha mixes them.
    """
    if (field.p, field.m) != (2, 2):
        raise KernelError("the modified 2x2 kernel is defined over GF(4) only")
    return Kernel(field, [[1, 0], [1, field.alpha]], MODIFIED_RS42, partial_distances=(1, 2))


@dataclass(frozen=True)
class HermitianBasis:
    """Points of the Hermitian curve x1^(r+1) = x2^r + x2 over GF(r^2) and
    the monomial basis X1^a X2^b (a < r^2, b < r) ordered by pole order."""

    r: int
    field: FieldSpec
    points: tuple[tuple[int, int], ...]     # (x1, x2)
    monomials: tuple[tuple[int, int], ...]  # (a, b)
    rho: tuple[int, ...]


def hermitian_basis(r: int) -> HermitianBasis:
    try:
        p, _ = prime_power(r)
    except ValueError:
        raise KernelError(f"r={r} is not a prime power") from None
    if r * r > 256:
        raise KernelError(f"GF(r^2) with r={r} exceeds the tabulated field size")
    field = field_of_size(r * r)
    xs = np.arange(field.q)
    lhs = field.pow(xs, r + 1)
    rhs = field.add(field.pow(xs, r), xs)
    points = [(int(x1), int(x2)) for x1 in xs for x2 in xs if lhs[x1] == rhs[x2]]
    points.sort(key=lambda pt: (-pt[0], -pt[1]))
    if len(points) != r ** 3:
        raise KernelError(f"expected {r ** 3} curve points, found {len(points)}")
    monomials = [(a, b) for a in range(r * r) for b in range(r)]
    monomials.sort(key=lambda ab: -(ab[0] * r + ab[1] * (r + 1)))
    rho = tuple(a * r + b * (r + 1) for a, b in monomials)
    return HermitianBasis(r, field, tuple(points), tuple(monomials), rho)


def hermitian_kernel(r: int) -> Kernel:
    """The r^2-ary Hermitian kernel G_H(r^3): entry (j, k) is monomial j at point k."""
    basis = hermitian_basis(r)
    if r ** 3 > 512:
        raise KernelError(f"G_H({r ** 3}) is too large to materialize")
    f = basis.field
    x1 = np.array([pt[0] for pt in basis.points])
    x2 = np.array([pt[1] for pt in basis.points])
    G = np.array([f.mul(f.pow(x1, a), f.pow(x2, b)) for a, b in basis.monomials], dtype=np.int64)
    return Kernel(f, G, HERMITIAN)


# -- partial distances and exponents ----------------------------------------

def partial_distances(k: Kernel, budget: int = DEFAULT_BUDGET, analytic: bool = True) -> tuple[int, ...]:
    """Partial distances (D_0, ..., D_{l-1}).

    D_i is the minimum weight of c * g_i + w over nonzero scalars c and all
    w in the span of rows i+1..l-1.  Computed by growing the span from the
    bottom row up, so the whole pass costs about q^l weight evaluations.
    With ``analytic`` set, known values (RS kernels: D_i = i + 1) are
    returned without enumeration.
    """
    if analytic and k.cached_distances is not None:
        return k.cached_distances
    if k.q ** (k.ell - 1) > budget:
        raise KernelError(
            f"brute-force partial distances need q^(l-1) = {k.q ** (k.ell - 1)} codewords, budget is {budget}")
    f, G, ell = k.field, k.matrix, k.ell
    span = np.zeros((1, ell), dtype=np.int64)
    nz = np.arange(1, f.q)
    dists = [0] * ell
    for i in range(ell - 1, -1, -1):
        # cosets c*g_i + span for each c != 0
        cosets = []
        best = ell
        for c in nz:
            coset = f.add(f.mul(int(c), G[i])[None, :], span)
            best = min(best, int((coset != 0).sum(axis=1).min()))
            if i:
                cosets.append(coset)
        dists[i] = best
        if i:
            span = np.concatenate([span] + cosets)
    result = tuple(dists)
    if k.cached_distances is None:
        k._distances = result
    return result


def exponent_from_distances(distances: Sequence[int]) -> float:
    ell = len(distances)
    return math.fsum(math.log(d) for d in distances) / (ell * math.log(ell))


def exponent(k: Kernel, budget: int = DEFAULT_BUDGET) -> float:
    return exponent_from_distances(partial_distances(k, budget))


def rs_exponent_formula(ell: int) -> float:
    """log(ell!) / (ell log ell), via lgamma."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    return math.lgamma(ell + 1) / (ell * math.log(ell))


def gv_partial_distance(q: int, ell: int, i: int) -> int:
    """Largest D with sum_{j<D} C(ell, j) (q-1)^j < q^(i+1); exact integers."""
    if not 0 <= i < ell:
        raise ValueError(f"index {i} outside 0..{ell - 1}")
    bound = q ** (i + 1)
    total = 0
    D = 0
    while D <= ell:
        total += math.comb(ell, D) * (q - 1) ** D
        if total >= bound:
            break
        D += 1
    return D


def gv_distances(q: int, ell: int) -> tuple[int, ...]:
    return tuple(gv_partial_distance(q, ell, i) for i in range(ell))


def gv_lower_bound(q: int, ell: int) -> float:
    return exponent_from_distances(gv_distances(q, ell))


# -- text export --------------------------------------------------------------

def format_kernel(k: Kernel) -> str:
    lines = [f"{k.q} {k.ell} {k.label}"]
    lines += [" ".join(str(int(x)) for x in row) for row in k.matrix]
    return "\n".join(lines) + "\n"


def parse_kernel(text: str) -> Kernel:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise KernelError("empty kernel file")
    try:
        q_s, ell_s, label = lines[0].split()
        q, ell = int(q_s), int(ell_s)
        rows = [[int(x) for x in ln.split()] for ln in lines[1:1 + ell]]
    except ValueError as exc:
        raise KernelError(f"malformed kernel file: {exc}") from None
    if len(rows) != ell or any(len(r) != ell for r in rows):
        raise KernelError("kernel file rows do not match the declared size")
    field = field_of_size(q)
    distances = range(1, ell + 1) if label in (RS, MODIFIED_RS42) else None
    return Kernel(field, rows, label, partial_distances=distances)


def build_kernel(field: FieldSpec, kind: str, size: int) -> Kernel:
    """Construct a kernel by name; ``size`` is ell for RS and r for Hermitian."""
    if kind == RS:
        return rs_kernel(field, size)
    if kind == MODIFIED_RS42:
        return rs_kernel_modified_4_2(field)
    if kind == HERMITIAN:
        if field.q != size * size:
            raise KernelError(f"Hermitian kernel with r={size} lives in GF({size * size}), not GF({field.q})")
        return hermitian_kernel(size)
    raise KernelError(f"unknown kernel kind {kind!r}")
