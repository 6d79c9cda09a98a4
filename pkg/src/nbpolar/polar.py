"""Polar codes over GF(q): encoder, channels and successive cancellation.

Conventions
-----------
The codeword is x = u R G^{(x)n}, u a row vector, R the l-ary digit reversal
permutation.  Equivalently x is built recursively: split u into l
contiguous blocks, encode each block with the length N/l code into s_b, and
set x[c*l + k] = sum_b s_b[c] G[b, k].  The SC decoder walks the same tree.

All arrays carry an optional leading batch axis so that many blocks are
encoded, transmitted and decoded at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .gf import FieldSpec
from .kernel import Kernel, KernelError, build_kernel, HERMITIAN
from .gf import field_of_size

ERASED = -1
MAX_BLOCKLENGTH = 1 << 22
MAX_EXPLICIT = 4096
# cap on temporaries in one kernel marginalization step (floats)
_STEP_ELEMENTS = 1 << 21


def bit_reversal_perm(ell: int, n: int) -> np.ndarray:
    """r_i has the n l-ary digits of i in reverse order."""
    if ell < 2 or n < 1:
        raise ValueError("need ell >= 2 and n >= 1")
    N = ell ** n
    if N > MAX_BLOCKLENGTH:
        raise ValueError(f"ell^n = {N} exceeds {MAX_BLOCKLENGTH}")
    # digits of i, most significant first, then read back reversed
    return np.arange(N).reshape((ell,) * n).transpose(tuple(range(n))[::-1]).reshape(N)


def kron_power(k: Kernel, n: int) -> np.ndarray:
    N = k.ell ** n
    if N > MAX_EXPLICIT:
        raise ValueError(f"refusing to materialize a {N} x {N} matrix")
    f = k.field
    out = k.matrix
    for _ in range(n - 1):
        out = f.mul(out[:, None, :, None], k.matrix[None, :, None, :]).reshape(
            out.shape[0] * k.ell, out.shape[1] * k.ell)
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True)
class CodeSpec:
    """A polar code: kernel, number of levels n and the frozen index set."""

    kernel: Kernel
    n: int
    frozen: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kernel.ell ** self.n > MAX_BLOCKLENGTH:
            raise ValueError("blocklength too large")
        fr = tuple(int(i) for i in self.frozen)
        if len(set(fr)) != len(fr):
            raise ValueError("duplicate frozen indices")
        if any(not 0 <= i < self.N for i in fr):
            raise ValueError("frozen index out of range")
        object.__setattr__(self, "frozen", tuple(sorted(fr)))

    @property
    def field(self) -> FieldSpec:
        return self.kernel.field

    @property
    def q(self) -> int:
        return self.kernel.q

    @property
    def ell(self) -> int:
        return self.kernel.ell

    @property
    def N(self) -> int:
        return self.kernel.ell ** self.n

    @property
    def info_set(self) -> np.ndarray:
        mask = np.ones(self.N, dtype=bool)
        mask[list(self.frozen)] = False
        return np.flatnonzero(mask)

    @property
    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=bool)
        mask[list(self.frozen)] = True
        return mask

    @property
    def k(self) -> int:
        return self.N - len(self.frozen)

    @property
    def rate(self) -> float:
        return self.k / self.N

    @property
    def binary_length(self) -> float:
        return self.N * math.log2(self.q)


# -- encoding -----------------------------------------------------------------

def transform(kernel: Kernel, u) -> np.ndarray:
    """u R G^{(x)n} for u of length l^n (batched over leading axes)."""
    f, G, ell = kernel.field, kernel.matrix, kernel.ell
    u = np.asarray(u, dtype=np.int64)
    lead, N = u.shape[:-1], u.shape[-1]
    n = round(math.log(N, ell))
    if ell ** n != N:
        raise ValueError(f"length {N} is not a power of {ell}")
    x = u.reshape(-1, N)
    B = x.shape[0]
    width = 1
    for _ in range(n):
        # (blocks, b, c) -> (blocks, c, k)
        blk = x.reshape(B, N // (width * ell), ell, width)
        acc = np.zeros((B, N // (width * ell), width, ell), dtype=np.int64)
        for b in range(ell):
            acc = f.add(acc, f.mul(blk[:, :, b, :, None], G[b][None, None, None, :]))
        x = acc.reshape(B, N)
        width *= ell
    return x.reshape(lead + (N,))


def encode(spec: CodeSpec, message) -> np.ndarray:
    """Scatter the message into the unfrozen positions and transform."""
    message = np.asarray(message, dtype=np.int64)
    if message.shape[-1] != spec.k:
        raise ValueError(f"message length {message.shape[-1]} != {spec.k}")
    if message.size and (message.min() < 0 or message.max() >= spec.q):
        raise ValueError("message symbols out of range")
    u = np.zeros(message.shape[:-1] + (spec.N,), dtype=np.int64)
    u[..., spec.info_set] = message
    return transform(spec.kernel, u)


def encode_explicit(spec: CodeSpec, message) -> np.ndarray:
    """Reference encoder through the materialized matrix R G^{(x)n}."""
    u = np.zeros(np.shape(message)[:-1] + (spec.N,), dtype=np.int64)
    u[..., spec.info_set] = message
    perm = bit_reversal_perm(spec.ell, spec.n)
    return spec.field.vec_matmul(u[..., perm], kron_power(spec.kernel, spec.n))


# -- channels -----------------------------------------------------------------

@dataclass(frozen=True)
class ChannelModel:
    """q-ary erasure channel (``kind='erasure'``, param = epsilon) or
    binary-input AWGN (``kind='biawgn'``, param = sigma).

    On the AWGN channel each symbol is sent as the log2(q) bits of its
    integer encoding, most significant first, with 0 -> +1 and 1 -> -1.
    """

    kind: str
    param: float
    field: FieldSpec = dc_field(compare=False)

    def __post_init__(self):
        if self.kind == "erasure":
            if not 0.0 <= self.param <= 1.0:
                raise ValueError("erasure probability must lie in [0, 1]")
        elif self.kind == "biawgn":
            if self.param <= 0:
                raise ValueError("noise standard deviation must be positive")
            if self.field.p != 2:
                raise ValueError("binary-input AWGN needs a field of characteristic 2")
        else:
            raise ValueError(f"unknown channel kind {self.kind!r}")

    @property
    def bits_per_symbol(self) -> int:
        return self.field.m if self.field.p == 2 else 0

    def symbol_bits(self) -> np.ndarray:
        m = self.field.m
        s = np.arange(self.field.q)
        return (s[:, None] >> np.arange(m - 1, -1, -1)[None, :]) & 1

    def describe(self) -> str:
        return f"{self.kind}:{self.param!r}"


def erasure_channel(field: FieldSpec, epsilon: float) -> ChannelModel:
    return ChannelModel("erasure", float(epsilon), field)


def biawgn_channel(field: FieldSpec, sigma: float) -> ChannelModel:
    return ChannelModel("biawgn", float(sigma), field)


def parse_channel(text: str, field: FieldSpec) -> ChannelModel:
    kind, _, value = text.partition(":")
    if not value:
        raise ValueError(f"channel must look like erasure:EPS or biawgn:SIGMA, got {text!r}")
    return ChannelModel(kind, float(value), field)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def channel_transmit(ch: ChannelModel, codeword, rng_seed=None) -> np.ndarray:
    """Erasure: symbols with ERASED (-1) marks.  AWGN: received reals of shape (..., N, m)."""
    rng = _rng(rng_seed)
    x = np.asarray(codeword, dtype=np.int64)
    if ch.kind == "erasure":
        erased = rng.random(x.shape) < ch.param
        return np.where(erased, ERASED, x)
    tx = 1.0 - 2.0 * ch.symbol_bits()[x]
    return tx + ch.param * rng.standard_normal(tx.shape)


def likelihoods(ch: ChannelModel, observation) -> np.ndarray:
    """Per-symbol likelihood vectors W(y|s) up to scale, shape (..., N, q)."""
    q = ch.field.q
    if ch.kind == "erasure":
        y = np.asarray(observation)
        out = (y[..., None] == np.arange(q)).astype(np.float64)
        out[y == ERASED] = 1.0
        return out
    y = np.asarray(observation, dtype=np.float64)
    tx = 1.0 - 2.0 * ch.symbol_bits()                      # (q, m)
    ll = -((y[..., None, :] - tx) ** 2).sum(axis=-1) / (2.0 * ch.param ** 2)
    ll -= ll.max(axis=-1, keepdims=True)
    return np.exp(ll)


def biawgn_capacity(sigma: float, points: int = 200) -> float:
    """Capacity in bits per use of the binary-input AWGN channel."""
    z, w = np.polynomial.hermite_e.hermegauss(points)
    y = 1.0 + sigma * z
    # I = 1 - E[log2(1 + exp(-2y/sigma^2))] given x = +1
    integrand = np.logaddexp(0.0, -2.0 * y / sigma ** 2) / math.log(2)
    return 1.0 - float(w @ integrand / math.sqrt(2 * math.pi))


def format_observations(ch: ChannelModel, observation) -> str:
    obs = np.asarray(observation)
    if ch.kind == "erasure":
        return "".join(("*" if v == ERASED else str(int(v))) + "\n" for v in obs)
    return "".join(" ".join(f"{v:.17g}" for v in row) + "\n" for row in obs)


# -- successive cancellation ----------------------------------------------------

@dataclass
class DecodeResult:
    u_hat: np.ndarray          # symbols fed forward (true u in genie mode)
    decisions: np.ndarray      # argmax decisions at every index
    ambiguous: np.ndarray      # decision was a tie between several symbols
    posteriors: np.ndarray | None = None


class SCDecoder:
    """Exact successive cancellation decoder for any kernel.

    For input b > 0 of an l-block the undecided inputs b+1..l-1 are
    marginalized by enumerating all q^(l-b) completions; input 0 is a linear
    form of the block outputs and reduces to l - 1 convolutions over the
    additive group.  Ties in the argmax go to the smallest symbol.
    """

    def __init__(self, spec: CodeSpec):
        if spec.field.add_table is None:
            raise ValueError("SC decoding needs a tabulated field (q <= 256)")
        self.spec = spec
        f, G, ell, q = spec.field, spec.kernel.matrix, spec.ell, spec.q
        self._tables = []
        span = np.zeros((1, ell), dtype=np.int64)
        spans = [None] * ell
        for b in range(ell - 1, 0, -1):
            spans[b] = span
            span = f.add(f.mul(np.arange(q)[:, None, None], G[b][None, None, :]), span[None]).reshape(-1, ell)
        self._tables.append(None)  # input 0 goes through _first_step
        for b in range(1, ell):
            cw = f.add(f.mul(np.arange(q)[:, None, None], G[b][None, None, :]), spans[b][None])  # (q, Q, ell)
            flat = np.arange(ell) * q + cw  # flat index into (ell, q)
            self._tables.append([np.ascontiguousarray(flat[..., k]).ravel() for k in range(ell)])
        self._shift = f.add_table  # shift[x, p] = x + p
        # input 0 of a block is the linear form x . h of the block outputs,
        # h = column 0 of G^-1, so its marginal is a chain of convolutions
        h = f.inverse(G)[:, 0]
        self._scale = [None if hk == 0 else f.mul_table[f.inv(int(hk)), np.arange(q)] for hk in h]
        self._sub = f.add_table[np.arange(q)[:, None], f.neg_table[np.arange(q)][None, :]]  # z - x

    def _scaled(self, lam_k: np.ndarray, k: int) -> np.ndarray:
        idx = self._scale[k]
        if idx is not None:
            return lam_k[:, idx]
        out = np.zeros_like(lam_k)
        out[:, 0] = lam_k.sum(axis=1)
        return out

    def _first_step(self, lam: np.ndarray) -> np.ndarray:
        mu = self._scaled(lam[:, 0, :], 0)
        for k in range(1, self.spec.ell):
            nu = self._scaled(lam[:, k, :], k)
            mu = np.einsum("rx,rzx->rz", mu, nu[:, self._sub])
        peak = mu.max(axis=1, keepdims=True)
        peak[peak == 0] = 1.0
        return mu / peak

    def _step(self, lam: np.ndarray, prefix: np.ndarray | None, b: int) -> np.ndarray:
        """Likelihood of input b for each row of lam (R, l, q), given the
        contribution ``prefix`` (R, l) of the already decided inputs."""
        q, ell = self.spec.q, self.spec.ell
        R = lam.shape[0]
        if b == 0:
            return self._first_step(lam)
        if prefix is not None:
            idx = self._shift[np.arange(q)[None, None, :], prefix[:, :, None]]
            lam = np.take_along_axis(lam, idx, axis=2)
        flat = lam.reshape(R, ell * q)
        table = self._tables[b]
        per_row = len(table[0])
        out = np.empty((R, q))
        chunk = max(1, _STEP_ELEMENTS // per_row)
        for lo in range(0, R, chunk):
            rows = flat[lo:lo + chunk]
            acc = np.take(rows, table[0], axis=1)
            for k in range(1, ell):
                acc *= np.take(rows, table[k], axis=1)
            out[lo:lo + chunk] = acc.reshape(len(rows), q, -1).sum(axis=-1)
        peak = out.max(axis=1, keepdims=True)
        peak[peak == 0] = 1.0
        return out / peak

    def decode(self, llh, genie=None, keep_posteriors: bool = False) -> DecodeResult:
        """Decode likelihood vectors of shape (N, q) or (B, N, q).

        With ``genie`` (the true u vectors) decisions are recorded but the
        true symbols are fed forward, which isolates each index's error event.
        """
        spec = self.spec
        llh = np.asarray(llh, dtype=np.float64)
        single = llh.ndim == 2
        if single:
            llh = llh[None]
        B, N, q = llh.shape
        if N != spec.N or q != spec.q:
            raise ValueError(f"expected likelihoods of shape (*, {spec.N}, {spec.q}), got {llh.shape}")
        peak = llh.max(axis=-1, keepdims=True)
        peak[peak == 0] = 1.0
        llh = llh / peak
        if genie is not None:
            genie = np.asarray(genie, dtype=np.int64).reshape(B, N)
        self._frozen = spec.frozen_mask
        self._genie = genie
        self._u = np.zeros((B, N), dtype=np.int64)
        self._dec = np.zeros((B, N), dtype=np.int64)
        self._amb = np.zeros((B, N), dtype=bool)
        self._post = np.zeros((B, N, q)) if keep_posteriors else None
        self._node(llh, 0, spec.n)
        res = DecodeResult(self._u, self._dec, self._amb, self._post)
        if single:
            res = DecodeResult(res.u_hat[0], res.decisions[0], res.ambiguous[0],
                               None if res.posteriors is None else res.posteriors[0])
        self._genie = self._u = self._dec = self._amb = self._post = None
        return res

    def _leaf(self, p: np.ndarray, i: int) -> np.ndarray:
        dec = p.argmax(axis=1)
        self._dec[:, i] = dec
        self._amb[:, i] = (p == p.max(axis=1, keepdims=True)).sum(axis=1) > 1
        if self._post is not None:
            s = p.sum(axis=1, keepdims=True)
            s[s == 0] = 1.0
            self._post[:, i] = p / s
        if self._genie is not None:
            chosen = self._genie[:, i]
        elif self._frozen[i]:
            chosen = np.zeros_like(dec)
        else:
            chosen = dec
        self._u[:, i] = chosen
        return chosen

    def _node(self, lam: np.ndarray, start: int, m: int) -> np.ndarray:
        """Decode the subtree of size l^m whose input likelihoods are lam (B, l^m, q);
        returns its re-encoded output (B, l^m)."""
        if m == 0:
            return self._leaf(lam[:, 0, :], start)[:, None]
        f, G = self.spec.field, self.spec.kernel.matrix
        ell, q = self.spec.ell, self.spec.q
        B, M, _ = lam.shape
        C = M // ell
        rows = lam.reshape(B * C, ell, q)
        prefix = None
        for b in range(ell):
            sub = self._step(rows, prefix, b).reshape(B, C, q)
            s = self._node(sub, start + b * C, m - 1)
            contrib = f.mul_table[s[:, :, None], G[b][None, None, :]].reshape(B * C, ell)
            prefix = contrib if prefix is None else f.add_table[prefix, contrib]
        return prefix.reshape(B, M)


def sc_decode(spec: CodeSpec, obs_likelihoods, genie=None, keep_posteriors: bool = False) -> DecodeResult:
    return SCDecoder(spec).decode(obs_likelihoods, genie=genie, keep_posteriors=keep_posteriors)


# -- frozen-set files -----------------------------------------------------------

def kernel_size_parameter(kernel: Kernel) -> int:
    """The size argument :func:`build_kernel` needs to rebuild ``kernel``."""
    if kernel.label == HERMITIAN:
        return round(kernel.ell ** (1 / 3))
    return kernel.ell


def format_frozen(spec: CodeSpec, header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines.append(f"{spec.q} {spec.ell} {spec.n}")
    lines.append(spec.kernel.label)
    lines.append(" ".join(str(i) for i in spec.frozen))
    return "\n".join(lines) + "\n"


def parse_frozen(text: str) -> tuple[int, int, int, str, tuple[int, ...]]:
    """Returns (q, ell, n, label, frozen)."""
    lines = [ln.strip() for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    while lines and not lines[-1]:
        lines.pop()
    try:
        q, ell, n = (int(v) for v in lines[0].split())
        label = lines[1]
        frozen = tuple(int(v) for v in lines[2].split()) if len(lines) > 2 else ()
    except (ValueError, IndexError) as exc:
        raise ValueError(f"malformed frozen-set file: {exc}") from None
    if list(frozen) != sorted(set(frozen)):
        raise ValueError("frozen indices must be sorted and distinct")
    return q, ell, n, label, frozen


def load_code(text: str) -> CodeSpec:
    q, ell, n, label, frozen = parse_frozen(text)
    field = field_of_size(q)
    size = round(ell ** (1 / 3)) if label == HERMITIAN else ell
    try:
        kernel = build_kernel(field, label, size)
    except KernelError as exc:
        raise ValueError(f"cannot rebuild kernel {label!r}: {exc}") from None
    if kernel.ell != ell:
        raise ValueError(f"kernel {label!r} has size {kernel.ell}, file says {ell}")
    return CodeSpec(kernel, n, frozen)
