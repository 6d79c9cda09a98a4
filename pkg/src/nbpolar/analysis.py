"""Code construction and performance analysis.

Exact erasure-channel reliabilities for MDS kernels, genie-aided Monte Carlo
estimates for everything else, frozen-set selection, union bounds, and the
Reed-Muller / hyperbolic row-selection rules for Kronecker powers of
G_RS(q, q).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .gf import FieldSpec
from .kernel import Kernel, KernelError, RS, MODIFIED_RS42, partial_distances
from .polar import (MAX_BLOCKLENGTH, CodeSpec, ChannelModel, SCDecoder, bit_reversal_perm, channel_transmit,
                    likelihoods, transform)

CHUNK = 1024
TIGHTNESS_NOTE = "union bound is tight only for rates not close to capacity"


class NotMDSError(KernelError):
    pass


@dataclass
class ReliabilityProfile:
    """Per-index error probabilities P^(i) of one code geometry."""

    q: int
    ell: int
    n: int
    values: np.ndarray
    provenance: str                  # "exact-erasure" or "monte-carlo"
    channel: str
    trials: int | None = None
    seed: int | None = None
    events: np.ndarray | None = dc_field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.ell ** self.n,):
            raise ValueError("profile length does not match ell^n")
        if np.any((self.values < 0) | (self.values > 1)):
            raise ValueError("probabilities must lie in [0, 1]")

    @property
    def N(self) -> int:
        return self.ell ** self.n

    def __eq__(self, other):
        if not isinstance(other, ReliabilityProfile):
            return NotImplemented
        return ((self.q, self.ell, self.n, self.provenance, self.channel, self.trials, self.seed)
                == (other.q, other.ell, other.n, other.provenance, other.channel, other.trials, other.seed)
                and np.array_equal(self.values, other.values))


# -- exact erasure recursion ------------------------------------------------------

def _require_mds(kernel) -> int:
    if isinstance(kernel, int):
        return kernel
    if kernel.label in (RS, MODIFIED_RS42):
        return kernel.ell
    try:
        dists = partial_distances(kernel)
    except KernelError:
        raise NotMDSError(f"cannot certify kernel {kernel.label!r} as MDS") from None
    if dists != tuple(range(1, kernel.ell + 1)):
        raise NotMDSError(
            f"kernel {kernel.label!r} has partial distances {dists}; the erasure recursion needs 1..l")
    return kernel.ell


def erasure_tails(p, ell: int) -> np.ndarray:
    """tails[..., b] = P(Bin(ell, p) >= b + 1) for b = 0..ell-1."""
    p = np.asarray(p, dtype=np.float64)[..., None]
    i = np.arange(ell + 1)
    comb = np.array([math.comb(ell, j) for j in i], dtype=np.float64)
    with np.errstate(under="ignore"):
        pmf = comb * p ** i * (1.0 - p) ** (ell - i)
    # sum_{i >= b+1} pmf_i; above 1/2 use the complement so values near 1 keep full precision
    upper = np.cumsum(pmf[..., ::-1], axis=-1)[..., ::-1][..., 1:]
    lower = np.cumsum(pmf, axis=-1)[..., :-1]
    return np.where(upper < 0.5, upper, 1.0 - lower)


def erasure_evolve_fractions(ell: int, epsilon, n: int) -> list[Fraction]:
    """The erasure recursion in exact rational arithmetic."""
    probs = [Fraction(epsilon)]
    for _ in range(n):
        probs = [sum(math.comb(ell, i) * p ** i * (1 - p) ** (ell - i) for i in range(b + 1, ell + 1))
                 for p in probs for b in range(ell)]
    return probs


def erasure_evolve(kernel, epsilon: float, n: int, exact: bool = False) -> ReliabilityProfile:
    """Erasure probabilities of all N = l^n synthetic channels.

    P^(a l + b) at level n is the probability that at least b + 1 of the l
    inputs to the final kernel stage are erased, each independently with
    probability P^(a) from level n - 1.  Valid only for kernels whose nested
    subcodes are all MDS.  ``exact`` runs the recursion in rationals and
    rounds once at the end.
    """
    ell = _require_mds(kernel)
    q = kernel if isinstance(kernel, int) else kernel.q
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    if ell ** n > MAX_BLOCKLENGTH:
        raise ValueError(f"l^n = {ell ** n} exceeds the supported blocklength {MAX_BLOCKLENGTH}")
    channel = f"erasure:{float(epsilon)!r}"
    if exact:
        values = np.array([float(x) for x in erasure_evolve_fractions(ell, epsilon, n)])
        return ReliabilityProfile(q, ell, n, values, "exact-erasure", channel)
    P = np.array([float(epsilon)])
    for _ in range(n):
        P = np.clip(erasure_tails(P, ell).reshape(-1), 0.0, 1.0)
    return ReliabilityProfile(q, ell, n, P, "exact-erasure", channel)


# -- Monte Carlo --------------------------------------------------------------------

def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Independent stream per (master seed, chunk index)."""
    return np.random.default_rng([int(seed), int(chunk)])


def _chunks(total: int, size: int = CHUNK):
    return [(c, min(size, total - c * size)) for c in range(-(-total // size))]


def _mc_chunk(args):
    kernel, n, channel, seed, chunk, count = args
    spec = CodeSpec(kernel, n)
    rng = chunk_rng(seed, chunk)
    u = rng.integers(0, kernel.q, size=(count, spec.N))
    y = channel_transmit(channel, transform(kernel, u), rng)
    res = SCDecoder(spec).decode(likelihoods(channel, y), genie=u)
    return (res.decisions != u) | res.ambiguous


def _run(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def estimate_reliabilities_mc(kernel: Kernel, n: int, channel: ChannelModel, trials: int, seed: int,
                              workers: int = 1, keep_events: bool = False) -> ReliabilityProfile:
    """Genie-aided SC error frequencies over ``trials`` uniform input vectors.

    An index counts as failed when the argmax misses the true symbol or is a
    tie: on erasure channels a tie is exactly the event that the symbol is
    not determined, which is what the exact recursion measures.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(kernel, n, channel, seed, c, cnt) for c, cnt in _chunks(trials)]
    events = np.concatenate(_run(_mc_chunk, jobs, workers))
    prof = ReliabilityProfile(kernel.q, kernel.ell, n, events.mean(axis=0), "monte-carlo",
                              channel.describe(), trials=trials, seed=seed)
    if keep_events:
        prof.events = events
    return prof


def _sim_chunk(args):
    spec, channel, seed, chunk, count = args
    rng = chunk_rng(seed, chunk)
    msg = rng.integers(0, spec.q, size=(count, spec.k))
    u = np.zeros((count, spec.N), dtype=np.int64)
    u[:, spec.info_set] = msg
    y = channel_transmit(channel, transform(spec.kernel, u), rng)
    res = SCDecoder(spec).decode(likelihoods(channel, y))
    info = spec.info_set
    wrong = res.u_hat[:, info] != msg
    tied = res.ambiguous[:, info]
    return np.stack([wrong.any(axis=1), (wrong | tied).any(axis=1)], axis=1), wrong.sum()


@dataclass(frozen=True)
class BlockStats:
    blocks: int
    block_errors: int      # decoded message differs from the sent one
    block_failures: int    # error, or some unfrozen decision was a tie
    symbol_errors: int

    @property
    def bler(self) -> float:
        return self.block_errors / self.blocks

    @property
    def failure_rate(self) -> float:
        return self.block_failures / self.blocks


def simulate_blocks(spec: CodeSpec, channel: ChannelModel, blocks: int, seed: int,
                    workers: int = 1) -> BlockStats:
    """Non-genie SC over ``blocks`` random messages."""
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    jobs = [(spec, channel, seed, c, cnt) for c, cnt in _chunks(blocks)]
    out = _run(_sim_chunk, jobs, workers)
    flags = np.concatenate([o[0] for o in out])
    return BlockStats(blocks, int(flags[:, 0].sum()), int(flags[:, 1].sum()),
                      int(sum(o[1] for o in out)))


# -- construction and bounds ---------------------------------------------------------

def reliability_order(profile: ReliabilityProfile) -> np.ndarray:
    """Indices by increasing P^(i), ties toward the smaller index."""
    return np.lexsort((np.arange(profile.N), profile.values))


def select_frozen(profile: ReliabilityProfile, k: int) -> tuple[int, ...]:
    if not 0 <= k <= profile.N:
        raise ValueError(f"k must lie in 0..{profile.N}")
    keep = set(reliability_order(profile)[:k].tolist())
    return tuple(i for i in range(profile.N) if i not in keep)


def union_bound(profile: ReliabilityProfile, selection: Iterable[int]) -> float:
    idx = np.fromiter(selection, dtype=np.int64)
    return math.fsum(profile.values[idx])


def union_bound_stderr(profile: ReliabilityProfile, selection: Iterable[int]) -> float:
    """Standard error of a Monte Carlo union bound.

    Uses the per-trial event matrix when kept (captures correlation between
    indices), otherwise assumes independent binomial estimates.
    """
    idx = np.fromiter(selection, dtype=np.int64)
    if profile.provenance != "monte-carlo":
        return 0.0
    if profile.events is not None:
        counts = profile.events[:, idx].sum(axis=1)
        return float(counts.std(ddof=1) / math.sqrt(len(counts))) if len(counts) > 1 else 0.0
    p = profile.values[idx]
    return math.sqrt(float((p * (1 - p)).sum()) / profile.trials)


def bound_curve(profile: ReliabilityProfile) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(k, rate, union bound) for k = 0..N using the k most reliable indices."""
    sorted_vals = profile.values[reliability_order(profile)]
    k = np.arange(profile.N + 1)
    bound = np.concatenate([[0.0], np.cumsum(sorted_vals)])
    return k, k / profile.N, bound


def bound_at_rate(profile: ReliabilityProfile, rate: float) -> float:
    k = int(round(rate * profile.N))
    return union_bound(profile, reliability_order(profile)[:k])


# -- row selections for Kronecker powers of G_RS(q, q) ------------------------------

@dataclass(frozen=True)
class RowSelection:
    rule: str
    selected: tuple[int, ...]
    weights: np.ndarray = dc_field(repr=False, compare=False)


def row_digits(q: int, n: int) -> np.ndarray:
    """digits[i, j] = j-th base-q digit of i, least significant first."""
    i = np.arange(q ** n)
    return (i[:, None] // q ** np.arange(n)[None, :]) % q


def monomial_degrees(q: int, n: int) -> np.ndarray:
    """Total degree of the monomial on row i: digit sum of q^n - 1 - i."""
    return row_digits(q, n)[::-1].sum(axis=1)


def hyperbolic_weights(q: int, n: int) -> np.ndarray:
    return (row_digits(q, n) + 1).prod(axis=1)


def rm_rows(q: int, n: int, r: int) -> RowSelection:
    if not 0 <= r <= (q - 1) * n:
        raise ValueError(f"order r must lie in 0..{(q - 1) * n}")
    deg = monomial_degrees(q, n)
    return RowSelection(f"reed-muller({r})", tuple(np.flatnonzero(deg <= r).tolist()), deg)


def hyperbolic_rows(q: int, n: int, d: int) -> RowSelection:
    if d < 1:
        raise ValueError("d must be >= 1")
    w = hyperbolic_weights(q, n)
    return RowSelection(f"hyperbolic({d})", tuple(np.flatnonzero(w >= d).tolist()), w)


def rm_rows_sized(q: int, n: int, size: int) -> RowSelection:
    """The ``size`` rows of lowest monomial degree, ties toward the higher row
    index.  Extends the order-r rule to cardinalities it cannot hit exactly."""
    deg = monomial_degrees(q, n)
    order = np.lexsort((-np.arange(q ** n), deg))
    return RowSelection(f"reed-muller[{size}]", tuple(sorted(order[:size].tolist())), deg)


def hyperbolic_rows_sized(q: int, n: int, size: int) -> RowSelection:
    w = hyperbolic_weights(q, n)
    order = np.lexsort((-np.arange(q ** n), -w))
    return RowSelection(f"hyperbolic[{size}]", tuple(sorted(order[:size].tolist())), w)


def polar_rows(profile: ReliabilityProfile, k: int) -> RowSelection:
    """Rows of G^{(x)n} spanning the polar code with the k most reliable inputs
    (input i maps to row r_i through the digit reversal)."""
    perm = bit_reversal_perm(profile.ell, profile.n)
    info = reliability_order(profile)[:k]
    w = hyperbolic_weights(profile.ell, profile.n)
    return RowSelection(f"polar[{k}]", tuple(sorted(perm[info].tolist())), w)


def min_distance_bruteforce(rows, field: FieldSpec, budget: int = 1 << 20) -> int:
    """Minimum Hamming weight over all nonzero codewords in the row span."""
    G = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    k, N = G.shape
    if field.q ** k > budget:
        raise ValueError(f"span has {field.q ** k} codewords, budget is {budget}")
    span = np.zeros((1, N), dtype=np.int64)
    coeffs = np.arange(field.q)
    for g in G:
        span = field.add(field.mul(coeffs[:, None, None], g[None, None, :]), span[None]).reshape(-1, N)
    w = (span != 0).sum(axis=1)
    w = w[w > 0]
    if not len(w):
        raise ValueError("rows span only the zero code")
    return int(w.min())


# -- files -------------------------------------------------------------------------

def format_profile(profile: ReliabilityProfile, header: Sequence[str] = ()) -> str:
    meta = (f"q={profile.q} ell={profile.ell} n={profile.n} provenance={profile.provenance} "
            f"channel={profile.channel} trials={profile.trials} seed={profile.seed}")
    lines = [f"# {h}" for h in header]
    lines.append(f"# profile {meta}")
    if profile.provenance == "monte-carlo":
        lines.append(f"# note {TIGHTNESS_NOTE}")
    lines.append("index,prob")
    lines += [f"{i},{v:.17g}" for i, v in enumerate(profile.values)]
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> ReliabilityProfile:
    meta = {}
    values = []
    seen_header = False
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("# profile "):
            meta = dict(item.split("=", 1) for item in ln[len("# profile "):].split())
        elif ln.startswith("#"):
            continue
        elif ln == "index,prob":
            seen_header = True
        else:
            i, v = ln.split(",")
            if int(i) != len(values):
                raise ValueError("profile rows out of order")
            values.append(float(v))
    if not seen_header or not meta:
        raise ValueError("not a profile CSV")

    def opt(key):
        return None if meta[key] == "None" else int(meta[key])

    return ReliabilityProfile(int(meta["q"]), int(meta["ell"]), int(meta["n"]), np.array(values),
                              meta["provenance"], meta["channel"], opt("trials"), opt("seed"))


def format_curve(profile: ReliabilityProfile, header: Sequence[str] = ()) -> str:
    k, rate, bound = bound_curve(profile)
    lines = [f"# {h}" for h in header]
    lines.append(f"# note {TIGHTNESS_NOTE}")
    lines.append("k,rate,union_bound")
    lines += [f"{a},{r:.17g},{b:.17g}" for a, r, b in zip(k, rate, bound)]
    return "\n".join(lines) + "\n"


def parse_curve(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows = [ln.split(",") for ln in text.splitlines()
            if ln.strip() and not ln.startswith("#") and ln.strip() != "k,rate,union_bound"]
    k = np.array([int(r[0]) for r in rows])
    return k, np.array([float(r[1]) for r in rows]), np.array([float(r[2]) for r in rows])
