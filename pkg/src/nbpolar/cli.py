"""Command line front end: ``nbpolar kernel|construct|simulate|curve``.

Every file written carries a ``#`` manifest header listing the subcommand,
all parameters, the seed and the library version, so identical invocations
produce identical bytes.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from . import __version__
from .analysis import (NotMDSError, erasure_evolve, estimate_reliabilities_mc, format_curve,
                       format_profile, parse_profile, select_frozen, simulate_blocks, union_bound)
from .gf import FieldSpec, field_new
from .kernel import (HERMITIAN, MODIFIED_RS42, RS, KernelError, build_kernel, exponent_from_distances,
                     format_kernel, gv_lower_bound, partial_distances)
from .polar import CodeSpec, format_frozen, load_code, parse_channel


class CLIError(Exception):
    pass


def parse_field(text: str) -> FieldSpec:
    try:
        p, m = (int(v) for v in text.split(","))
    except ValueError:
        raise CLIError(f"--field expects p,m (e.g. 2,2), got {text!r}") from None
    return field_new(p, m)


def manifest(args, outputs) -> list[str]:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command", "workers")}
    lines = [f"nbpolar {__version__} {args.command}"]
    lines += [f"{k}={v}" for k, v in params.items()]
    lines.append("outputs=" + ",".join(str(o) for o in outputs))
    return lines


def write_outputs(files: dict[str, str]) -> None:
    """Write all files or none: stage to temporaries, then rename."""
    staged = []
    try:
        for path, text in files.items():
            d = os.path.dirname(os.path.abspath(path))
            fd, tmp = tempfile.mkstemp(dir=d, prefix=".nbpolar-")
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except OSError:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def _kernel_from_args(args):
    field = parse_field(args.field)
    if args.kind == HERMITIAN:
        if args.r is None:
            raise CLIError("--kind hermitian needs --r")
        return build_kernel(field, HERMITIAN, args.r)
    if args.kind == RS and args.ell is None:
        raise CLIError("--kind rs needs --ell")
    return build_kernel(field, args.kind, args.ell or 2)


def _rate_to_k(args, N: int) -> int:
    if args.k is not None:
        k = args.k
    elif args.rate is not None:
        if not 0 <= args.rate <= 1:
            raise CLIError("--rate must lie in [0, 1]")
        k = round(args.rate * N)
    else:
        raise CLIError("give --rate or -k")
    if not 0 <= k <= N:
        raise CLIError(f"k must lie in 0..{N}")
    return k


def _profile(args, kernel, channel):
    use_mc = args.mc or channel.kind == "biawgn"
    if not use_mc:
        try:
            return erasure_evolve(kernel, channel.param, args.n)
        except NotMDSError as exc:
            raise CLIError(f"{exc}; rerun with --mc") from None
    if args.trials is None or args.seed is None:
        raise CLIError("Monte Carlo construction needs explicit --trials and --seed")
    return estimate_reliabilities_mc(kernel, args.n, channel, args.trials, args.seed, workers=args.workers)


# -- subcommands -------------------------------------------------------------

def cmd_kernel(args) -> str:
    k = _kernel_from_args(args)
    text = format_kernel(k)
    out = [text.rstrip("\n")]
    try:
        dists = partial_distances(k, args.budget)
    except KernelError as exc:
        out.append(f"partial_distances unavailable ({exc})")
    else:
        out.append("partial_distances " + " ".join(map(str, dists)))
        out.append(f"exponent {exponent_from_distances(dists):.6f}")
    out.append(f"gv_bound {gv_lower_bound(k.q, k.ell):.6f}")
    if args.out:
        write_outputs({args.out: text})
    return "\n".join(out) + "\n"


def cmd_construct(args) -> str:
    kernel = _kernel_from_args(args)
    channel = parse_channel(args.channel, kernel.field)
    profile = _profile(args, kernel, channel)
    k = _rate_to_k(args, profile.N)
    spec = CodeSpec(kernel, args.n, select_frozen(profile, k))
    profile_out = args.profile_out or args.out + ".profile.csv"
    head = manifest(args, [args.out, profile_out])
    write_outputs({args.out: format_frozen(spec, head), profile_out: format_profile(profile, head)})
    ub = union_bound(profile, spec.info_set)
    return f"N={spec.N} k={spec.k} rate={spec.rate:.6f} union_bound={ub:.6e}\n"


def cmd_simulate(args) -> str:
    try:
        with open(args.code) as fh:
            spec = load_code(fh.read())
    except OSError as exc:
        raise CLIError(f"cannot read {args.code}: {exc}") from None
    channel = parse_channel(args.channel, spec.field)
    ub = worst = ""
    if args.profile:
        with open(args.profile) as fh:
            prof = parse_profile(fh.read())
        if prof.N != spec.N:
            raise CLIError("profile length does not match the code")
        ub = f"{union_bound(prof, spec.info_set):.17g}"
        worst = f"{max(prof.values[spec.info_set], default=0.0):.17g}"
    stats = simulate_blocks(spec, channel, args.blocks, args.seed, workers=args.workers)
    lines = [f"# {h}" for h in manifest(args, [args.out])]
    lines.append("blocks,block_errors,block_failures,bler,failure_rate,symbol_errors,union_bound,max_unfrozen_prob")
    lines.append(f"{stats.blocks},{stats.block_errors},{stats.block_failures},{stats.bler:.17g},"
                 f"{stats.failure_rate:.17g},{stats.symbol_errors},{ub},{worst}")
    text = "\n".join(lines) + "\n"
    if args.out:
        write_outputs({args.out: text})
    return text


def cmd_curve(args) -> str:
    kernel = _kernel_from_args(args)
    channel = parse_channel(args.channel, kernel.field)
    profile = _profile(args, kernel, channel)
    text = format_curve(profile, manifest(args, [args.out] if args.out else []))
    if args.out:
        write_outputs({args.out: text})
        return f"wrote {profile.N + 1} curve points to {args.out}\n"
    return text


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbpolar", description="Non-binary polar codes with RS and Hermitian kernels")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def kernel_flags(p):
        p.add_argument("--field", required=True, help="field as p,m for GF(p^m)")
        p.add_argument("--kind", choices=[RS, HERMITIAN, MODIFIED_RS42], default=RS)
        p.add_argument("--ell", type=int, help="kernel size for rs")
        p.add_argument("--r", type=int, help="curve parameter for hermitian (field must be GF(r^2))")

    def code_flags(p):
        kernel_flags(p)
        p.add_argument("--n", type=int, required=True, help="number of polarization levels")
        p.add_argument("--channel", required=True, help="erasure:EPS or biawgn:SIGMA")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int, help="Monte Carlo trials")
        p.add_argument("--mc", action="store_true", help="force Monte Carlo on erasure channels")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("kernel", help="print a kernel, its partial distances and exponent")
    kernel_flags(p)
    p.add_argument("--budget", type=int, default=1 << 20, help="max codewords per partial distance")
    p.add_argument("--out", help="also write the kernel export file")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("construct", help="choose a frozen set and write it with the profile")
    code_flags(p)
    p.add_argument("--rate", type=float)
    p.add_argument("-k", type=int)
    p.add_argument("--out", required=True, help="frozen-set file")
    p.add_argument("--profile-out", help="profile CSV (default: OUT.profile.csv)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="non-genie SC block error simulation")
    p.add_argument("--code", required=True, help="frozen-set file from construct")
    p.add_argument("--channel", required=True)
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--profile", help="profile CSV for the union bound column")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("curve", help="rate vs union bound CSV")
    code_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sys.stdout.write(args.func(args))
    except (CLIError, ValueError, OSError) as exc:
        print(f"nbpolar {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
