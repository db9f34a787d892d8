"""Command-line interface.

Exit codes: 0 success, 1 validation or check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction
from pathlib import Path

from .codec import ShareImage, empirical_contrast, encode, stack
from .construct import (
    KINDS,
    VECTOR_DUP,
    StvssParams,
    build,
    format_stvss_pair,
    parse_stvss_pair,
    verify_stvss_security,
)
from .core import BUILTIN_NAMES, VSSError, builtin_pair, contrast_params, format_matrix, naor_shamir_2n, parse_basis_pair
from .pbm import header_comments, read_pbm, write_pbm
from .permutations import BudgetExceeded, PermutationMethod, iter_collection, permutation_count
from .shift import (
    Shift,
    ShiftAssignment,
    ShiftRangeError,
    analytic_contrast_stvss,
    monte_carlo_contrast,
    oracle_average_contrast,
)
from .tables import TABLES, format_rational, generate_table


class UsageError(Exception):
    pass


# -- argument helpers ----------------------------------------------------------


def _scheme_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scheme")
    g.add_argument("--scheme", default="ex1_2_3", help=f"builtin pair ({', '.join(BUILTIN_NAMES)}) or ns<N> for the (2,N) scheme")
    g.add_argument("--pair-file", type=Path, help="basis pair or STVSS pair in text format (overrides --scheme)")
    g.add_argument("--nx", type=int, default=1)
    g.add_argument("--ny", type=int, default=1)
    g.add_argument("--kind", choices=KINDS, default=VECTOR_DUP)


def _method_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", default="synchronized", help="full | per_block | synchronized (or 1/2/3)")


def _load_pair(args):
    try:
        if args.pair_file is not None:
            text = args.pair_file.read_text()
            first = text.strip().splitlines()[0].split() if text.strip() else []
            if len(first) == 3 and first[2] in KINDS:
                return parse_stvss_pair(text)
            base = parse_basis_pair(text)
        elif re.fullmatch(r"ns\d+", args.scheme):
            base = naor_shamir_2n(int(args.scheme[2:]))
        else:
            base = builtin_pair(args.scheme)
        return build(base, StvssParams(args.nx, args.ny), args.kind)
    except OSError as e:
        raise UsageError(str(e)) from None
    except VSSError as e:
        raise UsageError(str(e)) from None


def _method(args) -> PermutationMethod:
    try:
        return PermutationMethod.parse(args.method)
    except VSSError as e:
        raise UsageError(str(e)) from None


def _parse_shift(text: str) -> tuple[int, Shift]:
    m = re.fullmatch(r"\s*(\d+)\s*:\s*(-?\d+)\s*,\s*(-?\d+)\s*", text)
    if m is None:
        raise UsageError(f"bad --shift {text!r}; expected SHARE:X,Y")
    return int(m.group(1)), Shift(int(m.group(2)), int(m.group(3)))


def _assignment(reference: int, raw: list[str]) -> ShiftAssignment:
    try:
        return ShiftAssignment.of(reference, dict(_parse_shift(s) for s in raw))
    except VSSError as e:
        raise UsageError(str(e)) from None


def _mirror(shifts: ShiftAssignment) -> ShiftAssignment:
    """Map an all-non-positive assignment onto its point reflection.

    Turning every share by 180 degrees leaves the collections unchanged and
    negates all offsets, so ``(-x, -y)`` has the contrast of ``(x, y)``.
    """
    comps = [c for _, s in shifts.offsets for c in (s.x, s.y)]
    if all(c >= 0 for c in comps):
        return shifts
    if all(c <= 0 for c in comps):
        return ShiftAssignment(shifts.reference, tuple((i, Shift(-s.x, -s.y)) for i, s in shifts.offsets))
    raise UsageError("mixed-sign offsets are not supported by the contrast analysis")


def _shares(text: str | None, k: int) -> list[int]:
    if text is None:
        return list(range(1, k + 1))
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --shares {text!r}") from None


def _fmt(value: Fraction, decimals: int | None) -> str:
    return format_rational(value, decimals)


# -- commands --------------------------------------------------------------------


def cmd_construct(args) -> int:
    pair = _load_pair(args)
    sys.stdout.write(format_stvss_pair(pair))
    if args.expanded:
        print("# B0*")
        print(format_matrix(pair.b0_star))
        print("# B1*")
        print(format_matrix(pair.b1_star))
    return 0


def cmd_collection(args) -> int:
    pair = _load_pair(args)
    method = _method(args)
    if args.action == "count":
        print(permutation_count(pair, method))
        return 0
    for i, (word, mat) in enumerate(iter_collection(pair, args.color, method, args.budget)):
        if args.limit is not None and i >= args.limit:
            break
        print("word " + " ".join(map(str, word)))
        print(format_matrix(mat))
        print()
    return 0


def cmd_contrast(args) -> int:
    try:
        return _contrast(args)
    except (ShiftRangeError, BudgetExceeded):
        raise
    except VSSError as e:
        raise UsageError(str(e)) from None


def _contrast(args) -> int:
    pair = _load_pair(args)
    method = _method(args)
    shares = _shares(args.shares, pair.k)
    reference = args.reference if args.reference is not None else shares[0]
    shifts = _mirror(_assignment(reference, args.shift))
    if args.mode == "analytic":
        moved = [s for _, s in shifts.offsets]
        if pair.k != 2 or pair.kind != VECTOR_DUP or method is not PermutationMethod.SYNCHRONIZED or len(moved) > 1:
            raise UsageError("closed forms cover two shares of a vector-duplicated scheme with synchronized permutations")
        s = moved[0] if moved else Shift()
        if len(shares) != 2:
            raise UsageError("analytic mode needs exactly two shares")
        value = analytic_contrast_stvss(pair.params, pair.m, contrast_params(pair.base).a, s.x, s.y)
        print(_fmt(value, args.decimals))
    elif args.mode == "oracle":
        report = oracle_average_contrast(pair, method, shares, shifts, args.budget)
        print(_fmt(report.a_bar, args.decimals))
    else:
        report = monte_carlo_contrast(pair, method, shares, shifts, samples=args.samples, seed=args.seed)
        d = 6 if args.decimals is None else args.decimals
        print(f"{float(report.a_bar):.{d}f}\t{report.std_error:.{d}f}")
    return 0


def cmd_tables(args) -> int:
    names = TABLES if args.which == "all" else (args.which,)
    failed = []
    for name in names:
        table = generate_table(name)
        if len(names) > 1:
            print(f"# {name}: {table.title}")
        sys.stdout.write(table.to_tsv(args.decimals))
        failed += [(name, c) for c in table.mismatches()]
    if args.check:
        for name, c in failed:
            print(f"mismatch {name} {c.row} {c.column}: got {c.value}, printed {c.printed}", file=sys.stderr)
        return 1 if failed else 0
    return 0


def _fingerprint_note(share: ShareImage) -> str:
    return f"stvss share {share.index} fingerprint {share.fingerprint}"


def _read_share(path: Path, fallback_index: int) -> ShareImage:
    data = path.read_bytes()
    bitmap = read_pbm(data)
    for note in header_comments(data):
        m = re.fullmatch(r"stvss share (\d+) fingerprint (\w+)", note)
        if m:
            return ShareImage(int(m.group(1)), bitmap, m.group(2))
    return ShareImage(fallback_index, bitmap, "")


def cmd_encode(args) -> int:
    pair = _load_pair(args)
    secret = read_pbm(args.secret.read_bytes())
    args.outdir.mkdir(parents=True, exist_ok=True)
    for share in encode(secret, pair, _method(args), args.seed):
        path = args.outdir / f"share_{share.index}.pbm"
        path.write_bytes(write_pbm(share.bitmap, args.plain, (_fingerprint_note(share),)))
        print(path)
    return 0


def cmd_stack(args) -> int:
    shares = [_read_share(p, i) for i, p in enumerate(args.shares, 1)]
    reference = args.reference if args.reference is not None else shares[0].index
    out = stack(shares, _assignment(reference, args.shift))
    args.out.write_bytes(write_pbm(out, args.plain))
    print(args.out)
    return 0


def cmd_measure(args) -> int:
    pair = _load_pair(args)
    secret = read_pbm(args.secret.read_bytes())
    stacked = read_pbm(args.stacked.read_bytes())
    result = empirical_contrast(secret, stacked, pair, _assignment(args.reference, args.shift))
    print(f"{_fmt(result.value, args.decimals)}\t{result.std_error:.6f}")
    return 0


def cmd_security(args) -> int:
    pair = _load_pair(args)
    result = verify_stvss_security(pair, _method(args), args.budget)
    mode = "exhaustive" if result.exhaustive else "orbit"
    if result:
        print(f"PASS ({mode})")
        return 0
    print(f"FAIL shares {','.join(map(str, result.witness))} ({mode})")
    return 1


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stvss", description="Shift-tolerant visual secret sharing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="print an expanded scheme in text format")
    _scheme_args(p)
    p.add_argument("--expanded", action="store_true", help="also print B0* and B1*")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("collection", help="count or dump a color's collection")
    p.add_argument("action", choices=("dump", "count"))
    _scheme_args(p)
    _method_arg(p)
    p.add_argument("--color", choices=("white", "black"), default="white")
    p.add_argument("--limit", type=int)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_collection)

    p = sub.add_parser("contrast", help="average contrast under share shifts")
    _scheme_args(p)
    _method_arg(p)
    p.add_argument("--shares", help="comma-separated share indices (default 1..k)")
    p.add_argument("--reference", type=int, help="share that stays put (default: first of --shares)")
    p.add_argument("--shift", action="append", default=[], metavar="I:X,Y")
    p.add_argument("--mode", choices=("analytic", "oracle", "mc"), default="oracle")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--decimals", type=int)
    p.set_defaults(func=cmd_contrast)

    p = sub.add_parser("tables", help="regenerate published contrast tables as TSV")
    p.add_argument("--which", choices=(*TABLES, "all"), default="all")
    p.add_argument("--check", action="store_true", help="exit 1 if any cell differs from the printed value")
    p.add_argument("--decimals", type=int, default=4)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("encode", help="split a PBM secret into share_<i>.pbm files")
    _scheme_args(p)
    _method_arg(p)
    p.add_argument("secret", type=Path)
    p.add_argument("--outdir", type=Path, default=Path("."))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plain", action="store_true", help="write P1 instead of P4")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("stack", help="stack share files with optional offsets")
    p.add_argument("shares", type=Path, nargs="+")
    p.add_argument("--shift", action="append", default=[], metavar="I:X,Y")
    p.add_argument("--reference", type=int)
    p.add_argument("--out", type=Path, default=Path("stacked.pbm"))
    p.add_argument("--plain", action="store_true")
    p.set_defaults(func=cmd_stack)

    p = sub.add_parser("measure", help="empirical contrast of a stacked image")
    _scheme_args(p)
    p.add_argument("secret", type=Path)
    p.add_argument("stacked", type=Path)
    p.add_argument("--shift", action="append", default=[], metavar="I:X,Y")
    p.add_argument("--reference", type=int, default=1)
    p.add_argument("--decimals", type=int)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("security", help="check the security condition of a scheme")
    _scheme_args(p)
    _method_arg(p)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_security)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ShiftRangeError, BudgetExceeded) as e:
        parser.print_usage(sys.stderr)
        print(f"stvss {args.command}: error: {e}", file=sys.stderr)
        return 2
    except (VSSError, OSError) as e:
        print(f"stvss {args.command}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
