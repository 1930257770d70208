"""Command-line entry point ``rectbar``.

Exit codes, shared by every subcommand::

    0  success
    1  invariant violation (bad complex, stability bound broken)
    2  unreadable or malformed input
    3  a barcode failed verification

``RECTBAR_OUT_DIR`` sets the directory for relative ``--out`` paths and
for plots written without ``--out``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional

from .barcode import (
    RectangleBarcode,
    VerificationError,
    bars_to_doc,
    derive_rectangles,
    fmt_num,
    rectangle_barcode,
    sublevel_barcode,
    verify_decomposition,
)
from .complex import (
    FilteredComplex,
    InvariantViolation,
    ParseError,
    SemanticError,
    StructuralError,
    parse,
    validate,
)
from .distance import bottleneck_by_degree, stability_experiment
from .interlevel import exactness_sweep
from .invariants import invariant_report
from .plot import render_ascii, render_svg

__version__ = "0.1.0"

EXIT_OK, EXIT_INVARIANT, EXIT_PARSE, EXIT_VERIFY = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, msg: str):
        self.code = code
        super().__init__(msg)


def _read(path: str, check: bool = True) -> FilteredComplex:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise _Fail(EXIT_PARSE, f"{path}: cannot read: {e.strerror}")
    try:
        return parse(data, validate_result=check)
    except ParseError as e:
        raise _Fail(EXIT_PARSE, f"{path}: parse error at {e}")
    except (SemanticError, StructuralError) as e:
        raise _Fail(EXIT_PARSE, f"{path}: {e}")
    except InvariantViolation as e:
        raise _Fail(EXIT_INVARIANT, f"{path}: invalid complex: {e}")


def _out_path(name: str) -> Path:
    p = Path(name)
    base = os.environ.get("RECTBAR_OUT_DIR")
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        p = _out_path(out)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _barcode(c: FilteredComplex) -> RectangleBarcode:
    try:
        return rectangle_barcode(c)
    except VerificationError as e:
        raise _Fail(EXIT_VERIFY, str(e))


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    c = _read(args.path, check=False)
    rep = validate(c)
    if rep.ok:
        print(f"ok: {c.size()} generators in degrees {list(c.degrees)}")
        return EXIT_OK
    for v in rep.violations:
        print(f"violation [{v.kind}] degree {v.degree}: {v.message} (witness {', '.join(v.witness)})")
    return EXIT_INVARIANT


def cmd_barcode(args) -> int:
    rb = _barcode(_read(args.path))
    if args.format == "doc":
        if args.degree is not None:
            rb = RectangleBarcode(rb.in_degree(args.degree))
        _emit(_dump(rb.to_doc()), args.out)
    else:
        _emit(rb.to_text(args.degree), args.out)
    return EXIT_OK


def cmd_sublevel(args) -> int:
    bars = sublevel_barcode(_read(args.path))
    if args.degree is not None:
        bars = [b for b in bars if b.degree == args.degree]
    if args.format == "doc":
        _emit(_dump(bars_to_doc(bars)), args.out)
    else:
        lines = []
        for b in bars:
            tail = f" {b.birth_generator}" + (f" -> {b.death_generator}" if b.death_generator else "")
            lines.append(f"deg {b.degree}: [{fmt_num(b.birth)}, {fmt_num(b.death)}){tail}")
        _emit("".join(s + "\n" for s in lines), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    c = _read(args.path)
    if args.barcode:
        try:
            rb = RectangleBarcode.from_doc(json.loads(Path(args.barcode).read_text("utf-8")))
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise _Fail(EXIT_PARSE, f"{args.barcode}: cannot read barcode: {e}")
        source = args.barcode
    else:
        rb = derive_rectangles(c)
        source = "derived"
    rep = verify_decomposition(c, rb)
    print(f"barcode ({source}): {rep.dims_checked} dimension checks, "
          f"{rep.ranks_checked} map-rank checks, {len(rep.failures)} mismatches")
    for f in rep.failures[: args.show]:
        print("  " + f.describe())
    sweep_fail = 0
    weak = middle = 0
    if not args.no_exactness:
        for k in c.degrees:
            s = exactness_sweep(c, k)
            weak += s.weak_checked
            middle += s.middle_checked
            sweep_fail += len(s.failures)
            for kind, quad, res in s.failures[: args.show]:
                print(f"  degree {k}: {kind} exactness fails at {tuple(fmt_num(x) for x in quad)}: {res.detail}")
        print(f"exactness: {weak} weak and {middle} middle checks, {sweep_fail} failures")
    return EXIT_OK if rep.ok and not sweep_fail else EXIT_VERIFY


def cmd_invariants(args) -> int:
    rep = invariant_report(_barcode(_read(args.path)))
    _emit(_dump(rep.to_doc()) if args.format == "doc" else rep.to_text(), args.out)
    return EXIT_OK


def cmd_distance(args) -> int:
    ra = _barcode(_read(args.a))
    rb = _barcode(_read(args.b))
    per = bottleneck_by_degree(ra, rb)
    total = max(per.values(), default=0.0)
    print(fmt_num(total))
    for k, d in per.items():
        print(f"  deg {k}: {fmt_num(d)}")
    return EXIT_OK


def cmd_stability(args) -> int:
    c = _read(args.path)
    _barcode(c)
    rep = stability_experiment(c, args.trials, args.magnitude, args.seed, constant=args.constant)
    _emit(_dump(rep.to_doc()), args.out)
    bad = sum(not t.bound_3delta_ok for t in rep.trials)
    sys.stderr.write(
        f"{len(rep.trials)} trials, {bad} over 3*delta, "
        f"{rep.within_delta_rate:.2%} within delta\n"
    )
    return EXIT_OK if rep.ok else EXIT_INVARIANT


def cmd_plot(args) -> int:
    c = _read(args.path)
    rb = _barcode(c)
    if args.ascii:
        _emit(render_ascii(rb), args.out)
        return EXIT_OK
    svg = render_svg(rb, sublevel_barcode(c), title=Path(args.path).name)
    out = args.out
    if out is None and os.environ.get("RECTBAR_OUT_DIR"):
        out = Path(args.path).stem + ".svg"
    _emit(svg, out)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rectbar", description="Rectangle barcodes of filtered GF(2) complexes.")
    p.add_argument("--version", action="version", version=f"rectbar {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check the complex axioms")
    s.add_argument("path")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("barcode", help="verified rectangle barcode")
    s.add_argument("path")
    s.add_argument("--degree", type=int)
    s.add_argument("--format", choices=("text", "doc"), default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_barcode)

    s = sub.add_parser("sublevel", help="one-parameter sublevel barcode")
    s.add_argument("path")
    s.add_argument("--degree", type=int)
    s.add_argument("--format", choices=("text", "doc"), default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sublevel)

    s = sub.add_parser("verify", help="check a barcode against interlevel homology")
    s.add_argument("path")
    s.add_argument("--barcode", help="barcode document to check instead of the derived one")
    s.add_argument("--no-exactness", action="store_true", help="skip the exactness sweep")
    s.add_argument("--show", type=int, default=5, help="mismatches to print")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("invariants", help="depths, spectral set and spread")
    s.add_argument("path")
    s.add_argument("--format", choices=("text", "doc"), default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("distance", help="bottleneck distance between two complexes")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("stability", help="random perturbation experiment")
    s.add_argument("path")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--magnitude", type=float, default=0.2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--constant", action="store_true", help="shift every generator by the same amount")
    s.add_argument("--out")
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("plot", help="SVG or text rendering")
    s.add_argument("path")
    s.add_argument("--ascii", action="store_true", help="text occupancy map instead of SVG")
    s.add_argument("--out")
    s.set_defaults(func=cmd_plot)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as e:
        sys.stderr.write(f"rectbar: {e}\n")
        return e.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
