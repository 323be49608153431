"""Command-line front end: relation detection and minimal polynomial recovery.

Exit codes are a stable contract: 0 a relation/polynomial was found,
1 error (bad input, precision exhaustion), 2 exhausted (no relation below
the proven floor), 3 minimal-polynomial verification failure ("insufficient
precision"; the spurious relation is still printed).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time

from .arith import PrecisionContext, PrecisionError
from .engine import EngineConfig, Exhausted, Found, detect_sir_permuted
from .hyperplane import InputMatrix, LinearDependenceError
from .minpoly import (ApproxAlgebraicNumber, RelationNotFound,
                      VerificationError, minimal_polynomial)

EXIT_FOUND = 0
EXIT_ERROR = 1
EXIT_EXHAUSTED = 2
EXIT_UNVERIFIED = 3


@dataclasses.dataclass
class RunReport:
    outcome: str
    relation: list[int] | None
    polynomial: list[int] | None
    iterations: int
    proven_floor: float
    gamma: float
    digits: int
    mode: str
    elapsed_seconds: float

    def emit(self, as_json: bool) -> None:
        if as_json:
            print(json.dumps(dataclasses.asdict(self)))
            return
        print(f"OUTCOME: {self.outcome}")
        if self.relation is not None:
            print("RELATION: " + " ".join(str(v) for v in self.relation))
        if self.polynomial is not None:
            print("POLY: " + " ".join(str(c) for c in self.polynomial))
        print(f"ITER: {self.iterations}")
        print(f"FLOOR: {self.proven_floor:.6g}")
        print(f"GAMMA: {self.gamma:g}")
        print(f"DIGITS: {self.digits}")
        print(f"MODE: {self.mode}")
        print(f"TIME: {self.elapsed_seconds:.3f}s")


def _guard_digits(digits: int) -> int:
    return min(10, max(1, digits // 2))


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--gamma", type=float, default=2.0,
                     help="pivot weighting parameter, must exceed 2/sqrt(3) "
                          "(default 2; larger often means fewer iterations "
                          "but needs more precision)")
    sub.add_argument("--digits", type=int, default=50,
                     help="decimal digits (default 50)")
    sub.add_argument("--bound", type=float, default=None,
                     help="stop with a proof once no relation below this "
                          "norm can exist")
    sub.add_argument("--max-iter", default="auto",
                     help="iteration cap, or 'auto' (default)")
    sub.add_argument("--level", type=int, choices=(1, 2), default=1,
                     help="1 = all multiprecision, 2 = hardware fast path "
                          "(default 1)")
    sub.add_argument("--json", action="store_true",
                     help="print one JSON object instead of the line report")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sirel",
        description="Detect simultaneous integer relations and recover "
                    "minimal polynomials of approximate algebraic numbers.")
    subs = parser.add_subparsers(dest="command", required=True)

    rel = subs.add_parser(
        "relation",
        help="find an integer vector orthogonal to every input vector",
        description="Input file: one vector per line, as whitespace-separated "
                    "decimal literals; t lines of n entries each, t < n. "
                    "Literals are parsed at full working precision, never "
                    "through hardware floats.")
    rel.add_argument("input", help="path to the input file ('-' for stdin)")
    _common_flags(rel)

    mp = subs.add_parser(
        "minpoly",
        help="recover the minimal polynomial of re + im*i",
        description="--digits states how many significant decimal digits of "
                    "the approximation are trustworthy; the effective count "
                    "is capped by the digits actually present in the --re / "
                    "--im literals. Too few digits yields exit code 3 with "
                    "the spurious relation printed.")
    mp.add_argument("--re", required=True, help="real part (decimal literal)")
    mp.add_argument("--im", required=True, help="imaginary part (decimal literal)")
    mp.add_argument("--degree", type=int, required=True,
                    help="degree of the candidate minimal polynomial")
    _common_flags(mp)
    return parser


def _read_vectors(path: str) -> list[list[str]]:
    if path == "-":
        data = sys.stdin.read()
    else:
        with open(path) as fh:
            data = fh.read()
    rows = []
    for line in data.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line.split())
    if not rows:
        raise ValueError("input file contains no vectors")
    if any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("input vectors have inconsistent lengths")
    return rows


def _max_iter(value):
    return value if value == "auto" else int(value)


def literal_significant_digits(text: str) -> int | None:
    """Significant decimal digits carried by a literal, None if exact.

    Integer-form literals ('2', '-17') and zero denote exact values and do
    not constrain the accuracy; for anything else leading zeros do not
    count, trailing given digits do ('2.000' has 4, '0.00123' has 3).
    """
    text = text.strip().lstrip("+-")
    if "e" in text or "E" in text:
        text = text.split("e")[0].split("E")[0]
    if "." not in text:
        return None
    digits = text.replace(".", "")
    if digits.strip("0") == "":
        return None
    return len(digits.lstrip("0"))


def cmd_relation(args) -> tuple[RunReport, int]:
    rows = _read_vectors(args.input)
    x = InputMatrix(rows)  # each file line is one input vector x_i
    ctx = PrecisionContext(args.digits, _guard_digits(args.digits))
    config = EngineConfig(gamma=args.gamma, ctx=ctx,
                          max_iterations=_max_iter(args.max_iter),
                          target_bound=args.bound,
                          mode="one-level" if args.level == 1 else "two-level")
    start = time.perf_counter()
    result, _ = detect_sir_permuted(x, config)
    elapsed = time.perf_counter() - start
    if isinstance(result, Found):
        report = RunReport("found", list(result.relation), None,
                           result.iterations, result.proven_floor,
                           args.gamma, args.digits, config.mode, elapsed)
        return report, EXIT_FOUND
    report = RunReport("exhausted", None, None, result.iterations,
                       result.proven_floor, args.gamma, args.digits,
                       config.mode, elapsed)
    return report, EXIT_EXHAUSTED


def cmd_minpoly(args) -> tuple[RunReport, int]:
    if args.degree < 1:
        raise ValueError("--degree must be at least 1")
    stated = args.digits
    for lit in (args.re, args.im):
        lit_digits = literal_significant_digits(lit)
        if lit_digits is not None:
            stated = min(stated, lit_digits)
    working = max(32, 2 * stated + 16)
    ctx = PrecisionContext(working, _guard_digits(working))
    alpha = ApproxAlgebraicNumber(re=args.re, im=args.im, stated_digits=stated)
    config = EngineConfig(gamma=args.gamma, ctx=ctx,
                          max_iterations=_max_iter(args.max_iter),
                          target_bound=args.bound,
                          mode="one-level" if args.level == 1 else "two-level")
    start = time.perf_counter()
    mode = config.mode
    details: dict = {}
    try:
        poly = minimal_polynomial(alpha, args.degree, config, details=details)
    except VerificationError as exc:
        elapsed = time.perf_counter() - start
        print(f"insufficient precision: {exc}", file=sys.stderr)
        report = RunReport("error", list(exc.relation), None,
                           details.get("iterations", 0),
                           details.get("proven_floor", 0.0),
                           args.gamma, stated, mode, elapsed)
        return report, EXIT_UNVERIFIED
    except RelationNotFound as exc:
        elapsed = time.perf_counter() - start
        print(str(exc), file=sys.stderr)
        report = RunReport("exhausted", None, None, exc.iterations,
                           exc.proven_floor, args.gamma, stated, mode, elapsed)
        return report, EXIT_EXHAUSTED
    elapsed = time.perf_counter() - start
    report = RunReport("found", None, list(poly.coeffs),
                       details.get("iterations", 0),
                       details.get("proven_floor", 0.0),
                       args.gamma, stated, mode, elapsed)
    return report, EXIT_FOUND


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "relation":
            report, code = cmd_relation(args)
        else:
            report, code = cmd_minpoly(args)
    except (ValueError, OSError, LinearDependenceError, PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report.emit(args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
