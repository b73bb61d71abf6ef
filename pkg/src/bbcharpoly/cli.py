"""Command-line interface.

Subcommands: ``charpoly``, ``minpoly``, ``multiplicities``, ``sympower``,
``verify``.  Matrices are read in SMS format (``-`` for stdin), results go
to stdout; ``--explain`` streams a JSON-lines decision trace to stderr.

Exit codes: 0 success, 2 input error (including oracle refusals above the
size caps), 3 computation failure, 4 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .adaptive import (
    METHODS,
    AdaptiveConfig,
    AdaptiveError,
    MethodUnavailableError,
    TraceLog,
    charpoly_with_details,
)
from .blackbox import (
    DetNotCertifiedError,
    MinpolyNotCertifiedError,
    SparseMatrix,
    wiedemann_minpoly,
)
from .ff import is_prime, next_prime
from .graphs import Graph, GraphInputError, symmetric_power
from .integer import (
    IntegerCharpolyError,
    IntegerMatrix,
    integer_charpoly_with_details,
    integer_minpoly,
)
from .multiplicity import IndexCalculusFailure
from .oracle import (
    dense_charpoly,
    dense_integer_charpoly,
    dense_minpoly,
)
from .poly import BadPrimeError, FieldPoly, FieldTooSmallError, IntPoly, factor
from .sms import SmsFormatError, emit_sms, parse_sms

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3
EXIT_MISMATCH = 4

FIELD_VERIFY_CAP = 300
INTEGER_VERIFY_FULL_CAP = 300
INTEGER_VERIFY_REDUCTION_CAP = 1000
VERIFY_REDUCTION_PRIMES = 3

_COMPUTE_ERRORS = (
    AdaptiveError,
    BadPrimeError,
    DetNotCertifiedError,
    IndexCalculusFailure,
    IntegerCharpolyError,
    MinpolyNotCertifiedError,
)


class UsageError(ValueError):
    """Bad flag combination or unusable input."""


class VerificationMismatch(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Rendering


def _symmetric_coeffs(poly) -> tuple:
    if isinstance(poly, FieldPoly):
        half = poly.p // 2
        return tuple(c - poly.p if c > half else c for c in poly.coeffs)
    return tuple(poly.coeffs)


def _descending_text(coeffs) -> str:
    """Compact factored-form rendering, highest power first: X^2-10*X+1."""
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        elif i == 1:
            body = "X" if mag == 1 else f"{mag}*X"
        else:
            body = f"X^{i}" if mag == 1 else f"{mag}*X^{i}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("-" if c < 0 else "+") + body)
    return "".join(parts) if parts else "0"


def _sorted_factor_pairs(pairs):
    """Canonical factor order: degree, then descending lexicographic order
    of the symmetric-range coefficient tuple (constant term first)."""
    keyed = []
    for poly, exponent in pairs:
        coeffs = _symmetric_coeffs(poly)
        keyed.append(((len(coeffs) - 1, tuple(-c for c in coeffs)), coeffs, exponent))
    keyed.sort(key=lambda t: t[0])
    return [(coeffs, exponent) for _, coeffs, exponent in keyed]


def _factored_text(pairs) -> str:
    rendered = []
    for coeffs, exponent in _sorted_factor_pairs(pairs):
        body = f"({_descending_text(coeffs)})"
        rendered.append(body if exponent == 1 else f"{body}^{exponent}")
    return "*".join(rendered) if rendered else "1"


def _poly_payload(poly) -> dict:
    return {"degree": poly.degree, "coeffs": list(poly.coeffs)}


def _json_out(payload) -> str:
    return json.dumps(payload, sort_keys=True)


# ---------------------------------------------------------------------------
# Shared plumbing


def _read_matrix(path: str) -> SparseMatrix:
    if path == "-":
        return parse_sms(sys.stdin.read())
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return parse_sms(handle.read())
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err}")


def _field_modulus(args) -> int | None:
    if args.integer:
        return None
    if args.field is None:
        return None  # integer mode is the default
    p = args.field
    if p == 2 or p > (1 << 31) or not is_prime(p):
        raise UsageError(f"--field needs an odd prime <= 2^31, got {p}")
    return p


def _make_cfg(args, trace_log) -> AdaptiveConfig:
    return AdaptiveConfig(
        threshold=args.threshold,
        confidence_rounds=args.confidence,
        method=args.method,
        seed=args.seed,
        jobs=args.jobs,
        trace_log=trace_log,
    )


def _emit_explain(trace_log):
    if trace_log is not None:
        for line in trace_log.lines():
            print(line, file=sys.stderr)


def _fresh_primes(count: int, avoid=()) -> list[int]:
    out = []
    p = 1 << 22
    while len(out) < count:
        p = next_prime(p)
        if p not in avoid:
            out.append(p)
    return out


def _verify_field(matrix: SparseMatrix, p: int, charpoly: FieldPoly):
    if matrix.n > FIELD_VERIFY_CAP:
        raise UsageError(
            f"--verify over a field refuses n > {FIELD_VERIFY_CAP} (n = {matrix.n})"
        )
    want = dense_charpoly(matrix.to_dense(), p)
    if want != charpoly:
        raise VerificationMismatch(
            f"charpoly mod {p} disagrees with the dense oracle"
        )


def _verify_integer(matrix: SparseMatrix, charpoly: IntPoly, field_prime: int):
    n = matrix.n
    if n <= INTEGER_VERIFY_FULL_CAP:
        want = dense_integer_charpoly(matrix.to_dense())
        if want != charpoly:
            raise VerificationMismatch(
                "integer charpoly disagrees with the dense CRT oracle"
            )
        return
    if n > INTEGER_VERIFY_REDUCTION_CAP:
        raise UsageError(
            f"--verify --integer refuses n > {INTEGER_VERIFY_REDUCTION_CAP}"
        )
    dense = matrix.to_dense()
    for p in _fresh_primes(VERIFY_REDUCTION_PRIMES, avoid={field_prime}):
        if charpoly.reduce(p) != dense_charpoly(dense, p):
            raise VerificationMismatch(
                f"integer charpoly mod {p} disagrees with the dense oracle"
            )


# ---------------------------------------------------------------------------
# Subcommands


def cmd_charpoly(args) -> int:
    matrix = _read_matrix(args.matrix)
    trace_log = TraceLog() if args.explain else None
    cfg = _make_cfg(args, trace_log)
    p = _field_modulus(args)
    if p is not None:
        result = charpoly_with_details(matrix.operator(p), cfg)
        poly = result.charpoly
        factor_pairs = list(zip((pr.poly for pr in result.profiles), result.multiplicities))
        method = result.method
        if args.verify:
            _verify_field(matrix, p, poly)
    else:
        details = integer_charpoly_with_details(IntegerMatrix(matrix), cfg)
        poly = details.charpoly
        factor_pairs = list(zip(details.lifted_factors, details.lift_exponents))
        method = details.field_result.method
        if args.verify:
            _verify_integer(matrix, poly, details.field_prime)
    if args.output == "coeffs":
        print(poly.text())
    elif args.output == "factored":
        print(_factored_text(factor_pairs))
    else:
        payload = {
            "command": "charpoly",
            "modulus": p,
            "method": method,
            "verified": bool(args.verify),
            **_poly_payload(poly),
            "factors": [
                {"coeffs": list(coeffs), "exponent": e}
                for coeffs, e in _sorted_factor_pairs(factor_pairs)
            ],
        }
        print(_json_out(payload))
    _emit_explain(trace_log)
    return EXIT_OK


def cmd_minpoly(args) -> int:
    matrix = _read_matrix(args.matrix)
    trace_log = TraceLog() if args.explain else None
    cfg = _make_cfg(args, trace_log)
    rng = random.Random(cfg.seed)
    p = _field_modulus(args)
    if p is not None:
        poly = wiedemann_minpoly(matrix.operator(p), rng, cfg.confidence_rounds)
        if args.verify:
            if matrix.n > FIELD_VERIFY_CAP:
                raise UsageError(
                    f"--verify refuses n > {FIELD_VERIFY_CAP} (n = {matrix.n})"
                )
            if poly != dense_minpoly(matrix.to_dense(), p):
                raise VerificationMismatch("minpoly disagrees with the dense oracle")
        factor_pairs = None
        if args.output in ("factored", "json"):
            factor_pairs = [(f, m) for f, m in factor(poly, rng)]
    else:
        poly = integer_minpoly(IntegerMatrix(matrix), rng, cfg.confidence_rounds)
        if args.verify:
            if matrix.n > FIELD_VERIFY_CAP:
                raise UsageError(
                    f"--verify refuses n > {FIELD_VERIFY_CAP} (n = {matrix.n})"
                )
            # The dense minpoly of a reduction always divides the reduced
            # integer minpoly; equality can fail at (rare) bad primes, so
            # demand divisibility everywhere and degree equality somewhere.
            dense = matrix.to_dense()
            degree_witness = False
            for check_p in _fresh_primes(VERIFY_REDUCTION_PRIMES):
                local = dense_minpoly(dense, check_p)
                if not (poly.reduce(check_p) % local).is_zero:
                    raise VerificationMismatch(
                        f"integer minpoly mod {check_p} disagrees with the oracle"
                    )
                degree_witness = degree_witness or local.degree == poly.degree
            if not degree_witness:
                raise VerificationMismatch(
                    "every reduction had a smaller dense minpoly degree"
                )
        if args.output == "factored":
            raise UsageError(
                "factored output of the integer minimal polynomial is not supported"
            )
        factor_pairs = None
    if args.output == "coeffs":
        print(poly.text())
    elif args.output == "factored":
        print(_factored_text(factor_pairs))
    else:
        payload = {
            "command": "minpoly",
            "modulus": p,
            "verified": bool(args.verify),
            **_poly_payload(poly),
        }
        if factor_pairs is not None:
            payload["factors"] = [
                {"coeffs": list(coeffs), "exponent": e}
                for coeffs, e in _sorted_factor_pairs(factor_pairs)
            ]
        print(_json_out(payload))
    _emit_explain(trace_log)
    return EXIT_OK


def cmd_multiplicities(args) -> int:
    matrix = _read_matrix(args.matrix)
    trace_log = TraceLog() if args.explain else None
    cfg = _make_cfg(args, trace_log)
    p = _field_modulus(args)
    if p is not None:
        result = charpoly_with_details(matrix.operator(p), cfg)
        rows = [
            (_symmetric_coeffs(pr.poly), pr.degree, pr.minpoly_mult, m)
            for pr, m in zip(result.profiles, result.multiplicities)
        ]
        if args.verify:
            _verify_field(matrix, p, result.charpoly)
        pairs = list(zip((pr.poly for pr in result.profiles), result.multiplicities))
    else:
        details = integer_charpoly_with_details(IntegerMatrix(matrix), cfg)
        rows = [
            (_symmetric_coeffs(f), f.degree, None, e)
            for f, e in zip(details.lifted_factors, details.lift_exponents)
        ]
        if args.verify:
            _verify_integer(matrix, details.charpoly, details.field_prime)
        pairs = list(zip(details.lifted_factors, details.lift_exponents))
    rows.sort(key=lambda r: (r[1], tuple(-c for c in r[0])))
    if args.output == "coeffs":
        for coeffs, degree, minpoly_mult, mult in rows:
            e_text = "-" if minpoly_mult is None else str(minpoly_mult)
            print(f"{mult}\t{e_text}\t{degree}\t{_descending_text(coeffs)}")
    elif args.output == "factored":
        print(_factored_text(pairs))
    else:
        payload = {
            "command": "multiplicities",
            "modulus": p,
            "verified": bool(args.verify),
            "factors": [
                {
                    "coeffs": list(coeffs),
                    "degree": degree,
                    "minpoly_multiplicity": minpoly_mult,
                    "multiplicity": mult,
                }
                for coeffs, degree, minpoly_mult, mult in rows
            ],
        }
        print(_json_out(payload))
    _emit_explain(trace_log)
    return EXIT_OK


def cmd_sympower(args) -> int:
    matrix = _read_matrix(args.matrix)
    graph = Graph.from_adjacency(matrix)
    power = symmetric_power(graph, args.k)
    sys.stdout.write(emit_sms(power.adjacency()))
    return EXIT_OK


def cmd_verify(args) -> int:
    matrix = _read_matrix(args.matrix)
    trace_log = TraceLog() if args.explain else None
    cfg = _make_cfg(args, trace_log)
    p = _field_modulus(args)
    if p is not None:
        result = charpoly_with_details(matrix.operator(p), cfg)
        _verify_field(matrix, p, result.charpoly)
        print(f"verify ok: charpoly mod {p} matches the dense oracle (n={matrix.n})")
    else:
        details = integer_charpoly_with_details(IntegerMatrix(matrix), cfg)
        _verify_integer(matrix, details.charpoly, details.field_prime)
        mode = (
            "dense CRT oracle"
            if matrix.n <= INTEGER_VERIFY_FULL_CAP
            else f"reduction mod {VERIFY_REDUCTION_PRIMES} fresh primes"
        )
        print(f"verify ok: integer charpoly matches the {mode} (n={matrix.n})")
    _emit_explain(trace_log)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bbcharpoly",
        description=(
            "Characteristic polynomials of sparse matrices in the black-box "
            "model, over a prime field or the integers."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("matrix", help="SMS matrix file, or - for stdin")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--field", type=int, default=None, help="odd prime modulus")
    mode.add_argument(
        "--integer", action="store_true", help="work over Z (default)"
    )
    common.add_argument(
        "--method",
        choices=list(METHODS),
        default="auto",
        help="multiplicity method (default: auto)",
    )
    common.add_argument(
        "--threshold", type=int, default=5, help="combinatorial threshold T"
    )
    common.add_argument(
        "--confidence",
        type=int,
        default=2,
        help="independent projection rounds per minimal polynomial",
    )
    common.add_argument("--seed", type=int, default=None, help="rng seed")
    common.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="worker-count hint (current implementation runs sequentially)",
    )
    common.add_argument(
        "--explain",
        action="store_true",
        help="JSON-lines decision trace on stderr",
    )
    common.add_argument(
        "--output",
        choices=["coeffs", "factored", "json"],
        default="coeffs",
        help="output form (default: coeffs)",
    )
    common.add_argument(
        "--verify",
        action="store_true",
        help="cross-check against the dense oracle (size-capped)",
    )

    cp = sub.add_parser("charpoly", parents=[common], help="characteristic polynomial")
    cp.set_defaults(func=cmd_charpoly)
    mp = sub.add_parser("minpoly", parents=[common], help="minimal polynomial")
    mp.set_defaults(func=cmd_minpoly)
    mu = sub.add_parser(
        "multiplicities", parents=[common], help="factor multiplicities"
    )
    mu.set_defaults(func=cmd_multiplicities)

    sp = sub.add_parser("sympower", help="symmetric k-th power of a graph")
    sp.add_argument("matrix", help="adjacency matrix in SMS format, or -")
    sp.add_argument("--k", type=int, required=True, help="subset size k")
    sp.set_defaults(func=cmd_sympower)

    ve = sub.add_parser(
        "verify", parents=[common], help="pipeline vs dense oracle comparison"
    )
    ve.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        SmsFormatError,
        GraphInputError,
        UsageError,
        MethodUnavailableError,
        FieldTooSmallError,
    ) as err:
        print(f"bbcharpoly: input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except VerificationMismatch as err:
        print(f"bbcharpoly: verification mismatch: {err}", file=sys.stderr)
        return EXIT_MISMATCH
    except _COMPUTE_ERRORS as err:
        print(f"bbcharpoly: computation failed: {err}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
