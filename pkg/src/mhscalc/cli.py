"""Command-line front end.

Subcommands:
  s       evaluate a multiple harmonic sum s_mu(n)
  dual    print the dual multi-index mu*
  embed   print the 0/1 parameter vectors that reproduce s_mu
  c       evaluate a parametric nested sum (direct, recursive, or both)
  verify  run an identity verification sweep; exit 0 only if all exact
  bench   time direct enumeration against the memoized recurrence (CSV)

Exit codes: 0 all checks exact / value computed; 1 an identity comparison
failed; 2 malformed input; 3 a work guard tripped.

Reports are deterministic: a fixed command line (seed included) yields
byte-identical text/JSON/CSV output.  `bench` is the exception, since its
whole point is wall-clock measurement.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from random import Random

from . import mhs, nestedsums
from .egf import verify_operator_suite
from .errors import GuardExceeded
from .kernel import format_rational, parse_rational
from .mhs import MultiIndex
from .nestedsums import (
    DEFAULT_SUMMAND_GUARD,
    NestedSumSpec,
    RecurrenceEvaluator,
    c_direct,
    direct_summand_count,
    random_spec,
    random_shift_configuration,
)
from .report import VerificationReport, merge_reports

IDENTITIES = (
    "mhs-duality",
    "c-duality",
    "difference-formula",
    "recurrence",
    "shift",
    "egf-suite",
)


def _parse_index(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(item) for item in text.split(","))
    except ValueError:
        raise ValueError(f"not an index vector: {text!r}") from None


def _spec_from_args(args) -> NestedSumSpec:
    if not args.x:
        raise ValueError("--x is required here (blocks as 'x11,x12;x21,x22')")
    return NestedSumSpec.parse(args.x, args.t or "")


def _box_from_args(args, r: int, attr: str = "box", nmax_attr: str = "nmax") -> tuple[int, ...]:
    box_text = getattr(args, attr, None)
    if box_text:
        box = _parse_index(box_text)
        if len(box) != r:
            raise ValueError(f"--{attr} {box_text!r} must list {r} extents")
        return box
    return (getattr(args, nmax_attr) + 1,) * r


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(args, report: VerificationReport) -> int:
    if args.format == "json":
        _emit(args, report.to_json() + "\n")
    elif args.format == "csv":
        _emit(args, report.to_csv())
    else:
        _emit(args, report.to_text())
    return 0 if report.ok else 1


def _emit_value(args, payload: dict, text_value: str) -> int:
    if args.format == "json":
        _emit(args, json.dumps(payload) + "\n")
    elif args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(payload.keys())
        writer.writerow(payload.values())
        _emit(args, buffer.getvalue())
    else:
        _emit(args, text_value + "\n")
    return 0


# --- subcommand handlers ---


def _cmd_s(args) -> int:
    mu = MultiIndex.parse(args.mu)
    value = mhs.mhs_value(mu, args.n, args.guard)
    return _emit_value(
        args,
        {"command": "s", "mu": str(mu), "n": args.n, "value": format_rational(value)},
        format_rational(value),
    )


def _cmd_dual(args) -> int:
    mu = MultiIndex.parse(args.mu)
    dual = mhs.dual_index(mu)
    return _emit_value(
        args, {"command": "dual", "mu": str(mu), "dual": str(dual)}, str(dual)
    )


def _cmd_embed(args) -> int:
    mu = MultiIndex.parse(args.mu)
    vectors = {
        "type1": mhs.embed_type1(mu),
        "type2": mhs.embed_type2(mu),
    }
    if args.kind != "both":
        wanted = f"type{args.kind}"
        vector = vectors[wanted]
        return _emit_value(
            args,
            {"command": "embed", "mu": str(mu), wanted: list(vector)},
            ",".join(str(v) for v in vector),
        )
    text = "\n".join(
        f"{name}: {','.join(str(v) for v in vector)}" for name, vector in vectors.items()
    )
    return _emit_value(
        args,
        {
            "command": "embed",
            "mu": str(mu),
            "type1": list(vectors["type1"]),
            "type2": list(vectors["type2"]),
        },
        text,
    )


def _cmd_c(args) -> int:
    spec = _spec_from_args(args)
    index = _parse_index(args.n)
    if args.method in ("direct", "both"):
        direct = c_direct(spec, index, args.guard)
    if args.method in ("recursive", "both"):
        recursive = nestedsums.c_recursive(spec, index)
    if args.method == "direct":
        value, agree = direct, None
    elif args.method == "recursive":
        value, agree = recursive, None
    else:
        value, agree = direct, direct == recursive
    payload = {
        "command": "c",
        "spec": spec.text(),
        "n": list(index),
        "method": args.method,
        "value": format_rational(value),
    }
    if agree is not None:
        payload["methods_agree"] = agree
    code = _emit_value(args, payload, format_rational(value))
    if agree is False:
        return 1
    return code


def _random_boxes(rng: Random, r: int, nmax: int) -> tuple[int, ...]:
    return tuple(nmax + 1 for _ in range(r))


def _cmd_verify(args) -> int:
    identity = args.identity
    guard = args.guard

    if identity == "mhs-duality":
        if args.mu:
            report = mhs.verify_mhs_duality(
                0, args.nmax, mus=[MultiIndex.parse(args.mu)]
            )
        else:
            report = mhs.verify_mhs_duality(args.wmax, args.nmax)
        return _emit_report(args, report)

    if identity == "egf-suite":
        report = verify_operator_suite(degree=args.degree, seed=args.seed)
        return _emit_report(args, report)

    explicit = bool(args.x)
    rng = Random(args.seed)

    if identity == "c-duality":
        if explicit:
            spec = _spec_from_args(args)
            report = nestedsums.verify_duality(spec, _box_from_args(args, spec.r), guard)
        else:
            parts = []
            for _ in range(args.count):
                spec = random_spec(rng, args.rmax, args.pmax)
                parts.append(
                    nestedsums.verify_duality(spec, _random_boxes(rng, spec.r, args.nmax), guard)
                )
            report = merge_reports("c-duality", nestedsums.C_DUALITY_STATEMENT, parts)
        return _emit_report(args, report)

    if identity == "difference-formula":
        if explicit:
            spec = _spec_from_args(args)
            nbox = _box_from_args(args, spec.r)
            kbox = (args.kmax + 1,) * spec.r
            report = nestedsums.verify_difference_formula(spec, nbox, kbox, guard)
        else:
            parts = []
            for _ in range(args.count):
                spec = random_spec(rng, args.rmax, args.pmax)
                nbox = _random_boxes(rng, spec.r, args.nmax)
                kbox = (args.kmax + 1,) * spec.r
                parts.append(nestedsums.verify_difference_formula(spec, nbox, kbox, guard))
            report = merge_reports(
                "difference-formula", nestedsums.DIFFERENCE_STATEMENT, parts
            )
        return _emit_report(args, report)

    if identity == "recurrence":
        if explicit:
            spec = _spec_from_args(args)
            report = nestedsums.verify_recurrence(spec, _box_from_args(args, spec.r), guard)
        else:
            parts = []
            for _ in range(args.count):
                spec = random_spec(rng, args.rmax, args.pmax)
                parts.append(
                    nestedsums.verify_recurrence(
                        spec, _random_boxes(rng, spec.r, args.nmax), guard
                    )
                )
            report = merge_reports("recurrence", nestedsums.RECURRENCE_STATEMENT, parts)
        return _emit_report(args, report)

    if identity == "shift":
        if explicit:
            spec = _spec_from_args(args)
            if not args.subset:
                raise ValueError("--subset is required with an explicit --x")
            subset = _parse_index(args.subset)
            constant = parse_rational(args.c) if args.c else Fraction(1)
            report = nestedsums.verify_shift_identity(
                spec, subset, constant, _box_from_args(args, spec.r), guard
            )
        else:
            parts = []
            for _ in range(args.count):
                spec, subset, constant = random_shift_configuration(
                    rng, args.rmax, args.pmax
                )
                parts.append(
                    nestedsums.verify_shift_identity(
                        spec, subset, constant, _random_boxes(rng, spec.r, args.nmax), guard
                    )
                )
            report = merge_reports("shift", nestedsums.SHIFT_STATEMENT, parts)
        return _emit_report(args, report)

    raise ValueError(f"unknown identity {identity!r}")


def _time_best(repeats: int, fn) -> tuple[float, Fraction]:
    best = None
    value = None
    for _ in range(repeats):
        start = time.perf_counter()
        value = fn()
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best, value


def run_bench(
    spec: NestedSumSpec,
    ladder: list[int],
    repeats: int = 3,
    guard: int = DEFAULT_SUMMAND_GUARD,
) -> list[dict]:
    """Time c_direct against a cold-memo recurrence pass at each ladder rung.

    The index at rung n is (n, ..., n); `speedup` is direct/recursive time.
    """
    rows = []
    for n in ladder:
        index = (n,) * spec.r
        direct_s, direct_value = _time_best(repeats, lambda: c_direct(spec, index, guard))
        def cold_recursive():
            evaluator = RecurrenceEvaluator(spec)
            value = evaluator.value(index)
            cold_recursive.memo_entries = evaluator.memo_entries
            return value
        recursive_s, recursive_value = _time_best(repeats, cold_recursive)
        rows.append(
            {
                "r": spec.r,
                "p": spec.p,
                "n": n,
                "direct_seconds": f"{direct_s:.6f}",
                "recursive_seconds": f"{recursive_s:.6f}",
                "speedup": f"{direct_s / recursive_s:.2f}",
                "direct_summands": direct_summand_count(spec, index),
                "recursive_memo_entries": cold_recursive.memo_entries,
                "equal": direct_value == recursive_value,
            }
        )
    return rows


def bench_csv(rows: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _cmd_bench(args) -> int:
    rng = Random(args.seed)
    if args.x:
        spec = _spec_from_args(args)
    else:
        tparams = (
            tuple(parse_rational(item) for item in args.t.split(","))
            if args.t
            else (Fraction(1),) * (args.p - 1)
        )
        xblocks = tuple(
            tuple(nestedsums.random_rational(rng) for _ in range(args.p))
            for _ in range(args.r)
        )
        spec = NestedSumSpec(xblocks, tparams)
    if args.ladder:
        ladder = sorted(set(_parse_index(args.ladder)))
    else:
        ladder = sorted({max(1, args.n // 4), args.n // 2, (3 * args.n) // 4, args.n})
    rows = run_bench(spec, ladder, args.repeats, args.guard)
    _emit(args, bench_csv(rows))
    return 0 if all(row["equal"] for row in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhscalc",
        description="Exact evaluation and identity verification for multiple "
        "harmonic sums, parametric nested sums, and the difference/inversion "
        "calculus on multi-sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_format=True):
        if with_format:
            p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument(
            "--guard",
            type=int,
            default=DEFAULT_SUMMAND_GUARD,
            help="summand/cell guard before refusing to enumerate",
        )

    p_s = sub.add_parser("s", help="evaluate s_mu(n)")
    p_s.add_argument("--mu", required=True, help='multi-index, e.g. "(1,2,3)"')
    p_s.add_argument("--n", type=int, required=True)
    add_common(p_s)
    p_s.set_defaults(handler=_cmd_s)

    p_dual = sub.add_parser("dual", help="print the dual multi-index")
    p_dual.add_argument("--mu", required=True)
    add_common(p_dual)
    p_dual.set_defaults(handler=_cmd_dual)

    p_embed = sub.add_parser("embed", help="0/1 parameter vectors reproducing s_mu")
    p_embed.add_argument("--mu", required=True)
    p_embed.add_argument("--kind", choices=("1", "2", "both"), default="both")
    add_common(p_embed)
    p_embed.set_defaults(handler=_cmd_embed)

    p_c = sub.add_parser("c", help="evaluate a parametric nested sum")
    p_c.add_argument("--x", required=True, help='blocks, e.g. "1/2,1/3;0,1"')
    p_c.add_argument("--t", default="", help='shift parameters, e.g. "2" (empty for depth 1)')
    p_c.add_argument("--n", required=True, help='index vector, e.g. "2,1"')
    p_c.add_argument("--method", choices=("direct", "recursive", "both"), default="direct")
    add_common(p_c)
    p_c.set_defaults(handler=_cmd_c)

    p_verify = sub.add_parser("verify", help="verify an identity sweep exactly")
    p_verify.add_argument("--identity", choices=IDENTITIES, required=True)
    p_verify.add_argument("--mu", help="restrict mhs-duality to one multi-index")
    p_verify.add_argument("--wmax", type=int, default=6, help="mhs-duality weight sweep bound")
    p_verify.add_argument("--x", help="explicit parameter blocks (otherwise seeded random specs)")
    p_verify.add_argument("--t", default="", help="explicit shift parameters")
    p_verify.add_argument("--subset", help='shift identity slots, e.g. "1,2"')
    p_verify.add_argument("--c", help="shift identity constant (default 1)")
    p_verify.add_argument("--nmax", type=int, default=3, help="index sweep bound per slot")
    p_verify.add_argument("--kmax", type=int, default=2, help="difference order bound per slot")
    p_verify.add_argument("--box", help='explicit extents, e.g. "4,4"')
    p_verify.add_argument("--count", type=int, default=20, help="number of random specs")
    p_verify.add_argument("--rmax", type=int, default=3, help="random spec slot bound")
    p_verify.add_argument("--pmax", type=int, default=3, help="random spec depth bound")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--degree", type=int, default=6, help="egf-suite truncation degree")
    add_common(p_verify)
    p_verify.set_defaults(handler=_cmd_verify)

    p_bench = sub.add_parser(
        "bench", help="CSV timing of direct enumeration vs memoized recurrence"
    )
    p_bench.add_argument("--r", type=int, default=1)
    p_bench.add_argument("--p", type=int, default=3)
    p_bench.add_argument("--n", type=int, default=40, help="largest ladder rung")
    p_bench.add_argument("--ladder", help='explicit rungs, e.g. "10,20,40"')
    p_bench.add_argument("--x", help="explicit blocks (otherwise seeded random)")
    p_bench.add_argument("--t", default="", help="explicit shifts (default all 1)")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--repeats", type=int, default=3, help="best-of timing repeats")
    add_common(p_bench, with_format=False)
    p_bench.set_defaults(handler=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except GuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
