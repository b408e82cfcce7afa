"""Command-line entry point.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 term ceiling hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .finitetype import DEFAULT_MAX_ORDER, DEFAULT_TERM_LIMIT, ResourceLimitExceeded, iterate
from .numeric import DOCUMENTED_POINTS, EvalPoint, adjudicate, deviations, fd_report
from .report import (
    TARGETS,
    ReportDocument,
    RunConfig,
    build_report,
    identity_section,
    published_eq14,
    published_variant,
    render_doc,
    target_function,
)
from .surface import build_anchor_ring, perturbed
from .trigring import PhiHarmonic, render, render_phi

TERM_LIMIT_ENV = "ANCHORTYPE_TERM_LIMIT"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_params(text: str | None) -> tuple[Fraction, Fraction] | None:
    if text is None or text == "symbolic":
        return None
    vals = {}
    for part in text.split(","):
        key, sep, val = part.partition("=")
        if not sep or key.strip() not in ("a", "r"):
            raise UsageError(f"bad --params entry {part!r}; expected a=<q>,r=<q>")
        try:
            vals[key.strip()] = Fraction(val.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad rational {val!r}") from exc
    if set(vals) != {"a", "r"}:
        raise UsageError("--params needs both a and r")
    if not vals["a"] > vals["r"] > 0:
        raise UsageError("--params needs a > r > 0")
    return vals["a"], vals["r"]


def _term_limit(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(TERM_LIMIT_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"{TERM_LIMIT_ENV} must be an integer") from exc
    return DEFAULT_TERM_LIMIT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anchortype",
        description="Exact Laplacian iteration and finite-type certificates for the anchor ring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, order_flag=None):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--params", help="instantiate parameters, e.g. a=2,r=1 (default: symbolic)")
        p.add_argument("--term-limit", type=int, default=None)

    p = sub.add_parser("iterate", help="print L^K applied to a target")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--target", choices=TARGETS, default="n3")
    common(p)

    p = sub.add_parser("certify", help="bounded-order infinite-type certificate")
    p.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER)
    p.add_argument("--target", choices=TARGETS, default="n3")
    common(p)

    p = sub.add_parser("verify", help="check the structural identities")
    common(p)
    p.add_argument("--perturb-h", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--perturb-k", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("adjudicate", help="referee published vs engine iterate with finite differences")
    p.add_argument("--order", type=int, default=2)
    common(p)

    p = sub.add_parser("numeric", help="finite-difference convergence suite")
    common(p)
    return parser


def _emit(payload: bytes, output: str | None) -> None:
    if output:
        with open(output, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def _cmd_iterate(args, params, limit) -> int:
    if args.order < 1:
        raise UsageError("--order must be at least 1")
    ctx = build_anchor_ring()
    f = target_function(ctx, args.target)
    trace = iterate(ctx.laplacian, f, args.order, label=args.target, term_limit=limit)
    value = trace[args.order].value
    only_f0 = value.fc.is_zero() and value.fs.is_zero()
    text = render(value.f0, params) if only_f0 else render_phi(value, params)
    if args.format == "json":
        _emit(
            _json_bytes(
                {"target": args.target, "order": args.order, "pole": trace[args.order].pole, "expression": text}
            ),
            args.output,
        )
    else:
        _emit((text + "\n").encode(), args.output)
    return EXIT_OK


def _cmd_certify(args, params, limit) -> int:
    try:
        cfg = RunConfig(
            subcommand="certify",
            max_order=args.max_order,
            target=args.target,
            params=params,
            format=args.format,
            output=args.output,
            term_limit=limit,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc, cert = build_report(cfg)
    _emit(render_doc(doc, args.format), args.output)
    ok = cert.verdict.kind != "Inconclusive" and all(doc.identities.values())
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_verify(args, params, limit) -> int:
    ctx = build_anchor_ring()
    if args.perturb_h or args.perturb_k:
        ctx = perturbed(ctx, dH=1 if args.perturb_h else 0, dK=1 if args.perturb_k else 0)
    result = identity_section(ctx)
    if args.format == "json":
        _emit(_json_bytes(result), args.output)
    else:
        lines = [f"{k}: {'pass' if v else 'FAIL'}" for k, v in sorted(result.items())]
        _emit(("\n".join(lines) + "\n").encode(), args.output)
    return EXIT_OK if all(result.values()) else EXIT_FAIL


def _points(params):
    if params is None:
        return list(DOCUMENTED_POINTS)
    return [EvalPoint(p.t, p.phi, float(params[0]), float(params[1])) for p in DOCUMENTED_POINTS]


def _cmd_adjudicate(args, params, limit) -> int:
    if args.order < 2:
        raise UsageError("--order must be at least 2")
    ctx = build_anchor_ring()
    trace = iterate(ctx.laplacian, ctx.gauss[2], args.order, label="n3", term_limit=limit)
    prev, engine = trace[args.order - 1].value.f0, trace[args.order].value.f0
    printed = published_eq14() if args.order == 2 else published_variant(engine, args.order)
    cands = [("paper", printed), ("engine", engine)]
    pts = _points(params)
    winner = adjudicate(prev, cands, pts)
    devs = deviations(prev, cands, pts)
    if args.format == "json":
        _emit(_json_bytes({"order": args.order, "winner": winner, "max_deviation": devs}), args.output)
    else:
        lines = [f"order {args.order}: winner {winner}"]
        lines += [f"  {lbl}: max deviation {devs[lbl]:.3e}" for lbl, _ in cands]
        _emit(("\n".join(lines) + "\n").encode(), args.output)
    return EXIT_FAIL if winner == "inconclusive" else EXIT_OK


def _cmd_numeric(args, params, limit) -> int:
    ctx = build_anchor_ring()
    trace = iterate(ctx.laplacian, ctx.gauss[2], 2, label="n3", term_limit=limit)
    v = trace.values()
    rep = fd_report([("L n3", v[0], v[1]), ("L^2 n3", v[1], v[2])], _points(params))
    ok = all(1.7 <= o <= 2.3 for o in rep.orders())
    if args.format == "json":
        rows = [vars(r) for r in rep.rows]
        _emit(_json_bytes({"steps": list(rep.steps), "rows": rows, "ok": ok}), args.output)
    else:
        lines = [f"steps {rep.steps[0]} -> {rep.steps[1]}"]
        for r in rep.rows:
            lines.append(f"  {r.label:7s} t={r.t:.4f}  err={r.abs_error:.3e}  order={r.order:.3f}")
        lines.append("ok" if ok else "FAIL: order outside [1.7, 2.3]")
        _emit(("\n".join(lines) + "\n").encode(), args.output)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "iterate": _cmd_iterate,
    "certify": _cmd_certify,
    "verify": _cmd_verify,
    "adjudicate": _cmd_adjudicate,
    "numeric": _cmd_numeric,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        params = parse_params(args.params)
        limit = _term_limit(args.term_limit)
        return COMMANDS[args.command](args, params, limit)
    except UsageError as exc:
        print(f"anchortype: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitExceeded as exc:
        print(f"anchortype: aborted: {exc} (partial trace depth {exc.trace.depth})", file=sys.stderr)
        return EXIT_RESOURCE


def main() -> None:
    sys.exit(run())


def load_report(data: bytes | str) -> ReportDocument:
    return ReportDocument.from_dict(json.loads(data))
