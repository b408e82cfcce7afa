"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import json
import math
import time
from pathlib import Path

import pytest

from anchortype.cli import run
from anchortype.exactnum import R, ParamRational
from anchortype.finitetype import (
    annihilator_search,
    certify,
    iterate_rank,
    lambda_paper,
    lambda_report,
    leading_coefficient,
    leading_template,
)
from anchortype.numeric import (
    DOCUMENTED_POINTS,
    EvalPoint,
    INCONCLUSIVE,
    adjudicate,
    as_function,
    evaluate,
    fd_laplacian_richardson,
    fd_report,
)
from anchortype.report import published_eq13, published_eq14, published_eq14_known
from anchortype.surface import (
    apply_op,
    build_anchor_ring,
    check_laplace_gauss,
    check_laplace_position,
    diagnostic_operator,
    laplace_gauss_rhs,
    perturbed,
)
from anchortype.trigring import ONE, SIN, PhiHarmonic

GOLDEN = Path(__file__).parent / "golden" / "certify_m4.json"
# sympy value of the second iterate of n3 at t = pi/4, a = 2, r = 1
D2N3_PI4 = -1.56975628825421


def _verdict(capsys, n: int, name: str, ok: bool, detail: str = "") -> None:
    with capsys.disabled():
        print(f"\ncriterion {n:2d} {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"criterion {n} failed {detail}"


def test_c01_first_iterate(capsys, ctx):
    t0 = time.perf_counter()
    got = apply_op(ctx.laplacian, ctx.gauss[2])
    ok = got.f0 == published_eq13() and got.fc.is_zero() and got.fs.is_zero()
    dt = time.perf_counter() - t0
    _verdict(capsys, 1, "first iterate exact", ok and dt < 1, f"({dt:.3f}s)")


def test_c02_position_identity(capsys, ctx):
    t0 = time.perf_counter()
    ok = check_laplace_position(ctx) and not check_laplace_position(perturbed(ctx, dH=1))
    dt = time.perf_counter() - t0
    _verdict(capsys, 2, "position identity + H control", ok and dt < 1, f"({dt:.3f}s)")


def test_c03_gauss_identity(capsys, ctx):
    t0 = time.perf_counter()
    rhs3 = laplace_gauss_rhs(ctx)[2]
    ok = check_laplace_gauss(ctx) and rhs3.f0 == published_eq13() and rhs3.fc.is_zero()
    dt = time.perf_counter() - t0
    _verdict(capsys, 3, "Gauss-map identity", ok and dt < 1, f"({dt:.3f}s)")


def test_c04_second_iterate_adjudication(capsys, n3_trace):
    v1, v2 = n3_trace[1].value.f0, n3_trace[2].value.f0
    # the four printed lower terms leave exactly one multiple of the leading template
    residual = v2 - published_eq14_known()
    lam = leading_coefficient(residual, 2).value
    four_terms = lam is not None and residual == leading_template(2).scale(lam)
    cands = [("paper", published_eq14()), ("engine", v2)]
    winner = adjudicate(v1, cands, DOCUMENTED_POINTS, tol=1e-5)
    p = EvalPoint(math.pi / 4)
    oracle = fd_laplacian_richardson(as_function(v1, p.a, p.r), p, 1e-3)
    chosen = dict(cands).get(winner)
    ok = (
        four_terms
        and winner != INCONCLUSIVE
        and chosen is not None
        and abs(evaluate(chosen, p) - oracle) < 1e-5
        and abs(evaluate(chosen, p) - D2N3_PI4) < 1e-5
    )
    _verdict(capsys, 4, "second iterate adjudication", ok, f"(winner={winner})")


def test_c05_certificate_m8(capsys, ctx):
    t0 = time.perf_counter()
    cert, _ = certify(ctx.laplacian, ctx.gauss[2], 8, label="n3")
    dt = time.perf_counter() - t0
    ok = (
        cert.poles == [2 * m - 1 for m in range(1, 9)]
        and all(o.shape_ok and o.lambda_engine for o in cert.orders)
        and all(isinstance(o.lambda_engine, type(lambda_paper(1))) for o in cert.orders)
        and cert.searched == list(range(1, 9))
        and str(cert.verdict) == "NoRelationUpTo(8)"
        and dt < 300
    )
    _verdict(capsys, 5, "certificate M=8", ok, f"({dt:.1f}s)")


def test_c06_rank(capsys, n3_trace):
    t0 = time.perf_counter()
    rank = iterate_rank(n3_trace.values())
    dt = time.perf_counter() - t0
    ok = len(n3_trace) == 9 and rank == 9 and dt < 60
    _verdict(capsys, 6, "iterate rank", ok, f"(rank={rank}, {dt:.1f}s)")


def test_c07_lambda_table(capsys, n3_trace):
    rows = lambda_report(n3_trace, 6)
    printed_ok = [r.paper_value for r in rows[:3]] == [-1, -3, -45]
    ok = len(rows) == 6 and printed_ok and all(r.engine_value for r in rows)
    table = ", ".join(f"k={r.k}:{r.paper_value}/{r.engine_value}" for r in rows)
    _verdict(capsys, 7, "lambda table", ok, f"({table})")


def test_c08_positive_controls(capsys, ctx):
    cert, _ = certify(diagnostic_operator(), PhiHarmonic(f0=SIN), 2, label="sin")
    diag_ok = (
        cert.verdict.kind == "RelationFound"
        and cert.verdict.order == 1
        and cert.verdict.coefficients == [ParamRational(-1, R * R)]
    )
    cert0, trace0 = certify(ctx.laplacian, PhiHarmonic(f0=ONE), 2, label="const")
    null_ok = (
        cert0.verdict.kind == "RelationFound"
        and cert0.verdict.order == 1
        and all(c.is_zero() for c in cert0.verdict.coefficients)
        and annihilator_search(trace0, 1) is not None
    )
    _verdict(capsys, 8, "positive controls", diag_ok and null_ok)


def test_c09_fd_convergence(capsys, n3_trace):
    v = n3_trace.values()
    rep = fd_report([("L n3", v[0], v[1]), ("L^2 n3", v[1], v[2])], DOCUMENTED_POINTS, (1e-2, 5e-3))
    orders = rep.orders()
    ok = len(orders) == 10 and all(1.7 <= o <= 2.3 for o in orders)
    _verdict(capsys, 9, "FD convergence", ok, f"(orders {min(orders):.3f}..{max(orders):.3f})")


def test_c10_determinism(capsys, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert run(["certify", "--max-order", "4", "--format", "json", "--output", str(path)]) == 0
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] == GOLDEN.read_bytes()
    ok = ok and json.loads(outs[0])["certificate"]["verdict"] == "NoRelationUpTo(4)"
    _verdict(capsys, 10, "determinism + golden", ok)
