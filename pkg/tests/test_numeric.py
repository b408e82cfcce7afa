import math
import random

import pytest

from anchortype.exactnum import ParamRational, R
from anchortype.numeric import (
    DOCUMENTED_POINTS,
    INCONCLUSIVE,
    EvalPoint,
    InadmissiblePoint,
    adjudicate,
    as_function,
    convergence_order,
    evaluate,
    fd_laplacian,
    fd_report,
)
from anchortype.report import published_eq13, published_eq14
from anchortype.trigring import GAMMA, SIN, PhiHarmonic, TrigPoly

# exact value of the second iterate at t = pi/4, a = 2, r = 1, computed
# independently with sympy from the raw operator
D2N3_PI4 = -1.56975628825421


def test_eval_examples():
    assert evaluate(GAMMA, EvalPoint(0.0)) == 3.0
    assert evaluate(published_eq13(), EvalPoint(math.pi / 2)) == pytest.approx(-1.0, abs=1e-15)
    for t in (0.1, 1.0, 2.5, 5.0):
        assert evaluate(-SIN, EvalPoint(t)) == -math.sin(t)


def test_eval_phi_channels():
    f = PhiHarmonic(TrigPoly.const(1), SIN, GAMMA)
    p = EvalPoint(0.7, 1.1, 3.0, 0.5)
    expect = 1 + math.sin(0.7) * math.cos(1.1) + (3 + 0.5 * math.cos(0.7)) * math.sin(1.1)
    assert evaluate(f, p) == pytest.approx(expect, rel=1e-14)


def test_inadmissible_points():
    with pytest.raises(InadmissiblePoint):
        EvalPoint(0.0, 0.0, 1.0, 2.0)
    with pytest.raises(InadmissiblePoint):
        EvalPoint(0.0, 0.0, 1.0, 0.0)
    with pytest.raises(InadmissiblePoint):
        evaluate(SIN, (0.0, 0.0, 2.0, 1.0))


def test_eval_exact_on_integer_inputs():
    f = TrigPoly.const(7) + SIN.scale(3)
    p = EvalPoint(math.pi / 2)
    assert abs(evaluate(f, p) - 10.0) <= 1e-12 * 10


def test_fd_constant_and_eq13():
    p = EvalPoint(math.pi / 4)
    assert abs(fd_laplacian(lambda t, phi: 4.2, p, 1e-3)) < 1e-12
    fd = fd_laplacian(as_function(-SIN, 2.0, 1.0), p, 1e-3)
    assert abs(fd - evaluate(published_eq13(), p)) < 1e-6


def test_fd_second_iterate(n3_trace):
    p = EvalPoint(math.pi / 4)
    fd = fd_laplacian(as_function(n3_trace[1].value, 2.0, 1.0), p, 1e-3)
    assert abs(fd - D2N3_PI4) < 1e-5
    assert evaluate(n3_trace[2].value, p) == pytest.approx(D2N3_PI4, abs=1e-12)


def test_adjudicate_second_iterate(n3_trace):
    engine = n3_trace[2].value.f0
    cands = [("engine", engine), ("printed", published_eq14())]
    assert adjudicate(n3_trace[1].value.f0, cands) == "engine"
    assert adjudicate(n3_trace[1].value.f0, cands[::-1]) == "engine"


def test_adjudicate_first_iterate_and_sign_flip():
    eq13 = published_eq13()
    cands = [("eq13", eq13), ("flipped", -eq13)]
    assert adjudicate(-SIN, cands) == "eq13"


def test_adjudicate_tie_and_inconclusive():
    eq13 = published_eq13()
    assert adjudicate(-SIN, [("first", eq13), ("second", eq13)]) == "first"
    assert adjudicate(-SIN, [("wrong", eq13 * 2)]) == INCONCLUSIVE
    with pytest.raises(ValueError):
        adjudicate(-SIN, [("x", eq13)], DOCUMENTED_POINTS[:3])


def test_convergence_order_examples():
    p = EvalPoint(math.pi / 5)
    eq13 = evaluate(published_eq13(), p)
    order = convergence_order(as_function(-SIN, 2.0, 1.0), eq13, p, (1e-2, 5e-3))
    assert 1.7 <= order <= 2.3
    # linear in t: sin t/(r g) * 1 is reproduced by the stencil to rounding
    p = EvalPoint(1.0)
    exact = math.sin(1.0) / (p.r * (p.a + p.r * math.cos(1.0)))
    lin = convergence_order(lambda t, phi: t, exact, p, (1e-2, 5e-3))
    assert lin == math.inf or abs(fd_laplacian(lambda t, phi: t, p, 5e-3) - exact) < 1e-10


def test_convergence_on_random_points(n3_trace):
    rng = random.Random(11)
    values = n3_trace.values()
    for k in (1, 2, 3):
        for _ in range(20):
            r0 = rng.uniform(0.3, 1.0)
            p = EvalPoint(rng.uniform(0.2, 3.0), rng.uniform(0, 6.0), r0 + rng.uniform(0.5, 2.0), r0)
            fn = as_function(values[k - 1], p.a, p.r)
            exact = evaluate(values[k], p)
            h = 1e-2
            err = abs(fd_laplacian(fn, p, h) - exact)
            order = convergence_order(fn, exact, p, (h, h / 2))
            assert err < 1e4 * h * h  # loose constant; the order check is the sharp one
            assert 1.7 <= order <= 2.3, (k, p, order)


def test_adjudication_permutation_invariance(n3_trace):
    engine = n3_trace[2].value.f0
    cands = [("a", published_eq14()), ("b", engine), ("c", engine * 2)]
    winners = {adjudicate(n3_trace[1].value.f0, perm) for perm in (cands, cands[::-1], cands[1:] + cands[:1])}
    assert winners == {"b"}


def test_fd_report_rows(n3_trace):
    v = n3_trace.values()
    rep = fd_report([("L n3", v[0], v[1])])
    assert len(rep.rows) == len(DOCUMENTED_POINTS)
    assert all(math.isfinite(r.abs_error) for r in rep.rows)
    assert all(1.7 <= o <= 2.3 for o in rep.orders())
