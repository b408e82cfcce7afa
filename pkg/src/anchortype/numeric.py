"""Floating-point evaluation and a finite-difference Laplacian oracle.

The oracle never touches the symbolic derivative code: it samples a black-box
function of (t, phi) on a stencil and combines central differences with the
operator's coefficients evaluated at the point.  That makes it a usable
referee when a symbolic result and a printed formula disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .trigring import PhiHarmonic, TrigPoly

INCONCLUSIVE = "inconclusive"
DEFAULT_STEP = 1e-3
DEFAULT_TOLERANCE = 1e-5


class InadmissiblePoint(ValueError):
    pass


@dataclass(frozen=True)
class EvalPoint:
    t: float
    phi: float = 0.0
    a: float = 2.0
    r: float = 1.0

    def __post_init__(self):
        if not (self.a > self.r > 0):
            raise InadmissiblePoint(f"need a > r > 0, got a={self.a}, r={self.r}")

    def at(self, t: float | None = None, phi: float | None = None) -> "EvalPoint":
        return EvalPoint(
            self.t if t is None else t, self.phi if phi is None else phi, self.a, self.r
        )


DOCUMENTED_POINTS = tuple(
    EvalPoint(t) for t in (math.pi / 5, math.pi / 4, 2 * math.pi / 5, 3 * math.pi / 5, 7 * math.pi / 10)
)


def _eval_trig(f: TrigPoly, p: EvalPoint) -> float:
    s, c = math.sin(p.t), math.cos(p.t)
    g = p.a + p.r * c
    total = 0.0
    for (si, ci), coeff in f.num.sorted_terms():
        total += coeff.evaluate_float(p.a, p.r) * s**si * c**ci
    return total / g**f.pole


def evaluate(f: TrigPoly | PhiHarmonic, p: EvalPoint) -> float:
    """Numeric value of a canonical expression at ``p``."""
    if not isinstance(p, EvalPoint):
        raise InadmissiblePoint("evaluation needs an EvalPoint")
    if isinstance(f, TrigPoly):
        return _eval_trig(f, p)
    return (
        _eval_trig(f.f0, p)
        + _eval_trig(f.fc, p) * math.cos(p.phi)
        + _eval_trig(f.fs, p) * math.sin(p.phi)
    )


def as_function(f: TrigPoly | PhiHarmonic, a: float, r: float) -> Callable[[float, float], float]:
    """Black-box ``(t, phi) -> value`` for the oracle."""
    return lambda t, phi: evaluate(f, EvalPoint(t, phi, a, r))


def fd_laplacian(fn: Callable[[float, float], float], p: EvalPoint, h: float) -> float:
    """Central-difference Beltrami Laplacian of ``fn`` at ``p``."""
    if h <= 0:
        raise ValueError("step must be positive")
    t, phi = p.t, p.phi
    f0 = fn(t, phi)
    ftt = (fn(t + h, phi) - 2 * f0 + fn(t - h, phi)) / (h * h)
    ft = (fn(t + h, phi) - fn(t - h, phi)) / (2 * h)
    fpp = (fn(t, phi + h) - 2 * f0 + fn(t, phi - h)) / (h * h)
    g = p.a + p.r * math.cos(t)
    return -fpp / g**2 + math.sin(t) / (p.r * g) * ft - ftt / p.r**2


def fd_laplacian_richardson(fn, p: EvalPoint, h: float) -> float:
    """One Richardson step on (h, h/2); removes the h^2 error term."""
    return (4 * fd_laplacian(fn, p, h / 2) - fd_laplacian(fn, p, h)) / 3


def deviations(
    exact: TrigPoly | PhiHarmonic,
    candidates: Sequence[tuple[str, TrigPoly | PhiHarmonic]],
    points: Sequence[EvalPoint],
    h: float = DEFAULT_STEP,
) -> dict[str, float]:
    """Max |candidate - FD Laplacian of ``exact``| over ``points``, per label."""
    oracle = []
    for p in points:
        fn = as_function(exact, p.a, p.r)
        oracle.append(fd_laplacian_richardson(fn, p, h))
    out = {}
    for label, cand in candidates:
        out[label] = max(abs(evaluate(cand, p) - o) for p, o in zip(points, oracle))
    return out


def adjudicate(
    exact: TrigPoly | PhiHarmonic,
    candidates: Sequence[tuple[str, TrigPoly | PhiHarmonic]],
    points: Sequence[EvalPoint] = DOCUMENTED_POINTS,
    h: float = DEFAULT_STEP,
    tol: float = DEFAULT_TOLERANCE,
) -> str:
    """Label of the candidate for ``L(exact)`` closest to the FD oracle.

    ``exact`` is the trusted argument of the Laplacian; each candidate is a
    claimed value of its Laplacian.  Ties go to the earliest candidate.
    Returns ``"inconclusive"`` when even the best deviation exceeds ``tol``.
    """
    if len(points) < 5:
        raise ValueError("adjudication needs at least five points")
    devs = deviations(exact, candidates, points, h)
    best_label, best = None, math.inf
    for label, _ in candidates:
        if devs[label] < best:
            best_label, best = label, devs[label]
    if best_label is None or best > tol:
        return INCONCLUSIVE
    return best_label


def convergence_order(
    fn: Callable[[float, float], float],
    exact_value: float,
    p: EvalPoint,
    steps: tuple[float, float] = (1e-2, 5e-3),
) -> float:
    """Observed order log2(err(h1)/err(h2)); ``inf`` when err(h2) is zero."""
    h1, h2 = steps
    e1 = abs(fd_laplacian(fn, p, h1) - exact_value)
    e2 = abs(fd_laplacian(fn, p, h2) - exact_value)
    if not (math.isfinite(e1) and math.isfinite(e2)):
        raise ValueError("non-finite stencil evaluation")
    if e2 == 0:
        return math.inf
    return math.log(e1 / e2, h1 / h2)


@dataclass
class FDRow:
    label: str
    t: float
    symbolic: float
    oracle: float
    abs_error: float
    order: float


@dataclass
class FDReport:
    steps: tuple[float, float]
    rows: list[FDRow] = field(default_factory=list)

    def orders(self) -> list[float]:
        return [row.order for row in self.rows]


def fd_report(
    pairs: Sequence[tuple[str, TrigPoly | PhiHarmonic, TrigPoly | PhiHarmonic]],
    points: Sequence[EvalPoint] = DOCUMENTED_POINTS,
    steps: tuple[float, float] = (1e-2, 5e-3),
) -> FDReport:
    """For each ``(label, f, Lf)`` compare the stencil on f with the exact Lf."""
    report = FDReport(steps=tuple(steps))
    for label, f, Lf in pairs:
        for p in points:
            fn = as_function(f, p.a, p.r)
            exact = evaluate(Lf, p)
            oracle = fd_laplacian(fn, p, steps[1])
            report.rows.append(
                FDRow(
                    label=label,
                    t=p.t,
                    symbolic=exact,
                    oracle=oracle,
                    abs_error=abs(oracle - exact),
                    order=convergence_order(fn, exact, p, steps),
                )
            )
    return report
