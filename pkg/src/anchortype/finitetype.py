"""Iterated Laplacians, leading-term certificates and annihilator search.

A target f is of finite type when some monic polynomial in the Laplacian
kills it: ``L^m f + c_1 L^(m-1) f + ... + c_m f = 0``.  For the Gauss map of
the anchor ring the pole order in g = a + r cos t grows by two with every
application while the leading residue stays nonzero, which rules out any
such relation; this module computes that evidence exactly up to a bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactnum import R, ParamMatrix, ParamRational, bareiss_rank, format_rational, solve_linear
from .surface import DiffOp, apply_op
from .trigring import SIN, PhiHarmonic, TrigPoly, residue, residue_ratio, trig

DEFAULT_MAX_ORDER = 8
DEFAULT_TERM_LIMIT = 200_000


class ResourceLimitExceeded(RuntimeError):
    """An iterate grew past the term ceiling; ``trace`` holds what was computed."""

    def __init__(self, message: str, trace: "IterationTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass
class TraceEntry:
    order: int
    value: PhiHarmonic
    pole: int
    leading: Fraction | None = None


@dataclass
class IterationTrace:
    label: str
    entries: list[TraceEntry] = field(default_factory=list)

    def __getitem__(self, k: int) -> TraceEntry:
        return self.entries[k]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def depth(self) -> int:
        return len(self.entries) - 1

    def values(self) -> list[PhiHarmonic]:
        return [e.value for e in self.entries]

    def poles(self) -> list[int]:
        return [e.pole for e in self.entries]


def iterate(
    L: DiffOp,
    f: PhiHarmonic,
    M: int,
    label: str = "f",
    term_limit: int = DEFAULT_TERM_LIMIT,
) -> IterationTrace:
    """Exact ``L^k f`` for k = 0..M."""
    if M < 1:
        raise ValueError("M must be at least 1")
    trace = IterationTrace(label, [TraceEntry(0, f, f.pole())])
    cur = f
    for k in range(1, M + 1):
        cur = apply_op(L, cur)
        size = cur.term_count()
        if size > term_limit:
            raise ResourceLimitExceeded(
                f"order {k} iterate of {label} has {size} monomials (ceiling {term_limit})",
                trace,
            )
        trace.entries.append(TraceEntry(k, cur, cur.pole()))
    return trace


# -- leading coefficients ------------------------------------------------------


def leading_template(k: int) -> TrigPoly:
    """``sin^(2k-1) t cos t / (r g^(2k-1))``."""
    return trig(ParamRational(1, R), 2 * k - 1, 1, 2 * k - 1)


@dataclass
class LambdaExtraction:
    value: Fraction | None
    shape_ok: bool
    residue: tuple[ParamRational, ParamRational] | None = None


def extract_lambda(trace: IterationTrace, k: int) -> LambdaExtraction:
    """The rational lambda with pole(L^k f - lambda * template_k) <= 2k - 2.

    Works on the phi-free channel.  The candidate comes from the residue at
    cos t = -a/r; it is accepted only if it is a plain rational and the
    subtraction really lowers the pole.
    """
    if k < 1 or k > trace.depth:
        raise ValueError(f"order {k} not in trace")
    return leading_coefficient(trace[k].value.f0, k)


def leading_coefficient(f: TrigPoly, k: int) -> LambdaExtraction:
    target = 2 * k - 1
    if f.pole < target:
        return LambdaExtraction(Fraction(0), True)
    res = residue(f)
    if f.pole > target:
        return LambdaExtraction(None, False, res)
    tmpl = leading_template(k)
    u, v = residue_ratio(res, residue(tmpl))
    lam = u.constant_value()
    if not v.is_zero() or lam is None:
        return LambdaExtraction(None, False, res)
    if (f - tmpl.scale(lam)).pole > target - 1:
        return LambdaExtraction(None, False, res)
    return LambdaExtraction(lam, True)


def lambda_paper(k: int) -> Fraction:
    """Closed-form product prod_{j=1..k} (2j-1)(2j-3) as printed in the source."""
    if k < 1:
        raise ValueError("k must be at least 1")
    out = Fraction(1)
    for j in range(1, k + 1):
        out *= (2 * j - 1) * (2 * j - 3)
    return out


@dataclass
class StepReport:
    k: int
    actual_pole: int
    multiplier: Fraction | None
    paper_pole: int
    derived_pole: int
    derived_multiplier: Fraction

    @property
    def paper_pole_ok(self) -> bool:
        return self.actual_pole == self.paper_pole

    @property
    def derived_ok(self) -> bool:
        return self.actual_pole == self.derived_pole and self.multiplier == self.derived_multiplier


def step_leading_check(k: int, L: DiffOp | None = None) -> StepReport:
    """Apply L to ``sin^k cos / (r g^k)`` and measure the new leading term.

    The multiplier is the residue of the output divided by the residue of
    ``sin^2`` times the input, so an output of the form
    ``mu * sin^(k+2) cos / (r g^(k+2)) + (lower poles)`` reports ``mu``.
    """
    if L is None:
        from .surface import anchor_laplacian

        L = anchor_laplacian()
    u = trig(ParamRational(1, R), k, 1, k)
    out = L.apply(u)
    mult = None
    if out.pole == u.pole + 2:
        mu, mv = residue_ratio(residue(out), residue(SIN * SIN * u))
        if mv.is_zero():
            mult = mu.constant_value()
    return StepReport(
        k=k,
        actual_pole=out.pole,
        multiplier=mult,
        paper_pole=2 * k - 1,
        derived_pole=k + 2,
        derived_multiplier=Fraction(-k * k),
    )


# -- linear dependence ---------------------------------------------------------


def coefficient_vectors(values: Sequence[PhiHarmonic]) -> tuple[list, list[list[ParamRational]]]:
    """Numerator coefficients of each value over a shared g-denominator.

    Returns the sorted monomial keys ``(channel, sin_deg, cos_deg)`` and one
    coefficient list per value.
    """
    P = max((v.pole() for v in values), default=0)
    maps = []
    keys: set[tuple[int, int, int]] = set()
    for v in values:
        m = {}
        for idx, ch in enumerate(v.channels()):
            if ch.is_zero():
                continue
            num = ch.num.times_gamma(P - ch.pole)
            for (s, c), coeff in num.terms.items():
                m[(idx, s, c)] = coeff
        keys.update(m)
        maps.append(m)
    ordered = sorted(keys)
    zero = ParamRational()
    return ordered, [[m.get(k, zero) for k in ordered] for m in maps]


def _instantiate(M: ParamMatrix, params) -> ParamMatrix:
    return M if params is None else M.evaluate_at(*params)


def iterate_rank(values: Sequence[PhiHarmonic], params=None) -> int:
    """Rank of the iterates' coefficient matrix (rows = iterates)."""
    _, vecs = coefficient_vectors(values)
    return bareiss_rank(_instantiate(ParamMatrix(vecs), params))


def annihilator_search(trace: IterationTrace, m: int, params=None) -> list[ParamRational] | None:
    """Coefficients (c_1..c_m) with sum_i c_i L^(m-i) f = -L^m f, or ``None``.

    ``params=(a0, r0)`` instantiates the parameters first; by default the
    search runs over the field Q(a, r).
    """
    if m < 1 or m > trace.depth:
        raise ValueError(f"degree {m} needs trace depth >= {m}")
    values = trace.values()[: m + 1]
    _, vecs = coefficient_vectors(values)
    # columns: L^(m-1) f, ..., f  (unknowns c_1, ..., c_m)
    cols = [vecs[m - i] for i in range(1, m + 1)]
    rows = [list(r) for r in zip(*cols)]
    rhs = [-x for x in vecs[m]]
    if not rows:
        return [ParamRational() for _ in range(m)]
    M = _instantiate(ParamMatrix(rows), params)
    if params is not None:
        rhs = [ParamRational(Fraction(x.evaluate_at(*params))) for x in rhs]
    return solve_linear(M, rhs)


def sigma_from_eigenvalues(eigs: Sequence) -> list:
    """Coefficients sigma_1..sigma_k of prod (x - lambda_i), leading 1 omitted."""
    coeffs = [Fraction(1)] if not eigs or not isinstance(eigs[0], ParamRational) else [ParamRational(1)]
    for lam in eigs:
        nxt = list(coeffs) + [coeffs[0] * 0]
        for i in range(1, len(nxt)):
            nxt[i] = nxt[i] - lam * coeffs[i - 1]
        coeffs = nxt
    return coeffs[1:]


# -- certificate -----------------------------------------------------------------


@dataclass
class OrderRecord:
    order: int
    pole: int
    lambda_engine: Fraction | None
    shape_ok: bool


@dataclass
class Verdict:
    kind: str  # "NoRelationUpTo" | "RelationFound" | "Inconclusive"
    order: int
    coefficients: list[ParamRational] | None = None

    def __str__(self) -> str:
        if self.kind == "RelationFound":
            body = ", ".join(format_rational(c) for c in self.coefficients or [])
            return f"RelationFound({body})"
        return f"{self.kind}({self.order})"


@dataclass
class Certificate:
    target: str
    max_order: int
    params: tuple[Fraction, Fraction] | None
    orders: list[OrderRecord]
    searched: list[int]
    verdict: Verdict

    @property
    def poles(self) -> list[int]:
        return [o.pole for o in self.orders]


def certify(
    L: DiffOp,
    f: PhiHarmonic,
    M: int = DEFAULT_MAX_ORDER,
    label: str = "f",
    term_limit: int = DEFAULT_TERM_LIMIT,
    params=None,
) -> tuple[Certificate, IterationTrace]:
    """Bounded-order infinite-type certificate for ``f`` under ``L``.

    NoRelationUpTo(M) needs poles exactly 1, 3, ..., 2M-1, a nonzero plain
    rational leading coefficient at every order and no annihilator of degree
    <= M.  A found annihilator gives RelationFound at the smallest degree;
    anything else is Inconclusive.
    """
    trace = iterate(L, f, M, label=label, term_limit=term_limit)
    orders = []
    for k in range(1, M + 1):
        ext = extract_lambda(trace, k)
        trace[k].leading = ext.value
        orders.append(OrderRecord(k, trace[k].pole, ext.value, ext.shape_ok))
    searched = []
    relation = None
    for m in range(1, M + 1):
        searched.append(m)
        coeffs = annihilator_search(trace, m, params=params)
        if coeffs is not None:
            relation = Verdict("RelationFound", m, coeffs)
            break
    if relation is not None:
        verdict = relation
    elif all(
        o.pole == 2 * o.order - 1 and o.shape_ok and o.lambda_engine for o in orders
    ):
        verdict = Verdict("NoRelationUpTo", M)
    else:
        verdict = Verdict("Inconclusive", M)
    cert = Certificate(
        target=label,
        max_order=M,
        params=tuple(params) if params is not None else None,
        orders=orders,
        searched=searched,
        verdict=verdict,
    )
    return cert, trace


@dataclass
class LambdaRow:
    k: int
    paper_value: Fraction
    engine_value: Fraction | None

    @property
    def agree(self) -> bool:
        return self.engine_value == self.paper_value


def lambda_report(trace: IterationTrace, kmax: int) -> list[LambdaRow]:
    rows = []
    for k in range(1, kmax + 1):
        ext = extract_lambda(trace, k)
        rows.append(LambdaRow(k, lambda_paper(k), ext.value))
    return rows
