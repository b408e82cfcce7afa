from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anchortype.exactnum import (
    A,
    R,
    ParamMatrix,
    ParamPoly,
    ParamRational,
    bareiss_rank,
    solve_linear,
)

from conftest import nonzero_param_poly, param_poly


def test_rational_family():
    assert Fraction(1, 2) + Fraction(1, 3) == Fraction(5, 6)
    assert 1 / Fraction(-3, 4) == Fraction(-4, 3)
    with pytest.raises(ZeroDivisionError):
        1 / Fraction(0)


@given(st.fractions())
def test_rational_identity(x):
    assert 0 + x == x


def test_ppoly_examples():
    assert (A + R) * (A - R) == A * A - R * R
    assert (A * A - R * R).exact_divide(A + R) == A - R
    assert (A * A - R * R).evaluate_at(2, 1) == 3


def test_exact_divide_reports_non_divisible():
    assert (A * A + R * R).exact_divide(A + R) is None
    assert (A + 1).exact_divide(R) is None
    with pytest.raises(ZeroDivisionError):
        A.exact_divide(ParamPoly())


def test_no_zero_terms_and_order():
    p = (A + R) - A
    assert p.terms == {(0, 1): 1}
    q = A * A + A * R + R * R + 1
    assert [k for k, _ in q.sorted_terms()] == [(2, 0), (1, 1), (0, 2), (0, 0)]


@given(param_poly, param_poly, param_poly)
def test_ring_axioms(p, q, s):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + s == p + (q + s)
    assert (p * q) * s == p * (q * s)
    assert p * (q + s) == p * q + p * s
    assert (p + (-p)).is_zero()


@given(param_poly, nonzero_param_poly)
def test_exact_divide_roundtrip(p, q):
    assert (p * q).exact_divide(q) == p


def test_param_rational_reduction():
    x = ParamRational(A * R * R, R**3)
    assert x.num == A and x.den == R
    y = ParamRational(Fraction(1, 2) * A, Fraction(3) * R)
    assert y.den == R and y.num == A.scale(Fraction(1, 6))
    z = ParamRational(A, -R)
    assert z.den == R and z.num == -A
    # exact cancellation of a non-monomial denominator
    w = ParamRational(A * A - R * R, A - R)
    assert w.den == ParamPoly.const(1) and w.num == A + R


def test_param_rational_field_ops():
    x = ParamRational(A, R)
    assert x * x.inv() == 1
    assert x - x == 0
    assert ParamRational(1, A + R) + ParamRational(1, A - R) == ParamRational(2 * A, A * A - R * R)
    assert (x**2).constant_value() is None
    assert ParamRational(2 * A + 2 * R, A + R).constant_value() == 2
    with pytest.raises(ZeroDivisionError):
        ParamRational(0).inv()


def test_rank_examples():
    assert bareiss_rank(ParamMatrix([[1, 0], [0, 1]])) == 2
    assert bareiss_rank(ParamMatrix([[A, R], [A, R]])) == 1
    assert bareiss_rank(ParamMatrix([[A, R], [R, A]])) == 2
    assert bareiss_rank(ParamMatrix([])) == 0


def test_rank_sees_generic_determinant_only():
    # a^2 - r^2 vanishes only at a = r: symbolic rank 2, instantiated rank 1
    M = ParamMatrix([[A, R], [R, A]])
    assert bareiss_rank(M) == 2
    assert bareiss_rank(M.evaluate_at(1, 1)) == 1


def _naive_rank(rows):
    m = [[Fraction(x) for x in row] for row in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c] / m[rank][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


matrix_entries = st.lists(
    st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=5
)


@given(matrix_entries)
def test_bareiss_matches_naive_elimination_on_rationals(rows):
    assert bareiss_rank(ParamMatrix(rows)) == _naive_rank(rows)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(param_poly, min_size=3, max_size=3), min_size=2, max_size=3),
    nonzero_param_poly,
    st.data(),
)
def test_rank_invariant_under_swaps_and_scaling(rows, scale, data):
    M = ParamMatrix(rows)
    base = bareiss_rank(M)
    perm = data.draw(st.permutations(range(len(rows))))
    assert bareiss_rank(ParamMatrix([rows[i] for i in perm])) == base
    k = data.draw(st.integers(0, len(rows) - 1))
    scaled = [list(r) for r in rows]
    scaled[k] = [x * scale for x in scaled[k]]
    assert bareiss_rank(ParamMatrix(scaled)) == base


def test_solve_examples():
    b = [ParamRational(A, R), ParamRational(3)]
    assert solve_linear(ParamMatrix([[1, 0], [0, 1]]), b) == b
    assert solve_linear(ParamMatrix([[1], [1]]), [1, 2]) is None
    assert solve_linear(ParamMatrix([[1, 1], [0, 1]]), [3, 2]) == [1, 2]


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(param_poly, min_size=2, max_size=2), min_size=2, max_size=3),
    st.lists(param_poly, min_size=3, max_size=3),
)
def test_solution_substitutes_back(rows, rhs):
    M = ParamMatrix(rows)
    b = rhs[: len(rows)]
    x = solve_linear(M, b)
    if x is None:
        # inconsistent means the augmented matrix has larger rank
        aug = ParamMatrix([list(r) + [bi] for r, bi in zip(rows, b)])
        assert bareiss_rank(aug) > bareiss_rank(M)
        return
    for row, bi in zip(M.rows, b):
        total = ParamRational()
        for mij, xj in zip(row, x):
            total = total + mij * xj
        assert total == bi
