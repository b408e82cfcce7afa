from fractions import Fraction

import pytest
from hypothesis import strategies as st

from anchortype.exactnum import ParamPoly, ParamRational, R
from anchortype.finitetype import iterate
from anchortype.surface import build_anchor_ring
from anchortype.trigring import TrigNum, TrigPoly

small_frac = st.fractions(min_value=-5, max_value=5, max_denominator=4)

param_poly = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2)), small_frac, max_size=4
).map(ParamPoly)

nonzero_param_poly = param_poly.filter(lambda p: not p.is_zero())

# coefficients with r-power denominators, the shape every engine iterate has
coeff = st.builds(
    lambda p, k: ParamRational(p, R**k), param_poly, st.integers(0, 2)
)

trig_poly = st.builds(
    lambda terms, pole: TrigPoly(TrigNum(terms), pole),
    st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 3)), coeff, max_size=4),
    st.integers(0, 3),
)


@pytest.fixture(scope="session")
def ctx():
    return build_anchor_ring()


@pytest.fixture(scope="session")
def n3_trace(ctx):
    return iterate(ctx.laplacian, ctx.gauss[2], 8, label="n3")


def F(*args):
    return Fraction(*args)
