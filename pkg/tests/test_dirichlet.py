import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primegeo.chamber import AlphaVector, GeodesicRecord
from primegeo.dirichlet import SeriesPoint, leading_term, partial_L, q_M_minimal_parabolic, rescaled_partial, term
from primegeo.errors import DimensionMismatch, DivergenceWarning, PoleHit


def rec(alpha, ind=1.0, mult=1):
    return GeodesicRecord((1.0, 0.0, -1.0), 1.0, AlphaVector(tuple(alpha), (3, 0), 3), ind, mult)


def test_single_term():
    assert partial_L([rec((1, 1), 0.5)], SeriesPoint((2, 2), 0)) == pytest.approx(0.5 * math.exp(-4))
    assert abs(partial_L([rec((1, 1), 0.5)], SeriesPoint((2, 2), 0)) - 0.0091578) < 1e-7


def test_empty_sum():
    assert partial_L([], SeriesPoint((2, 2), 1)) == 0


def test_divergence_refused():
    with pytest.raises(DivergenceWarning):
        partial_L([rec((1, 1))], SeriesPoint((1.0, 2.0)))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        term(rec((1, 1)), SeriesPoint((2,)))


def test_leading_term():
    assert leading_term(SeriesPoint((2, 2), 0), 1) == 1
    assert leading_term(SeriesPoint((3,), 1), 1) == pytest.approx(0.25)
    assert leading_term(SeriesPoint((3,), 1), 0) == 0
    with pytest.raises(PoleHit):
        leading_term(SeriesPoint((1, 2), 0), 1)


def test_q_M():
    for d in (3, 5):
        q, q0 = q_M_minimal_parabolic(d)
        assert q == q0 == 1 and q >= q0 > 0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0.01, 6), st.floats(0.01, 6), st.floats(0.01, 4)), min_size=1, max_size=30),
       st.floats(1.05, 4), st.integers(0, 3))
def test_j_shift_and_positivity(raw, s, j):
    recs = [rec((a, b), w) for a, b, w in raw]
    pt = SeriesPoint((s, s), j)
    base = partial_L(recs, pt)
    assert base.real > 0 and base.imag == 0
    shifted = partial_L(recs, SeriesPoint((s, s), j + 1))
    manual = sum(term(r, pt) * r.alpha.values[0] * r.alpha.values[1] for r in recs)
    assert shifted == pytest.approx(manual, rel=1e-12)
    more = partial_L(recs + [rec((1.0, 1.0))], pt)
    assert more.real > base.real


def test_rescaled_partial():
    recs = [rec((1, 2), 0.7)]
    pt = SeriesPoint((1.5, 1.5), 2)
    assert rescaled_partial(recs, pt) == pytest.approx(partial_L(recs, pt) * 0.5**4 * 0.5**4 / 36)
