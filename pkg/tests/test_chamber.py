import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import det_adjoint_oracle, naive_psi
from primegeo.chamber import (
    AlphaVector,
    BoxSpec,
    Convention,
    GeodesicRecord,
    alpha_coords,
    alpha_from_logs,
    constant_c,
    det_one_minus_ad_n,
    in_box,
    index_weight,
    psi,
)
from primegeo.errors import DimensionMismatch, WallDegeneracy
from primegeo.exactpoly import MonicIntPolynomial as P
from primegeo.exactpoly import isolate_roots

E = math.e


def test_alpha_totally_real():
    assert alpha_from_logs([], [1.0, 0.0, -1.0], (3, 0)) == pytest.approx((2.0, 2.0))


def test_alpha_mixed():
    t = 1.7
    assert alpha_from_logs([math.log(t)], [-2 * math.log(t)], (1, 1)) == pytest.approx((6 * math.log(t),))


def test_alpha_torsion_not_in_box():
    alpha = alpha_from_logs([], [0.0, 0.0, 0.0], (3, 0))
    assert alpha == (0.0, 0.0)
    assert not in_box(alpha, BoxSpec((1, 1), "linear"))


def test_alpha_degree_five_weights():
    # (1,2): weights 2*1*(5-2) = 6 and 2rs = 4
    assert alpha_from_logs([0.5, 0.2], [-1.4], (1, 2)) == pytest.approx((6 * 0.3, 4 * 1.6))


def test_in_box_examples():
    assert in_box((2, 2), BoxSpec((2, 2), "linear"))
    assert not in_box((0, 1), BoxSpec((5, 5), "linear"))
    assert in_box((2, 2), BoxSpec((E**2, E**2), "multiplicative"))
    with pytest.raises(DimensionMismatch):
        in_box((1.0,), BoxSpec((2, 2), "linear"))


def test_box_validation():
    with pytest.raises(ValueError):
        BoxSpec((0,), "linear")
    with pytest.raises(ValueError):
        BoxSpec((1,), "logarithmic")
    assert BoxSpec((1,), "LINEAR").convention is Convention.LINEAR


def test_det_examples():
    det = det_one_minus_ad_n([E, 1.0, 1 / E])
    assert det == pytest.approx((1 - 1 / E) ** 2 * (1 - E**-2), rel=1e-15)
    assert round(det, 5) == 0.34550  # the quoted 0.34546 is a rounding slip
    assert det_one_minus_ad_n([3.0]) == 1.0
    assert index_weight(1.0, [E, 1.0, 1 / E]) == pytest.approx(2.8944, abs=1e-4)


def test_det_wall():
    with pytest.raises(WallDegeneracy):
        det_one_minus_ad_n([2.0, -2.0, 0.25])


def test_index_weight_positive_volume():
    with pytest.raises(ValueError):
        index_weight(0.0, [E, 1.0, 1 / E])


@pytest.mark.parametrize("high", [(1, 0, -1, -1), (1, 0, -3, -1), (1, -5, 10, -1), (1, -1, 7, 1), (1, 3, -4, -1)])
def test_det_matches_companion_oracle(high):
    p = P.from_high(list(high))
    prof = isolate_roots(p)
    assert det_one_minus_ad_n(prof) == pytest.approx(det_adjoint_oracle(p), rel=1e-10)
    assert det_one_minus_ad_n(prof) == pytest.approx(det_one_minus_ad_n([complex(z) for z in prof.centers()]), rel=1e-12)


def test_det_x3_x_1_same_for_inverse():
    a = det_one_minus_ad_n(isolate_roots(P.from_high([1, 0, -1, -1])))
    b = det_one_minus_ad_n(isolate_roots(P.from_high([1, 1, 0, -1])))
    assert a == pytest.approx(2.43016, abs=1e-5) and b == pytest.approx(a, rel=1e-12)


def test_det_tends_to_one():
    dets = [det_one_minus_ad_n([math.exp(t), 1.0, math.exp(-t)]) for t in (1, 3, 6, 12, 20)]
    assert all(0 < x < 8 for x in dets)
    assert dets == sorted(dets) and dets[-1] == pytest.approx(1, abs=1e-8)


def test_inversion_laws():
    theta = alpha_coords(isolate_roots(P.from_high([1, 0, -1, -1]))).values
    inv = alpha_coords(isolate_roots(P.from_high([1, 0, -1, -1]).reciprocal())).values
    assert inv[0] == pytest.approx(-theta[0], abs=1e-15)
    p = P.from_high([1, -3, -4, -1])
    a = alpha_coords(isolate_roots(p)).values
    b = alpha_coords(isolate_roots(p.reciprocal())).values
    assert b == pytest.approx(a[::-1], abs=1e-14)


@pytest.mark.parametrize(
    "sig, d, c, target",
    [((3, 0), 3, 8.0, 8 / math.sqrt(3)), ((1, 1), 3, 2 * math.sqrt(2), 2.0), ((5, 0), 5, 2304.0, 2304 / math.sqrt(5))],
)
def test_constant_c(sig, d, c, target):
    got = constant_c(sig, d)
    assert got[0] == pytest.approx(c, rel=1e-15)
    assert got[1] == pytest.approx(target, rel=1e-15)


def test_constant_c_rejects_bad_input():
    with pytest.raises(ValueError):
        constant_c((2, 1), 4)
    with pytest.raises(DimensionMismatch):
        constant_c((1, 1), 5)


def _rec(alpha, vol, mult=1):
    return GeodesicRecord((1.0, 0.0, -1.0), vol, AlphaVector(tuple(alpha), (3, 0), 3), 1.0, mult)


def test_psi_examples():
    recs = [_rec((1, 1), 2), _rec((3, 1), 5)]
    assert psi(recs, BoxSpec((2, 2), "linear")) == 2
    assert psi([], BoxSpec((2, 2), "linear")) == 0


def test_psi_matches_naive_filter():
    rng = random.Random(11)
    recs = [_rec((rng.uniform(-0.5, 6), rng.uniform(-0.5, 6)), rng.uniform(0.1, 3), rng.choice([1, 3])) for _ in range(1000)]
    for _ in range(100):
        t = (rng.uniform(0.1, 6), rng.uniform(0.1, 6))
        for box in (BoxSpec(t, "linear"), BoxSpec(tuple(math.exp(v) for v in t), "multiplicative")):
            assert psi(recs, box) == naive_psi(recs, box)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 5), st.floats(0, 5), st.floats(0.01, 2)), max_size=40),
       st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0, 2))
def test_psi_monotone_and_conventions_agree(raw, t1, t2, grow):
    recs = [_rec((a, b), v) for a, b, v in raw]
    small = psi(recs, BoxSpec((t1, t2), "linear"))
    big = psi(recs, BoxSpec((t1 + grow, t2), "linear"))
    assert big >= small
    mult = psi(recs, BoxSpec((math.exp(t1), math.exp(t2)), "multiplicative"))
    # the two boxes agree up to floating-point round trip at the boundary
    exact = [r for r in recs if 0 < r.alpha.values[0] <= t1 and 0 < r.alpha.values[1] <= t2]
    if all(abs(r.alpha.values[0] - t1) > 1e-12 and abs(r.alpha.values[1] - t2) > 1e-12 for r in recs):
        assert mult == pytest.approx(small) and small == pytest.approx(sum(r.flat_volume for r in exact))


def test_record_validation():
    with pytest.raises(ValueError):
        _rec((1, 1), 0.0)
