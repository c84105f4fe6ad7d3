import json
import math

import mpmath
import pytest

from oracles import direct_hr
from primegeo.errors import CertificationFailed
from primegeo.exactpoly import MonicIntPolynomial as P
from primegeo.exactpoly import isolate_roots
from primegeo.orderfield import Order, maximal_order, order_from_lattice, orders_between, residue_unit_counts
from primegeo.unitlattice import (
    ClassRegulatorData,
    class_number,
    class_regulator_data,
    default_bounds,
    fundamental_units,
    hr_for_order,
    load_regulator_bounds,
    regulator_of,
)


def poly(*high):
    return P.from_high(list(high))


def field(p):
    basis, disc, _ = maximal_order(p)
    return basis, isolate_roots(p), disc


@pytest.fixture(scope="module")
def facts(fact_cache_path):
    return json.loads(fact_cache_path.read_text())["entries"]


def test_units_disc_minus_23(facts):
    basis, prof, _ = field(poly(1, 0, -1, -1))
    ub = fundamental_units(basis, prof)
    assert ub.rank == 1
    assert float(ub.regulator) == pytest.approx(math.log(1.3247179572447460), abs=1e-12)
    assert float(ub.regulator) == pytest.approx(facts["-23"][0]["R"], abs=1e-10)
    # the fundamental unit is +-theta^{+-1}
    fld = Order(basis).field
    u = Order(basis).element(ub.generators[0])
    cands = [fld.theta(), fld.inverse(fld.theta())]
    cands += [[-c for c in v] for v in cands]
    assert u in cands


def test_units_disc_49():
    basis, prof, disc = field(poly(1, -1, -2, 1))
    assert disc == 49
    ub = fundamental_units(basis, prof)
    assert ub.rank == 2
    order = Order(basis)
    for g in ub.generators:
        assert abs(order.norm(list(g))) == 1
    assert class_number(basis, prof) == 1


def test_rank_zero_refused():
    p = poly(1, 0, 1)  # x^2 + 1: signature (0, 1), unit rank 0
    basis, _, _ = maximal_order(p)
    with pytest.raises(ValueError):
        fundamental_units(basis, isolate_roots(p))


@pytest.mark.parametrize("high, h", [((1, 0, -1, -1), 1), ((1, -1, -2, 1), 1)])
def test_class_number_small(high, h):
    basis, prof, _ = field(poly(*high))
    assert class_number(basis, prof) == h


def test_class_number_two(facts):
    entry = facts["-283"][0]
    p = P(tuple(entry["coeffs"][:-1]))
    basis, prof, disc = field(p)
    assert disc == -283 and entry["h"] == 2
    assert class_number(basis, prof) == 2


def test_log_rows_sum_to_zero_and_bounds():
    for high in [(1, 0, -1, -1), (1, -1, -2, 1), (1, 0, -3, -1), (1, 1, -2, 8), (1, 0, 0, -10)]:
        basis, prof, disc = field(poly(*high))
        ub = fundamental_units(basis, prof)
        for row in ub.log_matrix:
            scale = max(abs(v) for v in row)
            assert abs(mpmath.fsum(row)) <= mpmath.mpf(10) ** -20 * scale
        assert float(ub.regulator) > default_bounds().lower_bound(prof.signature, disc)


def test_regulator_invariance_under_inverse_and_sign():
    basis, prof, _ = field(poly(1, -1, -2, 1))
    ub = fundamental_units(basis, prof)
    rows = [list(r) for r in ub.log_matrix]
    flipped = [[-v for v in rows[0]], rows[1]]  # u1 -> u1^{-1}; -u2 has the same logs as u2
    assert regulator_of(flipped) == pytest.approx(ub.regulator, rel=1e-30)


def test_regulator_table():
    text = "[signature 1 1]\nabsolute = 0.25\nrule = none\n"
    table = load_regulator_bounds(text)
    assert table.lower_bound((1, 1), -23) == 0.25
    with pytest.raises(CertificationFailed):
        table.lower_bound((3, 0), 49)
    # packaged table: the complex-cubic discriminant rule is never below the Pisot bound
    assert default_bounds().lower_bound((1, 1), -23) == pytest.approx(0.28119)
    assert default_bounds().lower_bound((1, 1), -10**6) > 0.28119


def test_hr_for_maximal_is_identity():
    basis, prof, _ = field(poly(1, 0, -1, -1))
    data = class_regulator_data(basis, prof)
    cond = residue_unit_counts(basis, basis)
    assert hr_for_order(basis, data, cond) == data


def test_hr_three_inert_factor():
    basis, prof, _ = field(poly(1, 0, -1, -1))
    data = class_regulator_data(basis, prof)
    ob = order_from_lattice(Order(basis), [[1, 0, 0], [0, 3, 0], [0, 0, 3]])
    out = hr_for_order(ob, data, residue_unit_counts(ob, basis))
    assert out.hR == pytest.approx(data.hR * 26 / 2)


def test_hr_multiplicative_under_coprime_conductors():
    basis, prof, _ = field(poly(1, 0, -1, -1))
    data = class_regulator_data(basis, prof)
    max_ord = Order(basis)

    def factor(n):
        ob = order_from_lattice(max_ord, [[1, 0, 0], [0, n, 0], [0, 0, n]])  # Z + n O_F
        return hr_for_order(ob, data, residue_unit_counts(ob, basis)).hR / data.hR

    assert factor(6) == pytest.approx(factor(2) * factor(3))


def test_hr_formula_equals_direct_computation(facts):
    """Index-2 order Z[theta] of x^3 + x^2 - 2x + 8 (h(O_F) = 1): formula vs explicit groups."""
    p = poly(1, 1, -2, 8)
    basis, prof, disc = field(p)
    assert facts[str(disc)][0]["h"] == 1
    data = class_regulator_data(basis, prof)
    out = [o for o in orders_between(p, {3}) if o[1].conductor_index == 2]
    assert len(out) == 1
    ob, cond, _ = out[0]
    formula = hr_for_order(ob, data, cond).hR
    eps = list(fundamental_units(basis, prof).generators[0])
    direct = direct_hr(Order(basis), ob, data.R, data.h, eps)
    assert formula == pytest.approx(direct, rel=1e-12)


def test_class_regulator_data_validation():
    with pytest.raises(ValueError):
        ClassRegulatorData(h=0, R=1.0, hR=0.0)
