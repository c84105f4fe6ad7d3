import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primegeo import _linalg
from primegeo.exactpoly import MonicIntPolynomial as P
from primegeo.exactpoly import discriminant, is_irreducible
from primegeo.orderfield import (
    Order,
    dedekind_p_maximal,
    lattice_in,
    maximal_order,
    order_from_lattice,
    orders_between,
    residue_unit_counts,
    splitting_type,
    suborder_lattices,
)


def poly(*high):
    return P.from_high(list(high))


X3_X_1 = poly(1, 0, -1, -1)
NON_MONOGENIC = poly(1, 1, -2, 8)


@pytest.mark.parametrize(
    "p, disc, index",
    [(X3_X_1, -23, 1), (poly(1, 0, -3, -1), 81, 1), (NON_MONOGENIC, -503, 2), (poly(1, 0, 0, -10), -300, 3)],
)
def test_maximal_order(p, disc, index):
    basis, d, i = maximal_order(p)
    assert (d, i) == (disc, index)
    assert basis.matrix[0][0] == basis.denominator  # first basis vector is 1
    assert Order(basis).is_ring


def test_dedekind():
    assert dedekind_p_maximal(X3_X_1, 2)
    assert dedekind_p_maximal(poly(1, 0, -3, -1), 2)
    assert dedekind_p_maximal(poly(1, 0, 0, 0, -1, -1), 7)
    assert not dedekind_p_maximal(NON_MONOGENIC, 2)


@pytest.mark.parametrize("q, factors", [(2, ((1, 3),)), (3, ((1, 3),)), (23, ((1, 1), (2, 1)))])
def test_splitting_disc_minus_23(q, factors):
    basis, _, _ = maximal_order(X3_X_1)
    st_ = splitting_type(basis, X3_X_1, q)
    assert st_.factors == factors
    assert st_.non_decomposed == (len(factors) == 1)


def test_splitting_at_index_divisor():
    basis, _, _ = maximal_order(NON_MONOGENIC)
    # 2 divides the index and splits completely: the classical obstruction to monogenity
    assert splitting_type(basis, NON_MONOGENIC, 2).factors == ((1, 1), (1, 1), (1, 1))


def _random_fields(n, seed=3):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        p = poly(1, rng.randint(-9, 9), rng.randint(-9, 9), rng.randint(-40, 40))
        if is_irreducible(p):
            out.append(p)
    return out


def test_field_invariants_on_random_cubics():
    for p in _random_fields(60):
        basis, disc, index = maximal_order(p)
        assert disc % 4 in (0, 1)  # Stickelberger
        assert discriminant(p) == disc * index * index
        for q in (2, 3, 5, 7):
            st_ = splitting_type(basis, p, q)
            assert sum(e * f for e, f in st_.factors) == 3
            if st_.non_decomposed:
                e, f = st_.factors[0]
                assert f in (1, 3) and (e == 1) == (f == 3)


def test_orders_between_monogenic():
    out = orders_between(X3_X_1, {2, 3})
    assert len(out) == 1
    _, cond, lam = out[0]
    assert cond.conductor_index == 1 and lam == 9


def test_orders_between_index_two():
    out = orders_between(NON_MONOGENIC, {3})
    assert [c.conductor_index for _, c, _ in out] == [1, 2]
    for ob, _, _ in out:
        assert Order(ob).is_ring


def test_orders_between_refuses_decomposed_prime():
    with pytest.raises(ValueError):
        orders_between(NON_MONOGENIC, {2, 3})


def test_orders_between_count_is_multiplicative():
    p = poly(1, 0, 0, -100)  # Z[100^(1/3)]: index 10, two prime factors
    basis, _, index = maximal_order(p)
    max_ord = Order(basis)
    rows = [max_ord.int_coords(max_ord.field.power(max_ord.field.theta(), k)) for k in range(3)]
    lat = _linalg.hnf_lower(rows, 3)
    n = _linalg.lattice_index(lat)
    parts = [q**e for q, e in _linalg.factorize(n).items()]
    total = len(suborder_lattices(max_ord, lat, n, n, 10**4))
    prod = 1
    for part in parts:
        prod *= len(suborder_lattices(max_ord, lat, n, part, 10**4))
    assert total == prod


def test_residue_counts_maximal():
    basis, _, _ = maximal_order(X3_X_1)
    c = residue_unit_counts(basis, basis)
    assert (c.conductor_index, c.unit_count_max, c.unit_count_sub) == (1, 1, 1)


def test_residue_counts_three_inert():
    basis, _, _ = maximal_order(X3_X_1)
    max_ord = Order(basis)
    ob = order_from_lattice(max_ord, [[1, 0, 0], [0, 3, 0], [0, 0, 3]])  # Z + 3 O_F
    c = residue_unit_counts(ob, basis)
    assert c.conductor_index == 9
    assert c.unit_count_max == 3**3 - 1  # O_F / 3 O_F = F_27
    assert c.unit_count_sub == 2  # O / f = F_3


def _brute_units(max_ord, f_lat, members):
    reps = {tuple(v) for v in itertools.product(*[range(f_lat[i][i]) for i in range(3)])}

    def red(x):
        x = list(x)
        for i in range(2, -1, -1):
            q = x[i] // f_lat[i][i]
            x = [a - q * b for a, b in zip(x, f_lat[i])]
        return tuple(x)

    reps = {red(v) for v in reps}
    one = red(max_ord.one())
    units = [x for x in reps if any(red(max_ord.mul(list(x), list(y))) == one for y in reps)]
    return len(units), sum(1 for x in units if members(x))


def test_residue_counts_match_enumeration():
    from primegeo.orderfield import conductor_lattice

    basis, _, _ = maximal_order(X3_X_1)
    max_ord = Order(basis)
    # every order containing Z + 6 O_F
    lats = suborder_lattices(max_ord, [[1, 0, 0], [0, 6, 0], [0, 0, 6]], 36, 36, 10**4)
    assert len(lats) > 3
    for sub_lat in lats:
        ob = order_from_lattice(max_ord, sub_lat)
        c = residue_unit_counts(ob, basis)
        f = conductor_lattice(max_ord, lattice_in(max_ord, ob))
        n_max, n_sub = _brute_units(max_ord, f, lambda x: _linalg.in_lattice(sub_lat, list(x)))
        assert (c.unit_count_max, c.unit_count_sub) == (n_max, n_sub)


@settings(max_examples=25, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-30, 30))
def test_suborders_are_rings_containing_maximal(a, b, c):
    p = poly(1, a, b, c)
    if not is_irreducible(p):
        return
    basis, _, index = maximal_order(p)
    if index > 50:
        return
    max_ord = Order(basis)
    rows = [max_ord.int_coords(max_ord.field.power(max_ord.field.theta(), k)) for k in range(3)]
    lats = suborder_lattices(max_ord, _linalg.hnf_lower(rows, 3), index, index, 10**4)
    assert [[1, 0, 0], [0, 1, 0], [0, 0, 1]] in lats
    for m in lats:
        assert Order(order_from_lattice(max_ord, m)).is_ring
