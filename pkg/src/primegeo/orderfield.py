"""Orders in ``F = Q[x]/(p)``: maximal order, splitting of primes, sub-orders, conductors.

Elements of ``F`` are vectors of :class:`~fractions.Fraction` over the power basis
``1, theta, ..., theta^{d-1}``.  An order is stored as an integer lower-triangular
HNF matrix ``B`` and a denominator ``den``: basis element ``i`` is ``B[i] / den``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import mpmath
from mpmath import mp
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_gcd, gf_mul

from . import _linalg
from .errors import ConductorTooLarge
from .exactpoly import MonicIntPolynomial, discriminant, isolate_roots

DEFAULT_INDEX_CAP = 10**4
DEFAULT_CONDUCTOR_CAP = 10**6

Vec = list[Fraction]


# ---------------------------------------------------------------------------
# the field


class NumberField:
    """Arithmetic in ``Q[x]/(p)`` on power-basis coordinate vectors."""

    def __init__(self, poly: MonicIntPolynomial):
        self.poly = poly
        self.degree = poly.degree

    def reduce(self, coeffs: Sequence) -> Vec:
        d = self.degree
        c = [Fraction(v) for v in coeffs]
        low = self.poly.coefficients
        for k in range(len(c) - 1, d - 1, -1):
            top = c[k]
            if top:
                for i in range(d):
                    c[k - d + i] -= top * low[i]
            c[k] = Fraction(0)
        return (c + [Fraction(0)] * d)[:d]

    def mul(self, a: Sequence, b: Sequence) -> Vec:
        prod = [Fraction(0)] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return self.reduce(prod)

    def one(self) -> Vec:
        return [Fraction(1)] + [Fraction(0)] * (self.degree - 1)

    def theta(self) -> Vec:
        v = [Fraction(0)] * self.degree
        if self.degree == 1:
            v[0] = Fraction(-self.poly.coefficients[0])
        else:
            v[1] = Fraction(1)
        return v

    def power(self, a: Sequence, n: int) -> Vec:
        if n < 0:
            return self.power(self.inverse(a), -n)
        result = self.one()
        base = list(a)
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def mult_matrix(self, a: Sequence) -> list[Vec]:
        """Rows: ``a * theta^i`` in power coordinates."""
        rows = []
        cur = [Fraction(v) for v in a]
        for _ in range(self.degree):
            rows.append(cur)
            cur = self.reduce([Fraction(0)] + cur)
        return rows

    def norm(self, a: Sequence) -> Fraction:
        rows = self.mult_matrix(a)
        den = 1
        for r in rows:
            for v in r:
                den = den * v.denominator // math.gcd(den, v.denominator)
        ints = [[int(v * den) for v in r] for r in rows]
        return Fraction(_linalg.det(ints), den**self.degree)

    def trace(self, a: Sequence) -> Fraction:
        rows = self.mult_matrix(a)
        return sum((rows[i][i] for i in range(self.degree)), Fraction(0))

    def inverse(self, a: Sequence) -> Vec:
        # solve y * M_a = 1 where M_a rows are a * theta^i
        rows = self.mult_matrix(a)
        return _solve_fraction(rows, self.one())

    def charpoly(self, a: Sequence) -> list[Fraction]:
        """Characteristic polynomial of multiplication by ``a``, low-to-high, monic."""
        rows = self.mult_matrix(a)
        return _charpoly_fraction(rows)

    def evaluate(self, a: Sequence, z) -> mpmath.mpc:
        acc = mpmath.mpc(0)
        for c in reversed(list(a)):
            acc = acc * z + mpmath.mpf(c.numerator) / c.denominator
        return acc

    @cached_property
    def maximal(self) -> "Order":
        basis, _, _ = maximal_order(self.poly)
        return Order(basis)

    def roots_in_field(self, q: MonicIntPolynomial, bits: int = 128) -> list[Vec]:
        """All roots of the monic integer polynomial ``q`` that lie in this field."""
        if q.degree != self.degree:
            raise ValueError("root search is implemented for deg q == deg F only")
        order = self.maximal
        prof_f = isolate_roots(self.poly, bits)
        prof_q = isolate_roots(q, bits)
        if prof_q.signature != prof_f.signature:
            return []
        found: list[Vec] = []
        d = self.degree
        with mp.workprec(max(bits, prof_f.working_bits)):
            thetas = prof_f.centers()
            nus = prof_q.centers()
            wmat = mpmath.matrix(d, d)
            for k, t in enumerate(thetas):
                for i, w in enumerate(order.basis_vectors):
                    wmat[k, i] = self.evaluate(w, t)
            for perm in itertools.permutations(range(d)):
                if any(prof_f.roots[k].is_real != prof_q.roots[perm[k]].is_real for k in range(d)):
                    continue
                rhs = mpmath.matrix([nus[perm[k]] for k in range(d)])
                try:
                    sol = mpmath.lu_solve(wmat, rhs)
                except ZeroDivisionError:
                    continue
                coords = []
                good = True
                for i in range(d):
                    v = sol[i]
                    n = int(mpmath.nint(v.real))
                    if abs(v - n) > mpmath.mpf(2) ** (-bits // 4):
                        good = False
                        break
                    coords.append(n)
                if not good:
                    continue
                elt = order.element(coords)
                if _poly_at(self, q, elt) == [0] * d and elt not in found:
                    found.append(elt)
        return found


def _poly_at(field_: NumberField, q: MonicIntPolynomial, elt: Vec) -> list:
    acc = field_.one()
    for c in reversed(q.coefficients):
        acc = field_.mul(acc, elt)
        acc[0] += c
    return acc


def _solve_fraction(rows: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> Vec:
    """Solve ``y * A = target`` over Q."""
    n = len(rows)
    # transpose: A^T y^T = target^T
    a = [[Fraction(rows[j][i]) for j in range(n)] + [Fraction(target[i])] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [u - f * v for u, v in zip(a[i], a[c])]
    return [a[i][n] for i in range(n)]


def _charpoly_fraction(mat: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    # Faddeev-LeVerrier
    n = len(mat)
    a = [list(r) for r in mat]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        am = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs[n - k] = c
        m = [[am[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return coeffs


# ---------------------------------------------------------------------------
# orders


@dataclass(frozen=True)
class OrderBasis:
    """A full-rank lattice of ``F`` in lower-triangular HNF over the power basis."""

    poly: MonicIntPolynomial
    matrix: tuple[tuple[int, ...], ...]
    denominator: int

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @classmethod
    def from_rows(cls, poly: MonicIntPolynomial, rows: Sequence[Sequence[int]], den: int) -> "OrderBasis":
        d = poly.degree
        h = _linalg.hnf_lower(rows, d)
        g = den
        for r in h:
            for v in r:
                g = math.gcd(g, v)
        h = [[v // g for v in r] for r in h]
        return cls(poly, tuple(tuple(r) for r in h), den // g)

    @classmethod
    def equation_order(cls, poly: MonicIntPolynomial) -> "OrderBasis":
        d = poly.degree
        return cls(poly, tuple(tuple(int(i == j) for j in range(d)) for i in range(d)), 1)

    def index_over_equation_order(self) -> Fraction:
        """``[O : Z[theta]]`` (a positive integer whenever ``Z[theta]`` is contained in ``O``)."""
        diag = 1
        for i, r in enumerate(self.matrix):
            diag *= r[i]
        return Fraction(self.denominator**self.rank, diag)


class Order:
    """An order with cached structure constants.

    ``coords`` expresses a power-basis vector in the order basis; elements of the
    order have integer coordinates.
    """

    def __init__(self, basis: OrderBasis):
        self.basis = basis
        self.field = NumberField(basis.poly)
        self.degree = basis.rank

    def __eq__(self, other):
        return isinstance(other, Order) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    @cached_property
    def basis_vectors(self) -> list[Vec]:
        den = self.basis.denominator
        return [[Fraction(v, den) for v in r] for r in self.basis.matrix]

    def element(self, coords: Sequence[int]) -> Vec:
        d = self.degree
        out = [Fraction(0)] * d
        for c, w in zip(coords, self.basis_vectors):
            if c:
                for k in range(d):
                    out[k] += c * w[k]
        return out

    def coords(self, v: Sequence) -> list[Fraction]:
        den = self.basis.denominator
        return _linalg.solve_lower(self.basis.matrix, [Fraction(x) * den for x in v])

    def contains(self, v: Sequence) -> bool:
        return all(c.denominator == 1 for c in self.coords(v))

    def int_coords(self, v: Sequence) -> list[int]:
        cs = self.coords(v)
        if any(c.denominator != 1 for c in cs):
            raise ValueError("element not in order")
        return [int(c) for c in cs]

    @cached_property
    def structure(self) -> list[list[list[Fraction]]]:
        """``structure[i][j]`` = coordinates of ``w_i * w_j``."""
        ws = self.basis_vectors
        d = self.degree
        table = [[None] * d for _ in range(d)]
        for i in range(d):
            for j in range(i, d):
                c = self.coords(self.field.mul(ws[i], ws[j]))
                table[i][j] = c
                table[j][i] = c
        return table

    def is_ring(self) -> bool:
        return all(v.denominator == 1 for row in self.structure for c in row for v in c)

    @cached_property
    def int_structure(self) -> list[list[list[int]]]:
        return [[[int(v) for v in c] for c in row] for row in self.structure]

    def mul(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        d = self.degree
        st = self.int_structure
        out = [0] * d
        for i in range(d):
            xi = x[i]
            if not xi:
                continue
            for j in range(d):
                yj = y[j]
                if not yj:
                    continue
                f = xi * yj
                row = st[i][j]
                for k in range(d):
                    if row[k]:
                        out[k] += f * row[k]
        return out

    def mult_matrix(self, x: Sequence[int]) -> list[list[int]]:
        """Rows: coordinates of ``x * w_j``."""
        d = self.degree
        st = self.int_structure
        rows = []
        for j in range(d):
            r = [0] * d
            for i in range(d):
                if x[i]:
                    for k in range(d):
                        r[k] += x[i] * st[i][j][k]
            rows.append(r)
        return rows

    def norm(self, x: Sequence[int]) -> int:
        return _linalg.det(self.mult_matrix(x))

    def one(self) -> list[int]:
        return self.int_coords(self.field.one())

    @cached_property
    def discriminant(self) -> int:
        idx = self.basis.index_over_equation_order()
        disc = Fraction(discriminant(self.basis.poly)) / idx**2
        assert disc.denominator == 1
        return int(disc)

    def algebra_mod(self, q: int) -> "FiniteAlgebra":
        return FiniteAlgebra(self.int_structure, q, self.one())


# ---------------------------------------------------------------------------
# finite algebras O / qO


class FiniteAlgebra:
    """The ``F_q``-algebra ``O/qO`` for an order with integer structure constants."""

    def __init__(self, structure: list[list[list[int]]], q: int, one: Sequence[int]):
        self.q = q
        self.d = len(structure)
        self.st = [[[v % q for v in c] for c in row] for row in structure]
        self.one_vec = [v % q for v in one]

    def mul(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        d, q, st = self.d, self.q, self.st
        out = [0] * d
        for i in range(d):
            if x[i]:
                for j in range(d):
                    if y[j]:
                        f = x[i] * y[j]
                        row = st[i][j]
                        for k in range(d):
                            out[k] += f * row[k]
        return [v % q for v in out]

    def pow(self, x: Sequence[int], n: int) -> list[int]:
        result = list(self.one_vec)
        base = [v % self.q for v in x]
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def unit_vector(self, i: int) -> list[int]:
        return [int(i == j) for j in range(self.d)]

    @cached_property
    def nil_exponent(self) -> int:
        """Smallest ``q^m >= d``; ``x^(q^m)`` kills every nilpotent."""
        e = self.q
        while e < self.d:
            e *= self.q
        return e

    @cached_property
    def radical(self) -> list[list[int]]:
        """RREF basis of the Jacobson radical: kernel of ``x -> x^(q^m)``."""
        rows = [self.pow(self.unit_vector(i), self.nil_exponent) for i in range(self.d)]
        ker = _linalg.left_nullspace_mod(rows, self.q)
        return _linalg.span_mod(ker, self.q)

    @cached_property
    def components(self) -> list[tuple[list[int], int, int]]:
        """Primitive idempotents with (residue degree, component dimension)."""
        q, d = self.q, self.d
        frob = [self.pow(self.unit_vector(i), q) for i in range(d)]
        shifted = [[(frob[i][k] - int(i == k)) % q for k in range(d)] for i in range(d)]
        rad = self.radical
        stacked = shifted + [[-v % q for v in r] for r in rad]
        ker = _linalg.left_nullspace_mod(stacked, q)
        berlekamp = _linalg.span_mod([k[:d] for k in ker], q)
        idems = [list(self.one_vec)]
        changed = True
        while changed:
            changed = False
            for b in berlekamp:
                new: list[list[int]] = []
                for e in idems:
                    parts = [e]
                    for c in range(q):
                        refined = []
                        for part in parts:
                            shifted_b = [(v - c * o) % q for v, o in zip(b, self.one_vec)]
                            t = self.mul(part, self.pow(self.pow(shifted_b, q - 1), self.nil_exponent))
                            if any(t) and t != part:
                                refined.append(t)
                                refined.append([(u - v) % q for u, v in zip(part, t)])
                                changed = True
                            else:
                                refined.append(part)
                        parts = refined
                    new.extend(parts)
                idems = new
        out = []
        for e in idems:
            comp = [self.mul(e, self.unit_vector(i)) for i in range(d)]
            dim = _linalg.rank_mod(comp, q)
            rad_part = [self.mul(e, r) for r in rad]
            dim_rad = _linalg.rank_mod(rad_part, q) if rad_part else 0
            out.append((e, dim - dim_rad, dim))
        return out


# ---------------------------------------------------------------------------
# polynomials mod q


def _factor_mod(poly: MonicIntPolynomial, q: int) -> list[tuple[list[int], int]]:
    _, factors = gf_factor(ZZ.map([v % q for v in poly.high()]), q, ZZ)
    return [([int(c) for c in g], int(e)) for g, e in factors]


def dedekind_p_maximal(p: MonicIntPolynomial, q: int) -> bool:
    """Dedekind criterion: is ``Z[theta]`` maximal at ``q``?"""
    if discriminant(p) % (q * q) != 0:
        return True
    factors = _factor_mod(p, q)
    g = [1]
    h = [1]
    for fac, e in factors:
        g = gf_mul(g, ZZ.map(fac), q, ZZ)
        for _ in range(e - 1):
            h = gf_mul(h, ZZ.map(fac), q, ZZ)
    # lift g, h to Z and form f = (g h - p) / q over Z
    gz = [int(c) for c in g]
    hz = [int(c) for c in h]
    prod = _int_poly_mul(gz, hz)
    ph = p.high()
    width = max(len(prod), len(ph))
    prod = [0] * (width - len(prod)) + prod
    phz = [0] * (width - len(ph)) + ph
    diff = [a - b for a, b in zip(prod, phz)]
    assert all(v % q == 0 for v in diff)
    f = [(v // q) % q for v in diff]
    while f and f[0] == 0:
        f = f[1:]
    common = gf_gcd(gf_gcd(ZZ.map(f), g, q, ZZ), h, q, ZZ)
    return len(common) <= 1


def _int_poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# Round 2


def _enlarge_at(order: Order, q: int) -> Order | None:
    """One Round-2 step: the multiplier ring of the ``q``-radical, or None if equal."""
    d = order.degree
    alg = order.algebra_mod(q)
    rad = alg.radical
    ideal_rows = [[q * int(i == j) for j in range(d)] for i in range(d)] + [list(r) for r in rad]
    ideal = _linalg.hnf_lower(ideal_rows, d)
    # U = {x in O : x I subset q I}, computed mod q through I-coordinates
    cols: list[list[int]] = []
    for i in range(d):
        row: list[int] = []
        for y in ideal:
            prod = order.mul([int(i == k) for k in range(d)], y)
            c = _linalg.solve_lower(ideal, prod)
            row.extend(int(v) % q for v in c)
        cols.append(row)
    ker = _linalg.left_nullspace_mod(cols, q)
    if not ker:
        return None
    u_rows = [[q * int(i == j) for j in range(d)] for i in range(d)] + [list(k) for k in ker]
    u = _linalg.hnf_lower(u_rows, d)
    if _linalg.lattice_index(u) == q**d:
        return None
    # new order = U / q, expressed over the power basis
    b = order.basis.matrix
    den = order.basis.denominator * q
    rows = _linalg.mat_mul(u, b)
    return Order(OrderBasis.from_rows(order.basis.poly, rows, den))


@lru_cache(maxsize=4096)
def maximal_order(p: MonicIntPolynomial) -> tuple[OrderBasis, int, int]:
    """Ring of integers of ``Q[x]/(p)`` by Round 2: ``(basis, field discriminant, index)``."""
    disc = discriminant(p)
    order = Order(OrderBasis.equation_order(p))
    for q, e in sorted(_linalg.factorize(disc).items()):
        if e < 2 or dedekind_p_maximal(p, q):
            continue
        while True:
            bigger = _enlarge_at(order, q)
            if bigger is None:
                break
            order = bigger
    index = order.basis.index_over_equation_order()
    assert index.denominator == 1
    idx = int(index)
    return order.basis, disc // (idx * idx), idx


# ---------------------------------------------------------------------------
# splitting of primes


@dataclass(frozen=True)
class SplittingType:
    prime: int
    factors: tuple[tuple[int, int], ...]  # (e, f), sorted

    @property
    def non_decomposed(self) -> bool:
        return len(self.factors) == 1

    @property
    def inertia_degree(self) -> int:
        if not self.non_decomposed:
            raise ValueError("inertia degree is defined here only for non-decomposed primes")
        return self.factors[0][1]


def splitting_type(max_order: OrderBasis, p: MonicIntPolynomial, q: int) -> SplittingType:
    index = max_order.index_over_equation_order()
    if int(index) % q != 0:
        facs = tuple(sorted((e, len(g) - 1) for g, e in _factor_mod(p, q)))
        return SplittingType(q, facs)
    alg = Order(max_order).algebra_mod(q)
    facs = []
    for _, f, dim in alg.components:
        facs.append((dim // f, f))
    return SplittingType(q, tuple(sorted(facs)))


# ---------------------------------------------------------------------------
# prime ideals of the maximal order


@dataclass
class PrimeIdeal:
    """A prime of ``O_F`` above ``q``: lattice in order coordinates plus valuation helper."""

    q: int
    e: int
    f: int
    lattice: list[list[int]]  # lower HNF, O_F coordinates
    tau: list[int]  # element of q P^-1 not in q O_F

    @property
    def norm(self) -> int:
        return self.q**self.f

    def valuation(self, order: Order, x: Sequence[int]) -> int:
        if not any(x):
            raise ValueError("valuation of zero")
        v = 0
        cur = list(x)
        q = self.q
        while True:
            y = order.mul(cur, self.tau)
            if any(c % q for c in y):
                return v
            cur = [c // q for c in y]
            v += 1


def prime_ideals(order: Order, q: int) -> list[PrimeIdeal]:
    """Decomposition of ``q`` in the maximal order ``order``."""
    d = order.degree
    qI = [[q * int(i == j) for j in range(d)] for i in range(d)]
    out = []
    index = int(order.basis.index_over_equation_order())
    if index % q != 0:
        theta_c = order.int_coords(order.field.theta())
        for g, e in _factor_mod(order.basis.poly, q):
            # g(theta) in order coordinates, by Horner
            val = [0] * d
            one = order.one()
            for c in g:
                val = order.mul(val, theta_c)
                val = [a + c * b for a, b in zip(val, one)]
            gens = qI + order.mult_matrix(val)
            lat = _linalg.hnf_lower(gens, d)
            out.append(PrimeIdeal(q, e, len(g) - 1, lat, _tau(order, lat, q)))
        return out
    alg = order.algebra_mod(q)
    rad = alg.radical
    for eps, f, dim in alg.components:
        one_minus = [(o - v) % q for o, v in zip(alg.one_vec, eps)]
        comp = [alg.mul(one_minus, alg.unit_vector(i)) for i in range(d)]
        lat = _linalg.hnf_lower(qI + [list(r) for r in rad] + comp, d)
        out.append(PrimeIdeal(q, dim // f, f, lat, _tau(order, lat, q)))
    return out


def _tau(order: Order, lat: Sequence[Sequence[int]], q: int) -> list[int]:
    d = order.degree
    # y with y * b = 0 mod q for every basis vector b of the ideal
    rows = []
    for i in range(d):
        ei = [int(i == k) for k in range(d)]
        row = []
        for b in lat:
            row.extend(v % q for v in order.mul(ei, b))
        rows.append(row)
    ker = _linalg.left_nullspace_mod(rows, q)
    for k in ker:
        if any(k):
            return list(k)
    raise AssertionError("no anti-uniformizer found")


# ---------------------------------------------------------------------------
# intermediate orders and conductors


@dataclass(frozen=True)
class ConductorData:
    conductor_index: int
    unit_count_max: int
    unit_count_sub: int
    conductor_norm: int = 1


def _prime_to(n: int, primes: Iterable[int]) -> int:
    for q in primes:
        while n % q == 0:
            n //= q
    return n


def _divisors(n: int) -> list[int]:
    divs = [1]
    for q, e in _linalg.factorize(n).items():
        divs = [a * q**k for a in divs for k in range(e + 1)]
    return sorted(divs)


def _hnf_candidates(d: int, n: int):
    """Lower-triangular HNF matrices with ``[0][0] = 1`` and determinant ``n``."""

    def diag_tuples(k: int, m: int):
        if k == 0:
            if m == 1:
                yield ()
            return
        for a in _divisors(m):
            for rest in diag_tuples(k - 1, m // a):
                yield (a,) + rest

    for diag in diag_tuples(d - 1, n):
        full_diag = (1,) + diag
        slots = [(i, j) for i in range(1, d) for j in range(1, i)]
        ranges = [range(full_diag[j]) for (_, j) in slots]
        for vals in itertools.product(*ranges):
            m = [[0] * d for _ in range(d)]
            for i in range(d):
                m[i][i] = full_diag[i]
            for (i, j), v in zip(slots, vals):
                m[i][j] = v
            yield m


def suborder_lattices(max_ord: Order, sub_rows: Sequence[Sequence[int]], index: int, allowed: int, cap: int) -> list[list[list[int]]]:
    """Rings between the lattice ``sub_rows`` (O_F coordinates) and ``O_F`` of index dividing ``allowed``."""
    d = max_ord.degree
    if index > cap:
        raise ConductorTooLarge(f"index {index} exceeds cap {cap}")
    out = []
    for n in _divisors(allowed):
        for m in _hnf_candidates(d, n):
            if not all(_linalg.in_lattice(m, r) for r in sub_rows):
                continue
            if _lattice_is_ring(max_ord, m):
                out.append(m)
    return out


def _lattice_is_ring(max_ord: Order, m: Sequence[Sequence[int]]) -> bool:
    d = len(m)
    for i in range(1, d):
        for j in range(i, d):
            if not _linalg.in_lattice(m, max_ord.mul(m[i], m[j])):
                return False
    return True


def order_from_lattice(max_ord: Order, lat: Sequence[Sequence[int]]) -> OrderBasis:
    """Power-basis HNF of a sublattice given in ``O_F`` coordinates."""
    b = max_ord.basis.matrix
    rows = _linalg.mat_mul(lat, b)
    return OrderBasis.from_rows(max_ord.basis.poly, rows, max_ord.basis.denominator)


def lattice_in(max_ord: Order, sub: OrderBasis) -> list[list[int]]:
    """Coordinates over ``O_F`` of a sub-order basis, as a lower HNF."""
    rows = [max_ord.int_coords([Fraction(v, sub.denominator) for v in r]) for r in sub.matrix]
    return _linalg.hnf_lower(rows, max_ord.degree)


def orders_between(
    p: MonicIntPolynomial,
    S: Iterable[int],
    *,
    index_cap: int = DEFAULT_INDEX_CAP,
    conductor_cap: int = DEFAULT_CONDUCTOR_CAP,
) -> list[tuple[OrderBasis, ConductorData, int]]:
    """Orders between ``Z[theta]`` and ``O_F`` whose index in ``O_F`` is prime to ``S``.

    Each entry carries conductor data and ``lambda_S``, the product of the
    inertia degrees at ``S`` (every prime of ``S`` must be non-decomposed).
    """
    S = sorted(set(S))
    basis, _, index = maximal_order(p)
    max_ord = Order(basis)
    lam = 1
    for q in S:
        st = splitting_type(basis, p, q)
        if not st.non_decomposed:
            raise ValueError(f"{q} is decomposed in Q[x]/({p})")
        lam *= st.inertia_degree
    eq_rows = [max_ord.int_coords(max_ord.field.power(max_ord.field.theta(), i)) for i in range(p.degree)]
    lats = suborder_lattices(max_ord, eq_rows, index, _prime_to(index, S), index_cap)
    out = []
    for lat in sorted(lats, key=lambda m: (_linalg.lattice_index(m), m)):
        ob = order_from_lattice(max_ord, lat)
        cond = residue_unit_counts(ob, basis, conductor_cap=conductor_cap)
        out.append((ob, cond, lam))
    return out


def conductor_lattice(max_ord: Order, sub_lat: Sequence[Sequence[int]]) -> list[list[int]]:
    """``{x in O_F : x O_F subset O}`` in ``O_F`` coordinates."""
    d = max_ord.degree
    result = None
    for j in range(d):
        ej = [int(j == k) for k in range(d)]
        mat = [max_ord.mul([int(i == k) for k in range(d)], ej) for i in range(d)]
        pre = _linalg.preimage(mat, sub_lat, d)
        result = pre if result is None else _linalg.lattice_intersection(result, pre, d)
    return result


def _unit_count(ring: Order, ideal_lat: Sequence[Sequence[int]], size: int) -> int:
    """``|(ring / ideal)^x|`` where the ideal is given in ``ring`` coordinates."""
    if size == 1:
        return 1
    count = Fraction(size)
    for q in _linalg.factorize(size):
        alg = ring.algebra_mod(q)
        rad = alg.radical
        for eps, f, _ in alg.components:
            inside = True
            for row in ideal_lat:
                t = alg.mul(eps, [v % q for v in row])
                if any(t) and not _linalg.in_span_mod(rad, t, q):
                    inside = False
                    break
            if inside:
                count *= Fraction(q**f - 1, q**f)
    assert count.denominator == 1
    return int(count)


def residue_unit_counts(order: OrderBasis, max_order: OrderBasis, *, conductor_cap: int = DEFAULT_CONDUCTOR_CAP) -> ConductorData:
    max_ord = Order(max_order)
    sub_lat = lattice_in(max_ord, order)
    idx = _linalg.lattice_index(sub_lat)
    if idx == 1:
        return ConductorData(1, 1, 1, 1)
    cond = conductor_lattice(max_ord, sub_lat)
    size_max = _linalg.lattice_index(cond)
    if size_max > conductor_cap:
        raise ConductorTooLarge(f"conductor norm {size_max} exceeds cap {conductor_cap}")
    sub = Order(order)
    # conductor in sub-order coordinates
    cond_sub = [sub.int_coords(max_ord.element(r)) for r in cond]
    cond_sub = _linalg.hnf_lower(cond_sub, max_ord.degree)
    size_sub = size_max // idx
    return ConductorData(
        conductor_index=idx,
        unit_count_max=_unit_count(max_ord, cond, size_max),
        unit_count_sub=_unit_count(sub, cond_sub, size_sub),
        conductor_norm=size_max,
    )
