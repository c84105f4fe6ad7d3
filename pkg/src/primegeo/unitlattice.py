"""Unit groups, regulators and class numbers of maximal orders, and h*R for sub-orders.

Everything is obtained from one relation search.  Small elements of the
maximal order (and of its small prime ideals) are factored over the prime
ideals of norm up to the Minkowski bound.  The integer kernel of the relation
matrix yields units; the relation lattice itself yields a multiple of the
class number.  Both are then certified:

* units: the found subgroup has index at most ``R_found / R_lower`` in the
  full unit group, so every prime below that ratio is ruled out by explicit
  root extraction;
* class group: every element of prime order in the candidate group is shown
  to be non-principal by exhausting the generators allowed by a unit-reduced
  height bound.
"""

from __future__ import annotations

import configparser
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

import mpmath
from mpmath import mp

from . import _lattice, _linalg
from .errors import BoundTooLarge, CertificationFailed
from .exactpoly import EmbeddingProfile, MonicIntPolynomial, isolate_roots
from .orderfield import ConductorData, Order, OrderBasis, PrimeIdeal, maximal_order, prime_ideals

DEFAULT_BITS = 128
DEFAULT_MINKOWSKI_CAP = 5000
DEFAULT_DISC_CAP = 10**6
MAX_SEARCH_ROUNDS = 12


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class UnitBasis:
    rank: int
    generators: tuple[tuple[int, ...], ...]  # coordinates over the maximal-order basis
    log_matrix: tuple[tuple[mpmath.mpf, ...], ...]

    @property
    def regulator(self) -> mpmath.mpf:
        return regulator_of(self.log_matrix)


@dataclass(frozen=True)
class ClassRegulatorData:
    h: int
    R: float
    hR: float

    def __post_init__(self) -> None:
        if self.h < 1 or not self.R > 0:
            raise ValueError("class number must be positive and regulator > 0")


def regulator_of(log_matrix: Sequence[Sequence]) -> mpmath.mpf:
    """|det| of the log matrix with its last column deleted."""
    k = len(log_matrix)
    if k == 0:
        return mpmath.mpf(1)
    m = mpmath.matrix([[log_matrix[i][j] for j in range(k)] for i in range(k)])
    return abs(mpmath.det(m))


# ---------------------------------------------------------------------------
# regulator lower bounds


def _complex_cubic_rule(disc: int) -> float:
    # smallest u >= 1 with 4 (u + u^-1/2)^4 / u >= |disc|
    target = abs(disc)

    def g(u: float) -> float:
        return 4 * (u + u**-0.5) ** 4 / u

    if target <= g(1.0):
        return 0.0
    lo, hi = 1.0, 2.0
    while g(hi) < target:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if g(mid) < target:
            lo = mid
        else:
            hi = mid
    # round down to stay on the safe side of the bisection
    return math.log(lo) * (1 - 1e-12)


def _cusick_rule(disc: int) -> float:
    if disc <= 4:
        return 0.0
    return math.log(disc / 4) ** 2 / 16


DISC_RULES = {
    "none": lambda disc: 0.0,
    "complex_cubic": _complex_cubic_rule,
    "cusick": _cusick_rule,
}


@dataclass(frozen=True)
class RegulatorBounds:
    table: dict[tuple[int, int], tuple[float, str]]

    def lower_bound(self, signature: tuple[int, int], disc: int) -> float:
        if signature not in self.table:
            raise CertificationFailed(f"no regulator lower bound configured for signature {signature}")
        absolute, rule = self.table[signature]
        return max(absolute, DISC_RULES[rule](disc))


def load_regulator_bounds(text: str | None = None) -> RegulatorBounds:
    """Parse the constants table (INI text); the packaged file when ``text`` is None."""
    if text is None:
        text = resources.files("primegeo").joinpath("data/regulator_bounds.ini").read_text()
    cp = configparser.ConfigParser()
    cp.read_string(text)
    table = {}
    for sec in cp.sections():
        parts = sec.split()
        if len(parts) != 3 or parts[0] != "signature":
            raise ValueError(f"bad section name {sec!r}")
        sig = (int(parts[1]), int(parts[2]))
        rule = cp[sec].get("rule", "none")
        if rule not in DISC_RULES:
            raise ValueError(f"unknown bound rule {rule!r}")
        table[sig] = (float(cp[sec].get("absolute", "0")), rule)
    return RegulatorBounds(table)


@lru_cache(maxsize=1)
def default_bounds() -> RegulatorBounds:
    return load_regulator_bounds()


# ---------------------------------------------------------------------------
# embeddings


class _Embedder:
    """Values of maximal-order elements at the archimedean places.

    Places are the real roots followed by one root of each conjugate pair.
    """

    def __init__(self, order: Order, profile: EmbeddingProfile, bits: int):
        self.order = order
        self.bits = bits
        self.profile = profile
        self.d = order.degree
        reals = [i for i, rt in enumerate(profile.roots) if rt.is_real]
        cplx = [i for i, rt in enumerate(profile.roots) if not rt.is_real and profile.pair_of[i] > i]
        self.places = reals + cplx
        self.weights = [1] * len(reals) + [2] * len(cplx)
        self.r = len(reals)
        with mp.workprec(bits):
            thetas = profile.centers()
            self.root_values = [
                [order.field.evaluate(w, t) for w in order.basis_vectors] for t in thetas
            ]

    def values(self, coords: Sequence[int]) -> list:
        """Value at every root (all ``d`` embeddings)."""
        with mp.workprec(self.bits):
            return [mpmath.fsum(c * v for c, v in zip(coords, row) if c) for row in self.root_values]

    def place_values(self, coords: Sequence[int]) -> list:
        vals = self.values(coords)
        return [vals[i] for i in self.places]

    def log_row(self, coords: Sequence[int]) -> list[mpmath.mpf]:
        """Weighted row ``(log|rho_i|, 2 log|sigma_j|)``."""
        with mp.workprec(self.bits):
            return [w * mpmath.log(abs(v)) for w, v in zip(self.weights, self.place_values(coords))]

    def complex_logs(self, coords: Sequence[int]) -> list:
        with mp.workprec(self.bits):
            return [mpmath.log(mpmath.mpc(v)) for v in self.place_values(coords)]

    def element_from_places(self, place_vals: Sequence) -> list[int] | None:
        """Round the element with the given place values to integer coordinates."""
        d = self.d
        with mp.workprec(self.bits):
            full = [None] * d
            for k, i in enumerate(self.places):
                full[i] = place_vals[k]
                j = self.profile.pair_of[i]
                if j != i:
                    full[j] = mpmath.conj(place_vals[k])
            w = mpmath.matrix(self.root_values)
            sol = mpmath.lu_solve(w, mpmath.matrix(full))
            out = []
            tol = mpmath.mpf(2) ** (-self.bits // 3)
            for i in range(d):
                v = sol[i]
                n = int(mpmath.nint(mpmath.re(v)))
                if abs(v - n) > tol:
                    return None
                out.append(n)
        return out

    def gram(self, rows: Sequence[Sequence[int]]) -> list[list[float]]:
        """T2 Gram matrix of a lattice given in maximal-order coordinates."""
        with mp.workprec(self.bits):
            vals = [self.values(r) for r in rows]
            n = len(rows)
            g = [[0.0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    s = mpmath.fsum(mpmath.re(a * mpmath.conj(b)) for a, b in zip(vals[i], vals[j]))
                    g[i][j] = g[j][i] = float(s)
        return g


def _reduced_basis(emb: _Embedder, rows: Sequence[Sequence[int]]) -> list[list[int]]:
    u = _lattice.lll_gram(emb.gram(rows))
    return [[sum(u[i][k] * rows[k][c] for k in range(len(rows))) for c in range(len(rows[0]))] for i in range(len(u))]


def _short_vectors(emb: _Embedder, rows: Sequence[Sequence[int]], bound: float) -> list[list[int]]:
    """Elements of the lattice with T2 at most ``bound`` (one per sign pair), shortest first."""
    red = _reduced_basis(emb, rows)
    g = emb.gram(red)
    pts = []
    for x in _lattice.fincke_pohst(g, bound):
        t2 = sum(x[i] * g[i][j] * x[j] for i in range(len(x)) for j in range(len(x)))
        elt = [sum(x[i] * red[i][c] for i in range(len(x))) for c in range(len(red[0]))]
        pts.append((t2, elt))
    pts.sort(key=lambda t: t[0])
    return [e for _, e in pts]


# ---------------------------------------------------------------------------
# exact helpers in the maximal order


def _unit_inverse(order: Order, u: Sequence[int]) -> list[int]:
    return order.int_coords(order.field.inverse(order.element(u)))


def _power(order: Order, x: Sequence[int], n: int) -> list[int]:
    if n < 0:
        return _power(order, _unit_inverse(order, x), -n)
    result = order.one()
    base = list(x)
    while n:
        if n & 1:
            result = order.mul(result, base)
        n >>= 1
        if n:
            base = order.mul(base, base)
    return result


def _ideal_mul(order: Order, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    gens = [order.mul(x, y) for x in a for y in b]
    return _linalg.hnf_lower(gens, order.degree)


# ---------------------------------------------------------------------------
# relation search


class FieldArithmetic:
    """Relation-based computation of the unit group and class group of ``O_F``."""

    def __init__(
        self,
        poly: MonicIntPolynomial,
        *,
        bits: int = DEFAULT_BITS,
        minkowski_cap: float = DEFAULT_MINKOWSKI_CAP,
        bounds: RegulatorBounds | None = None,
        profile: EmbeddingProfile | None = None,
    ):
        self.poly = poly
        basis, disc, _ = maximal_order(poly)
        self.order = Order(basis)
        self.disc = disc
        self.d = poly.degree
        self.profile = profile if profile is not None else isolate_roots(poly, bits)
        self.signature = self.profile.signature
        r, s = self.signature
        self.unit_rank = r + s - 1
        if self.unit_rank < 1:
            raise ValueError("unit rank r+s-1 must be at least 1")
        if r == 0:
            raise AssertionError("torsion handling assumes a real embedding")
        self.bits = bits
        self.emb = _Embedder(self.order, self.profile, max(bits, self.profile.working_bits))
        self.bounds = bounds or default_bounds()
        d = self.d
        self.minkowski = math.factorial(d) / d**d * (4 / math.pi) ** s * math.sqrt(abs(disc))
        if self.minkowski > minkowski_cap:
            raise BoundTooLarge(f"Minkowski bound {self.minkowski:.1f} exceeds cap {minkowski_cap}")
        self.fb_primes = _linalg.primes_upto(int(self.minkowski))
        self.fb: list[PrimeIdeal] = []
        self.fb_of: dict[int, list[int]] = {}
        for q in self.fb_primes:
            ids = prime_ideals(self.order, q)
            self.fb_of[q] = list(range(len(self.fb), len(self.fb) + len(ids)))
            self.fb.extend(ids)
        self.relations: list[tuple[list[int], list[int]]] = []  # (element, valuation vector)
        self._seen: set[tuple[int, ...]] = set()
        for q in self.fb_primes:
            vec = [0] * len(self.fb)
            for i in self.fb_of[q]:
                vec[i] = self.fb[i].e
            self._add(self._scalar(q), vec)

    # -- relations ---------------------------------------------------------

    def _scalar(self, n: int) -> list[int]:
        return [n * v for v in self.order.one()]

    def _add(self, x: list[int], vec: list[int]) -> None:
        key = tuple(x)
        if key in self._seen or tuple(-v for v in x) in self._seen:
            return
        self._seen.add(key)
        self.relations.append((x, vec))

    def valuation_vector(self, x: Sequence[int]) -> list[int] | None:
        """Valuations of ``x`` over the factor base, or None if ``x`` is not smooth."""
        n = abs(self.order.norm(x))
        if n == 0:
            return None
        vec = [0] * len(self.fb)
        for q in self.fb_primes:
            if n % q:
                continue
            vq = 0
            while n % q == 0:
                n //= q
                vq += 1
            acc = 0
            for i in self.fb_of[q]:
                v = self.fb[i].valuation(self.order, x)
                vec[i] = v
                acc += v * self.fb[i].f
            if acc != vq:
                raise AssertionError("valuations inconsistent with the norm")
        return vec if n == 1 else None

    def _try(self, x: list[int]) -> bool:
        vec = self.valuation_vector(x)
        if vec is None:
            return False
        self._add(x, vec)
        return True

    def search(self, round_: int) -> None:
        """Harvest relations from small elements of ``O_F`` and of factor-base ideals."""
        d = self.d
        ident = [[int(i == j) for j in range(d)] for i in range(d)]
        scale = self.emb.gram(ident)
        base = min(scale[i][i] for i in range(d))
        bound = base * (d + 2.0) * (1.6**round_) * max(1.0, abs(self.disc)) ** (1.0 / d)
        limit = 60 * (round_ + 1) * max(1, len(self.fb))
        for x in _short_vectors(self.emb, ident, bound)[:limit]:
            self._try(x)
        per_prime = 8 * (round_ + 1)
        for p in self.fb:
            nb = bound * p.norm ** (2.0 / d)
            for x in _short_vectors(self.emb, p.lattice, nb)[:per_prime]:
                self._try(x)

    # -- linear algebra on the relation matrix ------------------------------

    def _linear_algebra(self):
        """``(H, T, K)``: echelon form ``H = T A`` of the relation matrix ``A`` and its integer kernel ``K``."""
        key = len(self.relations)
        if getattr(self, "_la_key", None) == key:
            return self._la
        n = len(self.fb)
        m = len(self.relations)
        aug = [list(vec) + [int(i == j) for j in range(m)] for i, (_, vec) in enumerate(self.relations)]
        h = _linalg.hnf(aug)
        H = [r[:n] for r in h if any(r[:n])]
        T = [r[n:] for r in h if any(r[:n])]
        K = [r[n:] for r in h if not any(r[:n])]
        self._la_key, self._la = key, (H, T, K)
        return self._la

    def relation_hnf(self) -> list[list[int]]:
        return self._linear_algebra()[0]

    def _full_rank(self) -> bool:
        return len(self.relation_hnf()) == len(self.fb)

    # -- precision management -------------------------------------------------

    @lru_cache(maxsize=16)
    def _embedder(self, bits: int) -> _Embedder:
        if bits <= self.emb.bits:
            return self.emb
        prof = isolate_roots(self.poly, bits)
        if any(abs(a.center - b.center) > mpmath.mpf(2) ** -40 for a, b in zip(prof.roots, self.profile.roots)):
            raise AssertionError("root order changed between precisions")
        return _Embedder(self.order, prof, max(bits, prof.working_bits))

    def _emb_at(self, bits: int) -> _Embedder:
        return self._embedder(max(self.emb.bits, -(-bits // 64) * 64))

    def _emb_for(self, *elts: Sequence[int]) -> _Embedder:
        """An embedder precise enough for elements with these (possibly large) coordinates."""
        size = max((abs(c).bit_length() for e in elts for c in e), default=0)
        return self._emb_at(self.bits + self.d * size + 32)

    def _compact_logs(self, exps: Sequence[int], extra_bits: int = 0) -> tuple[_Embedder, list]:
        """Complex logarithms at the places of ``prod x_j^exps_j`` over the relation elements."""
        emb = self._emb_at(self.bits + sum(abs(e) for e in exps).bit_length() + extra_bits)
        with mp.workprec(emb.bits):
            logs = [emb.complex_logs(self.relations[j][0]) for j, e in enumerate(exps) if e]
            coef = [e for e in exps if e]
            out = [mpmath.fsum(c * lg[p] for c, lg in zip(coef, logs)) for p in range(len(emb.places))]
        return emb, out

    def _compact_norm(self, exps: Sequence[int]) -> Fraction:
        out = Fraction(1)
        for j, e in enumerate(exps):
            if e:
                out *= Fraction(self.order.norm(self.relations[j][0])) ** e
        return out

    def _element_from_logs(self, logs: Sequence, extra_bits: int = 0) -> list[int] | None:
        """Round the element whose complex place logarithms are ``logs``."""
        mag = max((abs(float(mpmath.re(v))) for v in logs), default=0.0)
        emb = self._emb_at(self.bits + int(mag * 1.443 * self.d) + 64 + extra_bits)
        with mp.workprec(emb.bits):
            vals = []
            for p, lg in enumerate(logs):
                v = mpmath.exp(lg)
                if p < emb.r:
                    v = mpmath.mpc(mpmath.re(v), 0)
                vals.append(v)
        return emb.element_from_places(vals)

    def _compact_to_element(self, exps: Sequence[int]) -> list[int]:
        """Exact element ``prod x_j^exps_j`` (must be integral), checked against its exact norm."""
        target = self._compact_norm(exps)
        extra = 0
        for _ in range(5):
            _, logs = self._compact_logs(exps, extra)
            x = self._element_from_logs(logs, extra)
            if x is not None and Fraction(self.order.norm(x)) == target:
                return x
            extra = 2 * extra + 64
        raise CertificationFailed("could not reconstruct an element from its compact representation")

    def _log_rows(self, units: Sequence[Sequence[int]]) -> list[list]:
        return [self._emb_for(u).log_row(u) for u in units]

    # -- units -------------------------------------------------------------

    def _kernel_log_vectors(self):
        _, _, ker = self._linear_algebra()
        out = []
        for k in ker:
            emb, logs = self._compact_logs(k)
            with mp.workprec(emb.bits):
                out.append((k, [w * mpmath.re(v) for w, v in zip(emb.weights, logs)]))
        return out

    def _lattice_basis(self, vecs: list[tuple[list[int], list]], r_lower: float) -> list[list[int]] | None:
        """Exponent vectors (over relations) of a basis of the lattice spanned by ``vecs``."""
        k = self.unit_rank
        bits = self.emb.bits
        tol = mpmath.mpf(2) ** (-bits // 2)
        with mp.workprec(bits):
            live = [(ex, mpmath.matrix(v[:k])) for ex, v in vecs if mpmath.norm(mpmath.matrix(v)) > tol]
            if not live:
                return None
            live.sort(key=lambda t: mpmath.norm(t[1]))
            chosen: list[int] = []
            for idx, (_, v) in enumerate(live):
                trial = [live[i][1] for i in chosen] + [v]
                m = mpmath.matrix([[t[j] for j in range(k)] for t in trial])
                gram = m * m.T
                if abs(mpmath.det(gram)) > tol * max(1, mpmath.norm(gram)) ** len(trial):
                    chosen.append(idx)
                if len(chosen) == k:
                    break
            if len(chosen) < k:
                return None
            bmat = mpmath.matrix([[live[i][1][j] for j in range(k)] for i in chosen])
            # the chosen sublattice has index at most R_chosen / R_lower in the unit lattice
            max_den = max(1, int(abs(mpmath.det(bmat)) / r_lower) + 1)
            binv = mpmath.inverse(bmat)
            coords = []
            for ex, v in live:
                c = mpmath.matrix([[v[j] for j in range(k)]]) * binv
                row = []
                for j in range(k):
                    fr = _rationalize(c[0, j], max_den)
                    if fr is None:
                        raise CertificationFailed("unit log vectors are not commensurable at this precision")
                    row.append(fr)
                coords.append(row)
        den = 1
        for row in coords:
            for fr in row:
                den = den * fr.denominator // math.gcd(den, fr.denominator)
        m = len(live)
        aug = [[int(fr * den) for fr in row] + [int(i == j) for j in range(m)] for i, row in enumerate(coords)]
        h = _linalg.hnf(aug)
        basis_rows = [r[k:] for r in h if any(r[:k])]
        assert len(basis_rows) == k
        out = []
        for t in basis_rows:
            ex = [0] * len(self.relations)
            for ti, (exps, _) in zip(t, live):
                if ti:
                    for j, e in enumerate(exps):
                        ex[j] += ti * e
            out.append(ex)
        return out

    def _raw_units(self, r_lower: float) -> list[list[int]] | None:
        exps = self._lattice_basis(self._kernel_log_vectors(), r_lower)
        if exps is None:
            return None
        return [self._compact_to_element(e) for e in exps]

    def _reduce_units(self, units: list[list[int]]) -> list[list[int]]:
        """Size-reduce the unit basis in log space (exact updates)."""
        units = [list(u) for u in units]
        for _ in range(50):
            changed = False
            rows = self._log_rows(units)
            order = sorted(range(len(units)), key=lambda i: mpmath.norm(mpmath.matrix(rows[i])))
            units = [units[i] for i in order]
            rows = [rows[i] for i in order]
            for i in range(1, len(units)):
                for j in range(i):
                    a = mpmath.matrix(rows[i])
                    b = mpmath.matrix(rows[j])
                    mu = int(mpmath.nint((a.T * b)[0] / (b.T * b)[0]))
                    if mu:
                        units[i] = self.order.mul(units[i], _power(self.order, units[j], -mu))
                        rows[i] = self._log_rows([units[i]])[0]
                        changed = True
            if not changed:
                break
        out = []
        for u in units:
            # positive at the first real place
            if mpmath.re(self._emb_for(u).place_values(u)[0]) < 0:
                u = [-c for c in u]
            out.append(u)
        return out

    def _roots_from_logs(self, logs: Sequence, ell: int) -> Iterable[list[int]]:
        """Integral candidates ``x`` with ``x^ell`` equal to the element with place logs ``logs``."""
        r = self.signature[0]
        mag = max((abs(float(mpmath.re(v))) for v in logs), default=0.0) / ell
        emb = self._emb_at(self.bits + int(mag * 1.443 * self.d) + 64)
        with mp.workprec(emb.bits):
            choices = []
            for p, lg in enumerate(logs):
                if p < r:
                    negative = mpmath.cos(mpmath.im(lg)) < 0
                    root = mpmath.exp(mpmath.re(lg) / ell)
                    if ell % 2 == 1:
                        choices.append([-root if negative else root])
                    elif negative:
                        return
                    else:
                        choices.append([root, -root])
                else:
                    choices.append([mpmath.exp((lg + 2j * mpmath.pi * t) / ell) for t in range(ell)])
        for combo in itertools.product(*choices):
            cand = emb.element_from_places(list(combo))
            if cand is not None and any(cand):
                yield cand

    def _saturate(self, units: list[list[int]], r_lower: float) -> list[list[int]]:
        k = len(units)
        while True:
            reg = float(regulator_of(self._log_rows(units)))
            index_bound = int(reg / r_lower * (1 + 1e-9))
            improved = False
            for ell in _linalg.primes_upto(index_bound):
                found = self._ell_root(units, ell)
                if found is not None:
                    j, v = found
                    units = list(units)
                    units[j] = v
                    improved = True
                    break
            if not improved:
                return units
            units = self._reduce_units(units)
            assert len(units) == k

    def _unit_logs(self, units: Sequence[Sequence[int]], bits: int) -> list[list]:
        emb = self._emb_at(bits)
        sized = self._emb_for(*units)
        emb = emb if emb.bits >= sized.bits else sized
        return [emb.complex_logs(u) for u in units]

    def _ell_root(self, units: Sequence[Sequence[int]], ell: int):
        """A unit ``v`` and slot ``j`` with ``v^ell = +-prod u_i^a_i``, ``a_j = 1``; None if none exists."""
        k = len(units)
        ulogs = self._unit_logs(units, self.bits)
        for exps in itertools.product(range(ell), repeat=k):
            if not any(exps):
                continue
            lead = next(j for j, e in enumerate(exps) if e)
            if exps[lead] != 1:
                continue  # projective representatives only
            w = self.order.one()
            for u, e in zip(units, exps):
                if e:
                    w = self.order.mul(w, _power(self.order, u, e))
            with mp.workprec(self._emb_for(w).bits):
                base = [mpmath.fsum(e * ul[p] for e, ul in zip(exps, ulogs)) for p in range(len(ulogs[0]))]
            for sign in (1, -1):
                logs = base if sign == 1 else [v + 1j * mpmath.pi for v in base]
                target = [sign * c for c in w]
                for v in self._roots_from_logs(logs, ell):
                    if _power(self.order, v, ell) == target:
                        return lead, v
        return None

    def fundamental_units(self) -> UnitBasis:
        r_lower = self.bounds.lower_bound(self.signature, self.disc)
        units = None
        for rnd in range(MAX_SEARCH_ROUNDS):
            self.search(rnd)
            units = self._raw_units(r_lower)
            if units is not None:
                break
        if units is None:
            raise CertificationFailed("unit rank not reached within the search caps")
        units = self._reduce_units(units)
        units = self._saturate(units, r_lower)
        rows = self._log_rows(units)
        reg = regulator_of(rows)
        if not reg > r_lower:
            raise CertificationFailed(f"regulator {reg} not above proven lower bound {r_lower}")
        for u in units:
            if abs(self.order.norm(u)) != 1:
                raise AssertionError("generator is not a unit")
        return UnitBasis(
            rank=self.unit_rank,
            generators=tuple(tuple(u) for u in units),
            log_matrix=tuple(tuple(r) for r in rows),
        )

    # -- class group ---------------------------------------------------------

    def class_number(self, units: UnitBasis | None = None) -> int:
        units = units or self.fundamental_units()
        for rnd in range(MAX_SEARCH_ROUNDS * 4):
            if not self._full_rank():
                self.search(rnd)
                continue
            h = self.relation_hnf()
            cand = 1
            for i, row in enumerate(h):
                cand *= row[i]
            if cand == 1:
                return 1
            new_rel = self._certify_class_group(cand, units)
            if new_rel is None:
                return cand
            self._add(*new_rel)
        raise CertificationFailed("class number could not be certified")

    def _ideal_of(self, vec: Sequence[int]) -> list[list[int]]:
        d = self.d
        ideal = [[int(i == j) for j in range(d)] for i in range(d)]
        for i, e in enumerate(vec):
            for _ in range(e):
                ideal = _ideal_mul(self.order, ideal, self.fb[i].lattice)
        return ideal

    def _certify_class_group(self, cand: int, units: UnitBasis):
        """A relation missing from the relation lattice, or None once every prime-order class is non-principal.

        If the class of ``a`` (with ``ell a`` in the relation lattice) were
        principal, ``a = (x)``, then ``x^ell = y u`` where ``y`` is the known
        relation product with valuation ``ell a`` and ``u`` a unit, which may be
        taken modulo ``ell``-th powers.  All such roots are tried.
        """
        H, T, _ = self._linear_algebra()
        n = len(self.fb)
        for ell in _linalg.factorize(cand):
            scaled = [[ell * int(i == j) for j in range(n)] for i in range(n)]
            lat = _linalg.preimage(scaled, H, n)
            gens = _torsion_generators(lat, H)
            for combo in itertools.product(range(ell), repeat=len(gens)):
                if not any(combo):
                    continue
                if next(c for c in combo if c) != 1:
                    continue
                v = [sum(c * g[i] for c, g in zip(combo, gens)) for i in range(n)]
                v = _reduce_mod_hnf(v, H)
                s = _solve_upper(H, [ell * a for a in v])
                t = [sum(si * T[i][j] for i, si in enumerate(s)) for j in range(len(self.relations))]
                x = self._principal_by_roots(v, t, ell, units)
                if x is not None:
                    vec = self.valuation_vector(x)
                    assert vec == v
                    return x, vec
        return None

    def _principal_by_roots(self, v: Sequence[int], t: Sequence[int], ell: int, units: UnitBasis) -> list[int] | None:
        ideal = self._ideal_of(v)
        norm = _linalg.lattice_index(ideal)
        k = self.unit_rank
        gens = [list(u) for u in units.generators]
        emb, ylogs = self._compact_logs(t)
        ulogs = self._unit_logs(gens, emb.bits)
        with mp.workprec(emb.bits):
            # balance y by ell-th powers of units so the root has small coordinates
            weights = emb.weights
            total = mpmath.fsum(w * mpmath.re(lg) for w, lg in zip(weights, ylogs))
            dev = [w * (mpmath.re(lg) - total / self.d) for w, lg in zip(weights, ylogs)]
            umat = mpmath.matrix([[w * mpmath.re(ul[p]) for p, w in enumerate(weights)][:k] for ul in ulogs])
            coef = mpmath.matrix([dev[:k]]) * mpmath.inverse(umat)
            shift = [int(mpmath.nint(coef[0, i] / ell)) for i in range(k)]
            base = [ylogs[p] - ell * mpmath.fsum(m * ul[p] for m, ul in zip(shift, ulogs)) for p in range(len(ylogs))]
            for exps in itertools.product(range(ell), repeat=k):
                shifted = [base[p] + mpmath.fsum(e * ul[p] for e, ul in zip(exps, ulogs)) for p in range(len(base))]
                for sign in (0, 1):
                    logs = [lg + 1j * mpmath.pi * sign for lg in shifted]
                    for x in self._roots_from_logs(logs, ell):
                        if abs(self.order.norm(x)) == norm and all(
                            c.denominator == 1 for c in _linalg.solve_lower(ideal, x)
                        ):
                            return x
        return None


def _solve_upper(h: Sequence[Sequence[int]], w: Sequence[int]) -> list[int]:
    """Integer solution of ``s H = w`` for a square upper-triangular ``H``."""
    n = len(h)
    s = [0] * n
    for j in range(n):
        acc = w[j] - sum(s[i] * h[i][j] for i in range(j))
        if acc % h[j][j]:
            raise ArithmeticError("vector not in the row lattice")
        s[j] = acc // h[j][j]
    return s


def _reduce_mod_hnf(x: list[int], h: list[list[int]]) -> list[int]:
    x = list(x)
    for i, row in enumerate(h):
        q = x[i] // row[i]
        if q:
            x = [a - q * b for a, b in zip(x, row)]
    return x


def _torsion_generators(lat: list[list[int]], h: list[list[int]]) -> list[list[int]]:
    """Vectors whose classes form an ``F_ell`` basis of ``lat / <h>``."""
    current = [list(r) for r in h]
    size = abs(_linalg.det(current))
    gens: list[list[int]] = []
    for v in lat:
        trial = _linalg.hnf(current + [list(v)])
        t = abs(_linalg.det(trial))
        if t < size:
            gens.append(list(v))
            current, size = trial, t
    return gens


def _rationalize(x: mpmath.mpf, max_den: int) -> Fraction | None:
    fr = Fraction(str(mpmath.nstr(x, 60, strip_zeros=False))).limit_denominator(max_den)
    if abs(x - mpmath.mpf(fr.numerator) / fr.denominator) > mpmath.mpf(2) ** (-mp.prec // 2):
        return None
    return fr


# ---------------------------------------------------------------------------
# public operations


@lru_cache(maxsize=2048)
def field_arithmetic(poly: MonicIntPolynomial, bits: int = DEFAULT_BITS, minkowski_cap: float = DEFAULT_MINKOWSKI_CAP) -> FieldArithmetic:
    return FieldArithmetic(poly, bits=bits, minkowski_cap=minkowski_cap)


def _check_disc(basis: OrderBasis, cap: int) -> None:
    _, disc, _ = maximal_order(basis.poly)
    if abs(disc) > cap:
        raise BoundTooLarge(f"|disc| = {abs(disc)} exceeds the desk-scale cap {cap}")


def fundamental_units(max_order: OrderBasis, profile: EmbeddingProfile, *, disc_cap: int = DEFAULT_DISC_CAP) -> UnitBasis:
    """A certified fundamental system of units of the maximal order."""
    r, s = profile.signature
    if r + s - 1 < 1:
        raise ValueError("unit rank r+s-1 must be at least 1")
    _check_disc(max_order, disc_cap)
    return _cached_units(max_order.poly)


@lru_cache(maxsize=2048)
def _cached_units(poly: MonicIntPolynomial) -> UnitBasis:
    return field_arithmetic(poly).fundamental_units()


def class_number(max_order: OrderBasis, profile: EmbeddingProfile, *, disc_cap: int = DEFAULT_DISC_CAP, minkowski_cap: float = DEFAULT_MINKOWSKI_CAP) -> int:
    r, s = profile.signature
    if r + s - 1 < 1:
        raise ValueError("unit rank r+s-1 must be at least 1")
    _check_disc(max_order, disc_cap)
    fa = field_arithmetic(max_order.poly, DEFAULT_BITS, minkowski_cap)
    return fa.class_number(_cached_units(max_order.poly))


def class_regulator_data(max_order: OrderBasis, profile: EmbeddingProfile) -> ClassRegulatorData:
    units = fundamental_units(max_order, profile)
    h = class_number(max_order, profile)
    reg = float(units.regulator)
    return ClassRegulatorData(h=h, R=reg, hR=h * reg)


def hr_for_order(order: OrderBasis, max_data: ClassRegulatorData, cond: ConductorData) -> ClassRegulatorData:
    """``h R`` of a sub-order from the conductor formula.

    Only the product is meaningful.  The returned ``h`` is ``h(O_F)`` and the
    whole residue-unit factor is carried by ``R``; neither is claimed to be the
    class number or regulator of the sub-order.
    """
    if cond.conductor_index == 1:
        return max_data
    factor = Fraction(cond.unit_count_max, cond.unit_count_sub)
    reg = max_data.R * float(factor)
    return ClassRegulatorData(h=max_data.h, R=reg, hR=max_data.h * reg)
