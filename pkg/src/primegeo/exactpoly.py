"""Monic integer polynomials: discriminants, irreducibility, certified root isolation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import mpmath
from mpmath import iv, mp

from . import _linalg
from .errors import DegenerateInput, ReducibleInput

DEFAULT_PRECISION_CAP = 4096


@dataclass(frozen=True)
class MonicIntPolynomial:
    """``x^d + c_{d-1} x^{d-1} + ... + c_0`` with ``coefficients = (c_0, ..., c_{d-1})``."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))
        if not self.coefficients:
            raise ValueError("degree must be positive")

    @classmethod
    def from_high(cls, coeffs: Sequence[int]) -> "MonicIntPolynomial":
        """Build from ``[1, c_{d-1}, ..., c_0]`` (leading coefficient first)."""
        if coeffs[0] != 1:
            raise ValueError("polynomial is not monic")
        return cls(tuple(reversed(coeffs[1:])))

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def full(self) -> list[int]:
        """Low-to-high coefficient list including the leading 1."""
        return list(self.coefficients) + [1]

    def high(self) -> list[int]:
        return list(reversed(self.full()))

    def __call__(self, x):
        acc = 1
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def negated_argument(self) -> "MonicIntPolynomial":
        """Characteristic polynomial of ``-lambda``: ``(-1)^d p(-x)``."""
        d = self.degree
        return MonicIntPolynomial(tuple(c if (d - i) % 2 == 0 else -c for i, c in enumerate(self.coefficients)))

    def reciprocal(self) -> "MonicIntPolynomial":
        """Characteristic polynomial of ``1/lambda`` (requires ``c_0 = +-1``)."""
        c0 = self.coefficients[0]
        if abs(c0) != 1:
            raise ValueError("reciprocal polynomial is monic only for unit constant term")
        rev = list(reversed(self.full()))  # c_0 + ... ; leading is c_0
        return MonicIntPolynomial(tuple(c * c0 for c in rev[:-1]))

    def canonical_pm(self) -> "MonicIntPolynomial":
        """Representative of ``{p(x), (-1)^d p(-x)}``: lexicographically smaller coefficient vector."""
        other = self.negated_argument()
        return min(self, other, key=lambda q: q.high())

    def __str__(self) -> str:
        terms = []
        d = self.degree
        for k, c in zip(range(d, -1, -1), self.high()):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if k == 0:
                terms.append(f"{c:+d}")
            elif c == 1:
                terms.append(f"+{mono}")
            elif c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c:+d}*{mono}")
        s = "".join(terms)
        return s[1:] if s.startswith("+") else s


def _derivative(full: list[int]) -> list[int]:
    return [i * c for i, c in enumerate(full)][1:]


def resultant(f: Sequence[int], g: Sequence[int]) -> int:
    """Resultant of two integer polynomials given low-to-high, via the Sylvester determinant."""
    m, n = len(f) - 1, len(g) - 1
    if m < 0 or n < 0:
        return 0
    size = m + n
    if size == 0:
        return 1
    fh, gh = list(reversed(f)), list(reversed(g))
    rows = []
    for i in range(n):
        rows.append([0] * i + fh + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gh + [0] * (size - n - 1 - i))
    return _linalg.det(rows)


def discriminant(p: MonicIntPolynomial) -> int:
    d = p.degree
    full = p.full()
    res = resultant(full, _derivative(full))
    return (-1) ** (d * (d - 1) // 2) * res


def _divisors(n: int) -> list[int]:
    n = abs(n)
    divs = [1]
    for q, e in _linalg.factorize(n).items():
        divs = [a * q**k for a in divs for k in range(e + 1)]
    return divs


def has_integer_root(p: MonicIntPolynomial) -> bool:
    c0 = p.coefficients[0]
    if c0 == 0:
        return True
    return any(p(s * t) == 0 for t in _divisors(c0) for s in (1, -1))


def is_irreducible(p: MonicIntPolynomial) -> bool:
    """Irreducibility over Q.  Degree 3 uses the rational-root test."""
    d = p.degree
    if d == 1:
        return True
    if d in (2, 3):
        return not has_integer_root(p)
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(p.high(), x)
    _, factors = poly.factor_list()
    return len(factors) == 1 and factors[0][1] == 1


# ---------------------------------------------------------------------------
# certified root isolation


@dataclass(frozen=True)
class RootEnclosure:
    center: mpmath.mpc
    radius: mpmath.mpf
    is_real: bool

    def modulus_interval(self) -> tuple[mpmath.mpf, mpmath.mpf]:
        m = abs(self.center)
        return (max(m - self.radius, mpmath.mpf(0)), m + self.radius)


@dataclass(frozen=True)
class EmbeddingProfile:
    """Certified enclosures of all roots, sorted by modulus (descending).

    Complex roots appear in adjacent conjugate pairs, upper half-plane first.
    ``pair_of[i]`` is the index of the conjugate of root ``i`` (itself if real).
    """

    roots: tuple[RootEnclosure, ...]
    signature: tuple[int, int]
    log_moduli: tuple[mpmath.mpf, ...]
    precision_bits: int
    working_bits: int
    degenerate: bool = False
    pair_of: tuple[int, ...] = field(default=())

    @property
    def degree(self) -> int:
        return len(self.roots)

    @cached_property
    def real_log_moduli(self) -> list[mpmath.mpf]:
        return [lm for rt, lm in zip(self.roots, self.log_moduli) if rt.is_real]

    @cached_property
    def complex_log_moduli(self) -> list[mpmath.mpf]:
        """One log-modulus per conjugate pair, descending."""
        return [lm for rt, lm in zip(self.roots, self.log_moduli) if not rt.is_real and rt.center.imag > 0]

    def centers(self) -> list[mpmath.mpc]:
        return [r.center for r in self.roots]


def _smith_radii(centers: list, degree: int, coeffs_high: list[int], bits: int) -> list[mpmath.mpf]:
    """Upper bounds for the Smith inclusion radii ``d |p(z_i) / prod_{j != i}(z_i - z_j)|``."""
    out = []
    saved = iv.prec
    iv.prec = bits
    try:
        zs = [iv.mpc(iv.mpf(c.real), iv.mpf(c.imag)) for c in centers]
        for i, z in enumerate(zs):
            val = iv.mpc(0, 0)
            for c in coeffs_high:
                val = val * z + c
            den = iv.mpc(1, 0)
            for j, w in enumerate(zs):
                if j != i:
                    den = den * (z - w)
            mag_den = abs(den)
            if mag_den.a <= 0:
                out.append(mpmath.inf)
                continue
            bound = degree * abs(val) / mag_den
            out.append(mpmath.mpf(bound.b))
    finally:
        iv.prec = saved
    return out


def _approximate_roots(p: MonicIntPolynomial, bits: int) -> list[mpmath.mpc]:
    with mp.workprec(bits):
        try:
            roots = mpmath.polyroots(p.high(), maxsteps=100 + bits, extraprec=bits)
        except mpmath.libmp.NoConvergence:
            roots = mpmath.polyroots(p.high(), maxsteps=50 * (100 + bits), extraprec=2 * bits, error=False)
        return [mpmath.mpc(r) for r in roots]


def _symmetrize(approx: list[mpmath.mpc], bits: int) -> tuple[list[mpmath.mpc], list[bool]] | None:
    """Snap near-real approximations onto the real axis and pair the rest conjugately."""
    tol = mpmath.mpf(2) ** (-(bits // 2))
    reals, uppers, lowers = [], [], []
    for z in approx:
        if abs(z.imag) <= tol * max(1, abs(z)):
            reals.append(mpmath.mpc(z.real, 0))
        elif z.imag > 0:
            uppers.append(z)
        else:
            lowers.append(z)
    if len(uppers) != len(lowers):
        return None
    centers, is_real = [], []
    for z in reals:
        centers.append(z)
        is_real.append(True)
    for z in uppers:
        centers.append(z)
        centers.append(mpmath.conj(z))
        is_real.extend([False, False])
    return centers, is_real


def _is_binomial(p: MonicIntPolynomial) -> bool:
    return all(c == 0 for c in p.coefficients[1:])


def isolate_roots(
    p: MonicIntPolynomial,
    precision_bits: int = 128,
    *,
    cap_bits: int = DEFAULT_PRECISION_CAP,
) -> EmbeddingProfile:
    """Certified disjoint root enclosures with radii at most ``2**-precision_bits``.

    Working precision starts at 64 bits and doubles until the enclosures are
    disjoint, real/non-real status is decided, and every pair of non-conjugate
    moduli is strictly ordered.  Binomials ``x^d + c_0`` have all moduli equal;
    that tie is exact and the profile is returned flagged ``degenerate``.
    Any other unresolved tie at ``cap_bits`` raises :class:`DegenerateInput`.
    """
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    if discriminant(p) == 0:
        raise DegenerateInput(f"{p} has a repeated root")
    if not is_irreducible(p):
        raise ReducibleInput(f"{p} is reducible over Q")
    d = p.degree
    exact_tie = _is_binomial(p) and d > 1
    bits = 64
    target = mpmath.mpf(2) ** (-precision_bits)
    last_problem = "no attempt"
    while bits <= cap_bits:
        work = max(bits, precision_bits + 32)
        with mp.workprec(work):
            sym = _symmetrize(_approximate_roots(p, work), work)
        if sym is None:
            last_problem = "could not pair complex roots"
            bits *= 2
            continue
        centers, is_real = sym
        radii = _smith_radii(centers, d, p.high(), work + 16)
        ok = all(r <= target for r in radii)
        if ok:
            ok = _disjoint(centers, radii) and _realness_certified(centers, radii, is_real)
            if not ok:
                last_problem = "enclosures overlap"
        else:
            last_problem = "radii above target"
        if ok:
            order = _modulus_order(centers, radii, is_real, exact_tie)
            if order is None:
                last_problem = "moduli of non-conjugate roots not separated"
            else:
                return _build_profile(centers, radii, is_real, order, precision_bits, work, exact_tie)
        bits *= 2
    raise DegenerateInput(f"{p}: {last_problem} at {cap_bits} bits")


def _disjoint(centers, radii) -> bool:
    n = len(centers)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(centers[i] - centers[j]) <= radii[i] + radii[j]:
                return False
    return True


def _realness_certified(centers, radii, is_real) -> bool:
    # real centres give conjugation-symmetric disks; non-real disks must miss the axis
    return all(real or abs(c.imag) > r for c, r, real in zip(centers, radii, is_real))


def _conjugate_partner(centers, is_real) -> list[int]:
    partner = list(range(len(centers)))
    for i, (c, real) in enumerate(zip(centers, is_real)):
        if not real and c.imag > 0:
            partner[i] = i + 1
            partner[i + 1] = i
    return partner


def _modulus_order(centers, radii, is_real, exact_tie: bool) -> list[int] | None:
    n = len(centers)
    partner = _conjugate_partner(centers, is_real)
    ivals = [(abs(c) - r, abs(c) + r) for c, r in zip(centers, radii)]
    if not exact_tie:
        for i in range(n):
            for j in range(i + 1, n):
                if partner[i] == j:
                    continue
                if not (ivals[i][1] < ivals[j][0] or ivals[j][1] < ivals[i][0]):
                    return None
    # descending modulus; within a conjugate pair, upper half-plane first; ties by realness
    return sorted(range(n), key=lambda i: (-abs(centers[i]), not is_real[i], -centers[i].imag))


def _build_profile(centers, radii, is_real, order, precision_bits, work, exact_tie) -> EmbeddingProfile:
    with mp.workprec(work):
        roots = tuple(RootEnclosure(centers[i], radii[i], is_real[i]) for i in order)
        logs = tuple(mpmath.log(abs(r.center)) for r in roots)
    real_count = sum(1 for r in roots if r.is_real)
    pos = {i: k for k, i in enumerate(order)}
    partner = _conjugate_partner(centers, is_real)
    pair_of = tuple(pos[partner[i]] for i in order)
    return EmbeddingProfile(
        roots=roots,
        signature=(real_count, (len(roots) - real_count) // 2),
        log_moduli=logs,
        precision_bits=precision_bits,
        working_bits=work,
        degenerate=exact_tie,
        pair_of=pair_of,
    )


def multiplicity_in_field(p: MonicIntPolynomial) -> int:
    """Number of roots of ``p`` lying in ``Q[x]/(p)``: ``d`` if Galois, else 1."""
    d = p.degree
    from . import orderfield

    if d == 3:
        _, disc_field, _ = orderfield.maximal_order(p)
        return 3 if disc_field > 0 and math.isqrt(disc_field) ** 2 == disc_field else 1
    field_ = orderfield.NumberField(p)
    return len(field_.roots_in_field(p))
