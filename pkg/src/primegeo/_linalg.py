"""Exact integer and finite-field linear algebra used by the order and class-group code.

Matrices are plain lists of row lists.  Lattices are always row lattices.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[int]]


def _round_div(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1
    return q


def hnf(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row Hermite normal form with pivots moving left to right.

    Zero rows are dropped.  Pivots are positive and entries above a pivot are
    reduced into ``[0, pivot)``.
    """
    work = [list(r) for r in rows if any(r)]
    if not work:
        return []
    ncols = len(work[0])
    out: Matrix = []
    for c in range(ncols):
        live = [r for r in work if r[c] != 0]
        rest = [r for r in work if r[c] == 0]
        if not live:
            continue
        # Euclid on the column with the smallest entry as pivot; this keeps
        # coefficient growth far below pairwise xgcd combination.
        while len(live) > 1:
            live.sort(key=lambda r: (abs(r[c]), sum(map(abs, r))))
            pivot = live[0]
            pc = pivot[c]
            nxt = [pivot]
            for other in live[1:]:
                q = _round_div(other[c], pc)
                reduced = [u - q * v for u, v in zip(other, pivot)] if q else other
                if reduced[c]:
                    nxt.append(reduced)
                elif any(reduced):
                    rest.append(reduced)
            live = nxt
        pivot = live[0]
        if pivot[c] < 0:
            pivot = [-v for v in pivot]
        for prev in out:
            q = prev[c] // pivot[c]
            if q:
                for k in range(ncols):
                    prev[k] -= q * pivot[k]
        out.append(pivot)
        work = [r for r in rest if any(r)]
        if not work:
            break
    return out


def hnf_lower(rows: Sequence[Sequence[int]], n: int) -> Matrix:
    """Full-rank lattice in ``Z^n`` as an ``n x n`` lower-triangular HNF.

    Row ``i`` has its positive pivot in column ``i`` and zeros to the right;
    entries left of a pivot are reduced modulo that column's pivot.
    """
    rev = [list(reversed(r)) for r in rows]
    h = hnf(rev)
    if len(h) != n:
        raise ValueError("lattice is not of full rank")
    return [list(reversed(r)) for r in reversed(h)]


def kernel(rows: Sequence[Sequence[int]]) -> Matrix:
    """Basis of ``{x in Z^n : x A = 0}`` for the ``n x m`` integer matrix ``A``."""
    n = len(rows)
    if n == 0:
        return []
    m = len(rows[0])
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    h = hnf(aug)
    return [r[m:] for r in h if not any(r[:m])]


def det(mat: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in mat]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def solve_lower(basis: Sequence[Sequence[int]], v: Sequence[int | Fraction]) -> list[Fraction]:
    """Solve ``x . L = v`` for a lower-triangular full-rank ``L``."""
    n = len(basis)
    x = [Fraction(0)] * n
    for j in range(n - 1, -1, -1):
        acc = Fraction(v[j])
        for i in range(j + 1, n):
            if basis[i][j]:
                acc -= x[i] * basis[i][j]
        x[j] = acc / basis[j][j]
    return x


def in_lattice(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    return all(c.denominator == 1 for c in solve_lower(basis, v))


def lattice_index(basis: Sequence[Sequence[int]]) -> int:
    """Index in ``Z^n`` of a lower-triangular full-rank lattice."""
    out = 1
    for i, r in enumerate(basis):
        out *= r[i]
    return abs(out)


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, col)) for col in bt] for r in a]


def lattice_intersection(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], n: int) -> Matrix:
    """Intersection of two full-rank sublattices of ``Z^n``."""
    # x a = y b  <=>  (x, -y) in kernel of [a; b]
    ker = kernel([list(r) for r in a] + [list(r) for r in b])
    pts = [[sum(k[i] * a[i][c] for i in range(len(a))) for c in range(n)] for k in ker]
    return hnf_lower(pts, n)


def preimage(mat: Sequence[Sequence[int]], target: Sequence[Sequence[int]], n: int) -> Matrix:
    """``{x in Z^n : x M in L}`` for an integer matrix ``M`` and full-rank lattice ``L``."""
    # (x, z) with x M - z L = 0
    ker = kernel([list(r) for r in mat] + [[-v for v in r] for r in target])
    return hnf_lower([k[:n] for k in ker], n)


# ---------------------------------------------------------------------------
# arithmetic modulo a prime


def rref_mod(rows: Sequence[Sequence[int]], q: int) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over ``F_q``; returns (nonzero rows, pivot columns)."""
    a = [[v % q for v in r] for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: list[int] = []
    rank = 0
    for c in range(ncols):
        sel = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if sel is None:
            continue
        a[rank], a[sel] = a[sel], a[rank]
        inv = pow(a[rank][c], -1, q)
        a[rank] = [v * inv % q for v in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c]:
                f = a[i][c]
                a[i] = [(u - f * v) % q for u, v in zip(a[i], a[rank])]
        pivots.append(c)
        rank += 1
        if rank == len(a):
            break
    return a[:rank], pivots


def left_nullspace_mod(rows: Sequence[Sequence[int]], q: int) -> Matrix:
    """Basis of ``{x in F_q^n : x A = 0}``."""
    n = len(rows)
    if n == 0:
        return []
    m = len(rows[0])
    aug = [[v % q for v in r] + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    red, _ = rref_mod(aug, q)
    return [r[m:] for r in red if not any(r[:m])]


def span_mod(rows: Sequence[Sequence[int]], q: int) -> Matrix:
    return rref_mod(rows, q)[0]


def rank_mod(rows: Sequence[Sequence[int]], q: int) -> int:
    return len(rref_mod(rows, q)[0])


def in_span_mod(basis_rref: Sequence[Sequence[int]], v: Sequence[int], q: int) -> bool:
    return rank_mod(list(basis_rref) + [list(v)], q) == len(basis_rref)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorisation; inputs here stay at desk scale."""
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, v in enumerate(sieve) if v]


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g
