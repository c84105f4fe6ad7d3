"""Floating-point LLL and Fincke-Pohst enumeration on Gram matrices (small dimension)."""

from __future__ import annotations

import math
from typing import Iterator, Sequence


def lll_gram(gram: Sequence[Sequence[float]], delta: float = 0.99) -> list[list[int]]:
    """LLL-reduce the lattice with Gram matrix ``gram``; returns the unimodular transform rows."""
    n = len(gram)
    g = [list(map(float, r)) for r in gram]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def inner(i: int, j: int) -> float:
        return g[i][j]

    def swap(i: int, j: int) -> None:
        g[i], g[j] = g[j], g[i]
        for r in g:
            r[i], r[j] = r[j], r[i]
        u[i], u[j] = u[j], u[i]

    def sub(i: int, j: int, k: int) -> None:
        # b_i -= k b_j
        for t in range(n):
            g[i][t] -= k * g[j][t]
        for t in range(n):
            g[t][i] -= k * g[t][j]
        u[i] = [a - k * b for a, b in zip(u[i], u[j])]

    def gso():
        mu = [[0.0] * n for _ in range(n)]
        bstar = [0.0] * n
        for i in range(n):
            for j in range(i):
                s = inner(i, j) - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))
                mu[i][j] = s / bstar[j] if bstar[j] else 0.0
            bstar[i] = inner(i, i) - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
        return mu, bstar

    k = 1
    guard = 0
    while k < n and guard < 10000:
        guard += 1
        mu, bstar = gso()
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                sub(k, j, q)
                mu, bstar = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            k = max(k - 1, 1)
    return u


def cholesky_q(gram: Sequence[Sequence[float]]) -> list[list[float]]:
    """Quadratic-form decomposition ``Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2``."""
    n = len(gram)
    q = [list(map(float, r)) for r in gram]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def fincke_pohst(gram: Sequence[Sequence[float]], bound: float) -> Iterator[list[int]]:
    """Nonzero integer vectors ``x`` with ``x G x^T <= bound``, one of each ``+-x`` pair."""
    n = len(gram)
    q = cholesky_q(gram)
    x = [0] * n
    slack = 1e-9 * max(1.0, bound)

    def rec(i: int, remaining: float) -> Iterator[list[int]]:
        c = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        if remaining < -slack:
            return
        r = math.sqrt(max(remaining, 0.0) / q[i][i]) if q[i][i] > 0 else 0.0
        lo, hi = math.ceil(c - r - 1e-9), math.floor(c + r + 1e-9)
        for v in range(lo, hi + 1):
            x[i] = v
            rest = remaining - q[i][i] * (v - c) ** 2
            if i == 0:
                if rest >= -slack:
                    yield list(x)
            else:
                yield from rec(i - 1, rest)
        x[i] = 0

    for vec in rec(n - 1, bound):
        if not any(vec):
            continue
        first = next(v for v in reversed(vec) if v)
        if first > 0:
            yield vec
