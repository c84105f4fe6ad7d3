"""Partial sums of the multi-variable Dirichlet series ``L^j(s)`` and its leading pole.

The chamber coordinates ``l_k`` are identified with the unit alpha coordinates
``alpha_k``; any normalisation constant between the two is absorbed in ``c``.
On the negative chamber ``a^{alpha_k} = exp(-alpha_k)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .chamber import GeodesicRecord
from .errors import DimensionMismatch, DivergenceWarning, PoleHit


@dataclass(frozen=True)
class SeriesPoint:
    s: tuple[complex, ...]
    j: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", tuple(complex(v) for v in self.s))
        if self.j < 0:
            raise ValueError("smoothing order j must be non-negative")

    @property
    def rank(self) -> int:
        return len(self.s)


def _check_convergent(point: SeriesPoint) -> None:
    bad = [v for v in point.s if not v.real > 1]
    if bad:
        raise DivergenceWarning(f"series diverges outside Re(s_k) > 1; got {bad}")


def term(record: GeodesicRecord, point: SeriesPoint) -> complex:
    """One summand: ``ind * (prod alpha)^(j+1) * exp(-s . alpha) * multiplicity``."""
    alpha = record.alpha.values
    if len(alpha) != point.rank:
        raise DimensionMismatch(f"record has {len(alpha)} alpha coordinates, point has {point.rank}")
    poly = math.prod(alpha) ** (point.j + 1)
    expo = cmath.exp(-sum(sk * ak for sk, ak in zip(point.s, alpha)))
    return record.index_weight * poly * expo * record.multiplicity


def partial_L(records: Iterable[GeodesicRecord], point: SeriesPoint) -> complex:
    """Finite sum of the series over the supplied records (no extrapolation)."""
    _check_convergent(point)
    total = 0j
    for rec in records:
        total += term(rec, point)
    return total


def leading_term(point: SeriesPoint, q_M: int) -> complex:
    """``q_M ((j+1)!)^r / prod (s_k - 1)^(j+2)``: the pole part at ``s = (1, ..., 1)``."""
    denom = 1 + 0j
    for v in point.s:
        if v == 1:
            raise PoleHit("s_k = 1 is the pole of the series")
        denom *= (v - 1) ** (point.j + 2)
    return q_M * math.factorial(point.j + 1) ** point.rank / denom


def rescaled_partial(records: Sequence[GeodesicRecord], point: SeriesPoint) -> complex:
    """Partial sum divided by the leading term with ``q_M = 1``; tends to the pole coefficient."""
    return partial_L(records, point) / leading_term(point, 1)


def q_M_minimal_parabolic(d: int) -> tuple[int, int]:
    """``(q_M, q_M^0)`` for the minimal parabolic of split SL_d.

    ``M`` is finite there, so ``p_M = 0`` and only the ``p = 0`` term of the
    alternating sum survives.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    dim_p_M = 0
    q_M = sum((-1) ** p * math.comb(dim_p_M, p) for p in range(dim_p_M + 1))
    q_M0 = q_M
    assert q_M >= q_M0 > 0
    return q_M, q_M0
