"""Chamber-side quantities for units of degree-``d`` fields viewed as geodesics of SL_d.

The alpha coordinates follow the signature-dependent formulas: complex places
first (ordered by modulus), then real places (ordered by modulus), with
weights ``2k(d-2k)``, ``2rs`` and ``(k+s)(r+s-k)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath

from .errors import DimensionMismatch, WallDegeneracy
from .exactpoly import EmbeddingProfile


class Convention(enum.Enum):
    LINEAR = "linear"  # alpha_k <= T_k
    MULTIPLICATIVE = "multiplicative"  # exp(alpha_k) <= T_k

    @classmethod
    def parse(cls, value: "str | Convention") -> "Convention":
        if isinstance(value, Convention):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown box convention {value!r}; use 'linear' or 'multiplicative'") from None


@dataclass(frozen=True)
class AlphaVector:
    values: tuple[float, ...]
    signature: tuple[int, int]
    degree: int

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("alpha values must be finite")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class BoxSpec:
    thresholds: tuple[float, ...]
    convention: Convention

    def __post_init__(self) -> None:
        if not self.thresholds or any(not t > 0 for t in self.thresholds):
            raise ValueError("box thresholds must be positive")
        object.__setattr__(self, "convention", Convention.parse(self.convention))
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))

    def alpha_limits(self) -> tuple[float, ...]:
        """Upper limits on the alpha coordinates themselves."""
        if self.convention is Convention.LINEAR:
            return self.thresholds
        return tuple(math.log(t) for t in self.thresholds)

    @property
    def volume(self) -> float:
        return math.prod(self.thresholds)


@dataclass(frozen=True)
class GeodesicRecord:
    log_moduli: tuple[float, ...]  # descending
    flat_volume: float
    alpha: AlphaVector
    index_weight: float
    multiplicity: int = 1

    def __post_init__(self) -> None:
        if not self.flat_volume > 0:
            raise ValueError("flat volume must be positive")
        if not self.index_weight > 0:
            raise ValueError("ind(gamma) must be positive")


# ---------------------------------------------------------------------------
# alpha coordinates


def alpha_weights(signature: tuple[int, int]) -> list[int]:
    r, s = signature
    d = r + 2 * s
    w = [2 * k * (d - 2 * k) for k in range(1, s)]
    if s > 0 and r > 0:
        w.append(2 * r * s)
    w.extend((k + s) * (r + s - k) for k in range(s + 1, r + s))
    return w


def alpha_from_logs(
    complex_logs: Sequence[float], real_logs: Sequence[float], signature: tuple[int, int]
) -> tuple[float, ...]:
    """Alpha coordinates from per-place log-moduli (each block sorted descending)."""
    r, s = signature
    if len(complex_logs) != s or len(real_logs) != r:
        raise DimensionMismatch("log-moduli do not match the signature")
    sig = [float(v) for v in complex_logs]
    rho = [float(v) for v in real_logs]
    w = alpha_weights(signature)
    diffs = [sig[k] - sig[k + 1] for k in range(s - 1)]
    if s > 0 and r > 0:
        diffs.append(sig[s - 1] - rho[0])
    diffs.extend(rho[k] - rho[k + 1] for k in range(r - 1))
    return tuple(wk * dk for wk, dk in zip(w, diffs))


def alpha_coords(profile: EmbeddingProfile) -> AlphaVector:
    r, s = profile.signature
    vals = alpha_from_logs(profile.complex_log_moduli, profile.real_log_moduli, profile.signature)
    return AlphaVector(vals, (r, s), profile.degree)


def in_box(alpha: AlphaVector | Sequence[float], box: BoxSpec) -> bool:
    values = alpha.values if isinstance(alpha, AlphaVector) else tuple(alpha)
    limits = box.alpha_limits()
    if len(values) != len(limits):
        raise DimensionMismatch(f"alpha has {len(values)} coordinates, box has {len(limits)}")
    return all(0 < a <= t for a, t in zip(values, limits))


# ---------------------------------------------------------------------------
# det(1 - Ad | n), ind(gamma), c


def det_one_minus_ad_n(roots: EmbeddingProfile | Sequence[complex], *, tol: float = 1e-12) -> float:
    """``prod (1 - mu_i / mu_j)`` over root pairs with ``|mu_i| < |mu_j|``.

    Conjugate pairs (equal modulus) are skipped; any other modulus tie is a wall.
    Accepts a certified profile or a plain list of roots (then ties are judged
    with relative tolerance ``tol``).
    """
    if isinstance(roots, EmbeddingProfile):
        if roots.degenerate:
            raise WallDegeneracy("certified modulus tie between non-conjugate roots")
        prof = roots
        with mpmath.workprec(prof.working_bits):
            mus = [rt.center for rt in prof.roots]
            # certified descending order: i > j means |mu_i| < |mu_j| unless conjugate
            acc = mpmath.mpc(1)
            for i in range(len(mus)):
                for j in range(i):
                    if prof.pair_of[i] != j:
                        acc *= 1 - mus[i] / mus[j]
            if abs(mpmath.im(acc)) > mpmath.mpf(2) ** (-prof.precision_bits // 2) * max(1, abs(acc)):
                raise AssertionError("det(1 - Ad) has a non-negligible imaginary part")
            return float(mpmath.re(acc))
    mus = [complex(m) for m in roots]
    n = len(mus)
    acc = complex(1)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            mi, mj = abs(mus[i]), abs(mus[j])
            if abs(mi - mj) <= tol * max(mi, mj):
                if abs(mus[i] - mus[j].conjugate()) <= tol * max(mi, mj, 1.0):
                    continue
                raise WallDegeneracy("two non-conjugate roots share a modulus")
            if mi < mj:
                acc *= 1 - mus[i] / mus[j]
    return acc.real


def index_weight(flat_volume: float, roots: EmbeddingProfile | Sequence[complex]) -> float:
    """``ind(gamma) = lambda_gamma / det(1 - a_gamma t_gamma | n)``."""
    if not flat_volume > 0:
        raise ValueError("flat volume must be positive")
    det = det_one_minus_ad_n(roots)
    if det == 0:
        raise ZeroDivisionError("det(1 - Ad|n) vanished")
    return flat_volume / det


def constant_c(signature: tuple[int, int], d: int) -> tuple[float, float]:
    """The asymptotic constant ``c`` and the theta target ``c / sqrt(r+s)``."""
    r, s = signature
    if r + 2 * s != d:
        raise DimensionMismatch("d must equal r + 2s")
    if d < 3 or any(d % p == 0 for p in range(2, int(d**0.5) + 1)):
        raise ValueError("d must be a prime >= 3")
    prod = 1
    for k in range(1, s):
        prod *= 4 * k * (d - 2 * k)
    if r * s != 0:
        prod *= 4 * r * s
    for k in range(s + 1, r + s):
        prod *= 2 * (k + s) * (r + s - k)
    # (sqrt 2)^e with the even part of e applied as an exact power of two
    e = 1 - r - s
    c = prod * 2.0 ** (e // 2) * (math.sqrt(2) if e % 2 else 1.0)
    return c, c / math.sqrt(r + s)


# ---------------------------------------------------------------------------
# Psi


def psi(records: Iterable[GeodesicRecord], box: BoxSpec) -> float:
    """Sum of ``flat_volume * multiplicity`` over records inside the box."""
    total = 0.0
    for rec in records:
        if in_box(rec.alpha, box):
            total += rec.flat_volume * rec.multiplicity
    return total
