"""Enumeration driver: units inside a box, their fields and orders, and theta_S.

A unit ``lambda`` of an order is found through its characteristic polynomial.
The box bounds every log-modulus of its roots, hence every elementary
symmetric function, which turns the search into a finite sweep over integer
coefficient vectors with constant term ``+-1``.

For each field in ``C(S)`` (every prime of ``S`` non-decomposed) and each unit
element ``lambda`` of its maximal order found by the sweep, every order
``O`` with ``Z[lambda] <= O <= O_F`` and index prime to ``S`` is listed; the
order then contributes ``v_O(T) h(O) R(O) lambda_S``.

Cache format (JSON lines, append-only).  The first line is a header::

    {"schema": "primegeo.harvest", "version": 1, "d": 3, "signature": [1, 1], "S": [2, 3], "precision_bits": 128}

followed by records, one per line, in the order they were computed::

    {"kind": "unit", "poly": [1, a, b, c], "log_moduli": [...], "alpha": [...], "det": x}
    {"kind": "field", "poly": [1, a, b, c], "disc": D, "status": "ok", "h": h, "R": R}
    {"kind": "field", "poly": [1, a, b, c], "disc": D, "status": "skipped", "reason": "..."}
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import os
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from filelock import FileLock

from . import _linalg
from .chamber import AlphaVector, BoxSpec, GeodesicRecord, alpha_coords, alpha_weights, constant_c, det_one_minus_ad_n, in_box
from .errors import ConfigError, PrimeGeoError, SchemaMismatch
from .exactpoly import MonicIntPolynomial, is_irreducible, isolate_roots
from .orderfield import (
    NumberField,
    Order,
    maximal_order,
    order_from_lattice,
    residue_unit_counts,
    splitting_type,
    suborder_lattices,
)
from .unitlattice import ClassRegulatorData, class_regulator_data, hr_for_order

log = logging.getLogger(__name__)

CACHE_SCHEMA = "primegeo.harvest"
CACHE_VERSION = 1
CSV_FIXED_COLUMNS = ("theta", "ratio", "target", "skipped_mass")


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Caps:
    index_cap: int = 10**4
    conductor_cap: int = 10**6
    minkowski_cap: float = 5000.0
    disc_cap: int = 10**6


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class SweepConfig:
    d: int
    signature: tuple[int, int]
    S: tuple[int, ...]
    box: BoxSpec
    precision_bits: int = 128
    caps: Caps = field(default_factory=Caps)
    shards: int = 1
    cache_path: str | None = None

    def __post_init__(self) -> None:
        r, s = self.signature
        object.__setattr__(self, "signature", (int(r), int(s)))
        object.__setattr__(self, "S", tuple(sorted(set(int(p) for p in self.S))))
        if not _is_prime(self.d) or self.d < 3:
            raise ConfigError("d must be a prime >= 3")
        if r + 2 * s != self.d:
            raise ConfigError("signature must satisfy d = r + 2s")
        if len(self.S) < 2 or not all(_is_prime(p) for p in self.S):
            raise ConfigError("S must contain at least two primes")
        if len(self.box.thresholds) != r + s - 1:
            raise ConfigError(f"box needs {r + s - 1} thresholds for signature {self.signature}")
        if self.shards < 1:
            raise ConfigError("shard count must be positive")

    @property
    def rank(self) -> int:
        return sum(self.signature) - 1


# ---------------------------------------------------------------------------
# coefficient bounds


@dataclass(frozen=True)
class CoefficientRanges:
    """Bounds ``|e_k| <= bounds[k-1]`` on elementary symmetric functions of the roots."""

    bounds: tuple[int, ...]  # e_1 .. e_{d-1}
    lmax: float  # largest possible log-modulus of a root
    lmin: float  # smallest possible log-modulus of a root

    def coefficient_ranges(self) -> list[range]:
        """Ranges for the polynomial coefficients ``c_{d-1}, ..., c_1`` (high to low)."""
        return [range(-b, b + 1) for b in self.bounds]


def _alpha_to_logs(signature: tuple[int, int]) -> np.ndarray:
    """Matrix sending ``(alpha_1..alpha_{r+s-1}, 0)`` to per-place log-moduli (complex first)."""
    r, s = signature
    n = r + s
    w = alpha_weights(signature)
    rows = []
    # alpha rows expressed in place log coordinates
    for k in range(s - 1):
        row = [0.0] * n
        row[k], row[k + 1] = w[k], -w[k]
        rows.append(row)
    idx = s - 1
    if s > 0 and r > 0:
        row = [0.0] * n
        row[s - 1], row[s] = w[idx], -w[idx]
        rows.append(row)
        idx += 1
    for k in range(r - 1):
        row = [0.0] * n
        row[s + k], row[s + k + 1] = w[idx], -w[idx]
        rows.append(row)
        idx += 1
    rows.append([2.0] * s + [1.0] * r)  # zero log-sum of the norm
    return np.linalg.inv(np.array(rows))


def coefficient_bounds(config: SweepConfig) -> CoefficientRanges:
    """Provable coefficient ranges for units with alpha in the box.

    The box in alpha space maps linearly onto the log-moduli.  Each bound
    ``|e_k| <= e_k(|roots|)`` is a sum of exponentials of linear forms, hence
    convex, so its maximum over the box is attained at a vertex.
    """
    r, s = config.signature
    d = config.d
    limits = config.box.alpha_limits()
    inv = _alpha_to_logs(config.signature)
    best = [0.0] * (d + 1)
    lmax, lmin = -math.inf, math.inf
    for corner in itertools.product(*[(0.0, float(t)) for t in limits]):
        logs = inv @ np.array(list(corner) + [0.0])
        moduli = [math.exp(v) for v in logs[:s] for _ in range(2)] + [math.exp(v) for v in logs[s:]]
        lmax = max(lmax, float(max(logs)))
        lmin = min(lmin, float(min(logs)))
        # elementary symmetric functions of the moduli
        e = [1.0] + [0.0] * d
        for m in moduli:
            for k in range(d, 0, -1):
                e[k] += e[k - 1] * m
        best = [max(a, b) for a, b in zip(best, e)]
    bounds = tuple(int(math.floor(b * (1 + 1e-9) + 1e-9)) for b in best[1:d])
    return CoefficientRanges(bounds, lmax, lmin)


def candidate_polynomials(config: SweepConfig, ranges: CoefficientRanges | None = None, shard: int = 0) -> Iterator[MonicIntPolynomial]:
    """Canonical (under ``lambda ~ -lambda``) norm-``+-1`` polynomials inside the ranges."""
    ranges = ranges or coefficient_bounds(config)
    rs = ranges.coefficient_ranges()
    top = list(rs[0])
    per = -(-len(top) // config.shards)
    mine = top[shard * per : (shard + 1) * per]
    for c_top in mine:
        for rest in itertools.product(*rs[1:]):
            for c0 in (1, -1):
                p = MonicIntPolynomial.from_high([1, c_top, *rest, c0])
                if p == p.canonical_pm():
                    yield p


# ---------------------------------------------------------------------------
# screening of single polynomials


@dataclass(frozen=True)
class UnitCandidate:
    poly: tuple[int, ...]  # high-to-low coefficients
    log_moduli: tuple[float, ...]
    alpha: tuple[float, ...]
    det: float

    @property
    def polynomial(self) -> MonicIntPolynomial:
        return MonicIntPolynomial.from_high(self.poly)


@dataclass(frozen=True)
class Skip:
    poly: tuple[int, ...]
    reason: str
    mass: int = 1


def _approx_rejects(p: MonicIntPolynomial, config: SweepConfig) -> bool:
    """Cheap floating-point rejection; only clear-cut cases are rejected."""
    roots = np.roots(p.high())
    r, s = config.signature
    scale = np.maximum(1.0, np.abs(roots))
    imag = np.abs(roots.imag) / scale
    n_real = int(np.sum(imag < 1e-9))
    n_cplx = int(np.sum(imag > 1e-6))
    if n_real + n_cplx == len(roots) and n_real != r:
        return True
    if n_real + n_cplx != len(roots):
        return False
    reals = sorted((float(np.log(abs(z))) for z in roots if abs(z.imag) / max(1.0, abs(z)) < 1e-9), reverse=True)
    cplx = sorted((float(np.log(abs(z))) for z in roots if z.imag > 0 and abs(z.imag) / max(1.0, abs(z)) > 1e-6), reverse=True)
    if len(cplx) != s or any(not math.isfinite(v) for v in reals + cplx):
        return False
    from .chamber import alpha_from_logs

    alpha = alpha_from_logs(cplx, reals, config.signature)
    limits = config.box.alpha_limits()
    return any(a < -1e-7 or a > t + 1e-7 for a, t in zip(alpha, limits))


def screen(p: MonicIntPolynomial, config: SweepConfig) -> UnitCandidate | Skip | None:
    """Certified test of one polynomial: a unit inside the box, a skip, or None (rejected)."""
    if _approx_rejects(p, config):
        return None
    if not is_irreducible(p):
        return None
    try:
        prof = isolate_roots(p, config.precision_bits)
    except PrimeGeoError as exc:
        return Skip(tuple(p.high()), f"roots:{type(exc).__name__}")
    if prof.signature != config.signature:
        return None
    alpha = alpha_coords(prof)
    if not in_box(alpha, config.box):
        return None
    try:
        det = det_one_minus_ad_n(prof)
    except PrimeGeoError as exc:
        return Skip(tuple(p.high()), f"det:{type(exc).__name__}")
    return UnitCandidate(
        poly=tuple(p.high()),
        log_moduli=tuple(float(v) for v in prof.log_moduli),
        alpha=alpha.values,
        det=det,
    )


def _screen_shard(config: SweepConfig, shard: int, known: frozenset) -> list:
    out = []
    ranges = coefficient_bounds(config)
    for p in candidate_polynomials(config, ranges, shard):
        key = tuple(p.high())
        if key in known:
            continue
        res = screen(p, config)
        if res is not None:
            out.append(res)
    return out


# ---------------------------------------------------------------------------
# cache


class HarvestCache:
    """Append-only JSON-lines cache of screened units and field invariants."""

    def __init__(self, path: str | os.PathLike, config: SweepConfig):
        self.path = Path(path)
        self.header = {
            "schema": CACHE_SCHEMA,
            "version": CACHE_VERSION,
            "d": config.d,
            "signature": list(config.signature),
            "S": list(config.S),
            "precision_bits": config.precision_bits,
        }
        self.units: dict[tuple[int, ...], UnitCandidate] = {}
        self.fields: dict[tuple[int, ...], dict] = {}
        self._lock = FileLock(str(self.path) + ".lock")
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with self.path.open() as fh:
            first = fh.readline()
            if not first.strip():
                return
            head = json.loads(first)
            if head.get("schema") != CACHE_SCHEMA or head.get("version") != CACHE_VERSION:
                raise SchemaMismatch(f"{self.path}: unsupported cache schema {head.get('schema')!r} v{head.get('version')}")
            if head != self.header:
                raise SchemaMismatch(f"{self.path}: cache was written for a different configuration: {head}")
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                key = tuple(rec["poly"])
                if rec["kind"] == "unit":
                    self.units[key] = UnitCandidate(key, tuple(rec["log_moduli"]), tuple(rec["alpha"]), rec["det"])
                elif rec["kind"] == "field":
                    self.fields[key] = rec
                else:
                    raise SchemaMismatch(f"unknown cache record kind {rec['kind']!r}")

    def append(self, records: Iterable[dict]) -> None:
        records = list(records)
        if not records:
            return
        with self._lock:
            fresh = not self.path.exists() or self.path.stat().st_size == 0
            with self.path.open("a") as fh:
                if fresh:
                    fh.write(json.dumps(self.header) + "\n")
                for rec in records:
                    fh.write(json.dumps(rec) + "\n")

    def add_units(self, units: Sequence[UnitCandidate]) -> None:
        new = [u for u in units if u.poly not in self.units]
        for u in new:
            self.units[u.poly] = u
        self.append(
            {"kind": "unit", "poly": list(u.poly), "log_moduli": list(u.log_moduli), "alpha": list(u.alpha), "det": u.det}
            for u in new
        )

    def add_field(self, rec: dict) -> None:
        key = tuple(rec["poly"])
        if key not in self.fields:
            self.fields[key] = rec
            self.append([rec])


# ---------------------------------------------------------------------------
# fields and orders


@dataclass
class FieldInfo:
    key: str
    poly: tuple[int, ...]
    disc: int
    in_family: bool
    lam_S: int
    data: ClassRegulatorData | None = None
    skip_reason: str | None = None


@dataclass
class UnitRecord:
    """A characteristic polynomial inside the box together with its field data."""

    candidate: UnitCandidate
    field_key: str
    multiplicity: int
    # for each root in the field: keys of the orders (maximal at S) containing it
    orders: tuple[tuple[str, ...], ...] = ()
    weight: float = 0.0  # sum over roots of sum_O hR(O) lambda_S
    skip_reason: str | None = None

    @property
    def alpha(self) -> tuple[float, ...]:
        return self.candidate.alpha


def _field_job(poly: tuple[int, ...], caps: Caps) -> dict:
    p = MonicIntPolynomial.from_high(poly)
    basis, disc, _ = maximal_order(p)
    try:
        if abs(disc) > caps.disc_cap:
            raise PrimeGeoError(f"|disc| {abs(disc)} above cap")
        data = class_regulator_data(basis, isolate_roots(p))
    except PrimeGeoError as exc:
        return {"kind": "field", "poly": list(poly), "disc": disc, "status": "skipped", "reason": f"{type(exc).__name__}: {exc}"}
    return {"kind": "field", "poly": list(poly), "disc": disc, "status": "ok", "h": data.h, "R": data.R}


def _prime_to(n: int, primes: Iterable[int]) -> int:
    for q in primes:
        while n % q == 0:
            n //= q
    return n


@dataclass
class HarvestResult:
    config: SweepConfig
    records: list[UnitRecord]
    fields: dict[str, FieldInfo]
    order_hr: dict[str, float]  # order key -> hR(O) * lambda_S
    skips: list[Skip]

    def geodesic_records(self) -> list[GeodesicRecord]:
        """Records of units in ``C(S)`` fields with ``lambda_gamma`` = mean per-root weight."""
        out = []
        for rec in self.records:
            if rec.skip_reason is not None or rec.weight <= 0:
                continue
            flat = rec.weight / rec.multiplicity
            c = rec.candidate
            out.append(
                GeodesicRecord(
                    log_moduli=c.log_moduli,
                    flat_volume=flat,
                    alpha=AlphaVector(c.alpha, self.config.signature, self.config.d),
                    index_weight=flat / c.det,
                    multiplicity=rec.multiplicity,
                )
            )
        return out


class Harvester:
    def __init__(self, config: SweepConfig):
        self.config = config
        self.cache = HarvestCache(config.cache_path, config) if config.cache_path else None

    # -- sweep ------------------------------------------------------------

    def screened(self) -> tuple[list[UnitCandidate], list[Skip]]:
        cfg = self.config
        cached = dict(self.cache.units) if self.cache else {}
        known = frozenset(cached)
        results: list = []
        if cfg.shards == 1:
            results = _screen_shard(cfg, 0, known)
        else:
            with ProcessPoolExecutor(max_workers=cfg.shards) as pool:
                futs = [pool.submit(_screen_shard, cfg, k, known) for k in range(cfg.shards)]
                for f in futs:
                    results.extend(f.result())
        units = [r for r in results if isinstance(r, UnitCandidate)]
        skips = [r for r in results if isinstance(r, Skip)]
        if self.cache:
            self.cache.add_units(units)
            units.extend(u for u in cached.values() if in_box(u.alpha, cfg.box))
        units.sort(key=lambda u: u.poly)
        skips.sort(key=lambda s: s.poly)
        return units, skips

    # -- fields -------------------------------------------------------------

    def group_fields(self, units: list[UnitCandidate]):
        """Assign each unit to a field representative; returns (fields, per-unit (key, roots))."""
        by_disc: dict[int, list[UnitCandidate]] = defaultdict(list)
        for u in units:
            _, disc, _ = maximal_order(u.polynomial)
            by_disc[disc].append(u)
        fields: dict[str, FieldInfo] = {}
        assignment: dict[tuple[int, ...], tuple[str, list]] = {}
        for disc in sorted(by_disc):
            reps: list[tuple[str, NumberField]] = []
            for u in sorted(by_disc[disc], key=lambda v: v.poly):
                q = u.polynomial
                for key, nf in reps:
                    roots = nf.roots_in_field(q)
                    if roots:
                        assignment[u.poly] = (key, roots)
                        break
                else:
                    key = f"{disc}:{len(reps)}"
                    nf = NumberField(q)
                    reps.append((key, nf))
                    fields[key] = self._field_info(key, u.poly, disc)
                    assignment[u.poly] = (key, nf.roots_in_field(q))
        return fields, assignment

    def _field_info(self, key: str, poly: tuple[int, ...], disc: int) -> FieldInfo:
        p = MonicIntPolynomial.from_high(poly)
        basis, _, _ = maximal_order(p)
        lam = 1
        in_family = True
        for q in self.config.S:
            st = splitting_type(basis, p, q)
            if not st.non_decomposed:
                in_family = False
                break
            lam *= st.inertia_degree
        return FieldInfo(key, poly, disc, in_family, lam if in_family else 0)

    def _field_data(self, fields: dict[str, FieldInfo]) -> None:
        todo = [f for f in fields.values() if f.in_family]
        results: dict[tuple[int, ...], dict] = {}
        missing = []
        for f in todo:
            hit = self._cached_field(f)
            if hit is not None:
                results[f.poly] = hit
            else:
                missing.append(f.poly)
        if missing:
            if self.config.shards > 1 and len(missing) > 1:
                with ProcessPoolExecutor(max_workers=self.config.shards) as pool:
                    done = list(pool.map(_field_job, missing, itertools.repeat(self.config.caps)))
            else:
                done = [_field_job(p, self.config.caps) for p in missing]
            for rec in done:
                results[tuple(rec["poly"])] = rec
                if self.cache:
                    self.cache.add_field(rec)
        for f in todo:
            rec = results[f.poly]
            if rec["status"] == "ok":
                f.data = ClassRegulatorData(h=rec["h"], R=rec["R"], hR=rec["h"] * rec["R"])
            else:
                f.skip_reason = rec["reason"]

    def _cached_field(self, f: FieldInfo) -> dict | None:
        if not self.cache:
            return None
        if f.poly in self.cache.fields:
            return self.cache.fields[f.poly]
        nf = None
        for poly, rec in self.cache.fields.items():
            if rec["disc"] != f.disc:
                continue
            nf = nf or NumberField(MonicIntPolynomial.from_high(f.poly))
            if nf.roots_in_field(MonicIntPolynomial.from_high(poly)):
                return dict(rec, poly=list(f.poly))
        return None

    # -- orders -------------------------------------------------------------

    def _orders_of(self, f: FieldInfo, element, order_hr: dict[str, float]) -> tuple[str, ...]:
        """Keys of the orders maximal at S containing ``element`` (power-basis coords of the rep)."""
        caps = self.config.caps
        p = MonicIntPolynomial.from_high(f.poly)
        basis, _, _ = maximal_order(p)
        max_ord = Order(basis)
        fld = max_ord.field
        rows = [max_ord.int_coords(fld.power(element, k)) for k in range(self.config.d)]
        lat = _linalg.hnf_lower(rows, self.config.d)
        index = _linalg.lattice_index(lat)
        allowed = _prime_to(index, self.config.S)
        lats = suborder_lattices(max_ord, lat, allowed, allowed, caps.index_cap)
        keys = []
        for m in sorted(lats):
            okey = f"{f.key}|" + ";".join(",".join(map(str, r)) for r in m)
            if okey not in order_hr:
                ob = order_from_lattice(max_ord, m)
                cond = residue_unit_counts(ob, basis, conductor_cap=caps.conductor_cap)
                order_hr[okey] = hr_for_order(ob, f.data, cond).hR * f.lam_S
            keys.append(okey)
        return tuple(keys)

    def run(self) -> HarvestResult:
        units, skips = self.screened()
        fields, assignment = self.group_fields(units)
        self._field_data(fields)
        order_hr: dict[str, float] = {}
        records = []
        for u in units:
            key, roots = assignment[u.poly]
            f = fields[key]
            rec = UnitRecord(u, key, multiplicity=len(roots))
            if not f.in_family:
                records.append(rec)
                continue
            if f.data is None:
                rec.skip_reason = f"field:{f.skip_reason}"
                records.append(rec)
                continue
            try:
                rec.orders = tuple(self._orders_of(f, r, order_hr) for r in roots)
            except PrimeGeoError as exc:
                rec.skip_reason = f"orders:{type(exc).__name__}"
                rec.orders = ()
                records.append(rec)
                continue
            rec.weight = sum(order_hr[k] for keys in rec.orders for k in keys)
            records.append(rec)
        return HarvestResult(self.config, records, fields, order_hr, skips)


# ---------------------------------------------------------------------------
# public operations


def enumerate_units(config: SweepConfig) -> Iterator[tuple[UnitRecord, str]]:
    """Units inside the box (one per ``+-`` class of characteristic polynomial) with field keys."""
    h = Harvester(config)
    units, skips = h.screened()
    for s in skips:
        log.warning("skipped %s: %s", s.poly, s.reason)
    fields, assignment = h.group_fields(units)
    for u in units:
        key, roots = assignment[u.poly]
        yield UnitRecord(u, key, multiplicity=len(roots)), key


@dataclass
class ThetaAccumulator:
    total: float = 0.0
    contributing_orders: int = 0
    skipped_mass_report: dict[str, int] = field(default_factory=dict)
    per_order_terms: list[dict] | None = None

    @property
    def skipped_mass(self) -> int:
        return sum(self.skipped_mass_report.values())

    def merge(self, other: "ThetaAccumulator") -> "ThetaAccumulator":
        rep = Counter(self.skipped_mass_report)
        rep.update(other.skipped_mass_report)
        terms = None
        if self.per_order_terms is not None or other.per_order_terms is not None:
            terms = (self.per_order_terms or []) + (other.per_order_terms or [])
        return ThetaAccumulator(
            self.total + other.total,
            self.contributing_orders + other.contributing_orders,
            dict(rep),
            terms,
        )


def accumulate(result: HarvestResult, box: BoxSpec, *, ledger: bool = False, fields: Iterable[str] | None = None) -> ThetaAccumulator:
    """theta_S for ``box`` (contained in the harvested box) from harvested records.

    ``fields`` restricts the sum to the given field keys.
    """
    keep = None if fields is None else set(fields)
    counts: Counter[str] = Counter()
    skipped: Counter[str] = Counter()
    for rec in result.records:
        if keep is not None and rec.field_key not in keep:
            continue
        if not in_box(rec.alpha, box):
            continue
        if rec.skip_reason is not None:
            skipped[rec.skip_reason.split(":")[0]] += rec.multiplicity
            continue
        for keys in rec.orders:
            counts.update(keys)
    if keep is None:
        for s in result.skips:
            skipped[s.reason.split(":")[0]] += s.mass
    terms = []
    total = 0.0
    for okey in sorted(counts):
        term = counts[okey] * result.order_hr[okey]
        total += term
        if ledger:
            terms.append({"order": okey, "v_O": counts[okey], "hR_lambdaS": result.order_hr[okey], "term": term})
    acc = ThetaAccumulator(total, len(counts), dict(skipped), terms if ledger else None)
    return acc


def theta_S(config: SweepConfig, *, ledger: bool = False) -> ThetaAccumulator:
    return accumulate(Harvester(config).run(), config.box, ledger=ledger)


@dataclass(frozen=True)
class SweepRow:
    thresholds: tuple[float, ...]
    theta: float
    ratio: float
    target: float
    skipped_mass: int
    contributing_orders: int = 0


def sweep_ratios(config: SweepConfig, grid: Sequence[Sequence[float]]) -> tuple[list[SweepRow], HarvestResult]:
    """theta_S / prod T_k along an ascending grid of boxes, harvesting the largest box once."""
    boxes = [BoxSpec(tuple(t), config.box.convention) for t in grid]
    if not boxes:
        return [], HarvestResult(config, [], {}, {}, [])
    for a, b in zip(boxes, boxes[1:]):
        if any(x > y for x, y in zip(a.thresholds, b.thresholds)):
            raise ConfigError("grid must be ascending in every coordinate")
    big = replace(config, box=boxes[-1])
    result = Harvester(big).run()
    _, target = constant_c(config.signature, config.d)
    rows = []
    for box in boxes:
        acc = accumulate(result, box)
        rows.append(SweepRow(box.thresholds, acc.total, acc.total / box.volume, target, acc.skipped_mass, acc.contributing_orders))
    return rows, result


# ---------------------------------------------------------------------------
# reports


def csv_header(rank: int) -> list[str]:
    return [f"T_{k + 1}" for k in range(rank)] + list(CSV_FIXED_COLUMNS)


def rows_to_csv(rows: Sequence[SweepRow], rank: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(rank))
    for r in rows:
        w.writerow([repr(t) for t in r.thresholds] + [repr(r.theta), repr(r.ratio), repr(r.target), r.skipped_mass])
    return buf.getvalue()


def rows_to_json(rows: Sequence[SweepRow], config: SweepConfig) -> str:
    payload = {
        "d": config.d,
        "signature": list(config.signature),
        "S": list(config.S),
        "convention": config.box.convention.value,
        "rows": [
            {
                "T": list(r.thresholds),
                "theta": r.theta,
                "ratio": r.ratio,
                "target": r.target,
                "skipped_mass": r.skipped_mass,
                "contributing_orders": r.contributing_orders,
            }
            for r in rows
        ],
    }
    return json.dumps(payload, indent=2)
