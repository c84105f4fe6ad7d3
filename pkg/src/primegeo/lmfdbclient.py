"""Cross-validation of class numbers and regulators against the LMFDB number-field API.

Facts are cached in one JSON file with a versioned schema::

    {"schema": "primegeo.fieldfacts", "version": 1,
     "entries": {"-23": [{"label": "3.1.23.1", "discriminant": -23, "coeffs": [-1, -1, 0, 1],
                          "h": 1, "R": 0.2811995743, "origin": "..."}]}}

Entries are keyed by discriminant; ``coeffs`` is a defining polynomial
(low to high, as served by the API) used to tell apart fields that share a
discriminant.  The cache is authoritative offline, which is the default for
the test suite.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import requests
from filelock import FileLock

from .errors import NetworkUnavailable, NotFound, SchemaMismatch
from .exactpoly import MonicIntPolynomial
from .orderfield import NumberField, maximal_order

API_URL = "https://www.lmfdb.org/api/nf_fields/"
USER_AGENT = "primegeo-crosscheck/0.1 (class number validation; python-requests)"
OFFLINE_ENV = "PRIMEGEO_OFFLINE"
CACHE_SCHEMA = "primegeo.fieldfacts"
CACHE_VERSION = 1
R_TOLERANCE = 1e-8


@dataclass(frozen=True)
class FieldFact:
    label: str
    discriminant: int
    h: int
    R: float
    source: str  # "remote" or "cache"
    fetched_at: str
    coeffs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.discriminant == 0:
            raise ValueError("discriminant must be nonzero")
        if self.h < 1:
            raise ValueError("class number must be positive")
        if not self.R > 0:
            raise ValueError("regulator must be positive")
        if self.source not in ("remote", "cache"):
            raise ValueError(f"unknown source {self.source!r}")

    def invariants(self) -> tuple:
        """The fields that must survive a cache round trip unchanged."""
        return (self.label, self.discriminant, self.h, self.R, self.coeffs)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def offline_forced() -> bool:
    return os.environ.get(OFFLINE_ENV, "").strip().lower() not in ("", "0", "false", "no")


class FactCache:
    """Single-file key-value store; reads are lock-free, writes take a file lock."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._lock = FileLock(str(self.path) + ".lock")

    def _read(self) -> dict:
        if not self.path.exists():
            return {}
        payload = json.loads(self.path.read_text())
        if payload.get("schema") != CACHE_SCHEMA or payload.get("version") != CACHE_VERSION:
            raise SchemaMismatch(f"{self.path}: expected {CACHE_SCHEMA} v{CACHE_VERSION}")
        return payload.get("entries", {})

    def get(self, disc: int) -> list[dict] | None:
        return self._read().get(str(disc))

    def put(self, disc: int, entries: Sequence[dict]) -> None:
        with self._lock:
            data = self._read()
            data[str(disc)] = list(entries)
            payload = {"schema": CACHE_SCHEMA, "version": CACHE_VERSION, "entries": dict(sorted(data.items(), key=lambda kv: (abs(int(kv[0])), int(kv[0]))))}
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            tmp.write_text(json.dumps(payload, indent=1, sort_keys=False) + "\n")
            tmp.replace(self.path)


def _parse_entry(raw: dict) -> dict:
    """Normalise one API record; anything unexpected is a schema mismatch."""
    try:
        disc = int(raw["disc_sign"]) * int(raw["disc_abs"])
        entry = {
            "label": str(raw["label"]),
            "discriminant": disc,
            "coeffs": [int(c) for c in raw["coeffs"]],
            "h": int(raw["class_number"]),
            "R": float(raw["regulator"]),
            "origin": "lmfdb",
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"unexpected LMFDB record: {exc!r}") from None
    if entry["h"] < 1 or not entry["R"] > 0:
        raise SchemaMismatch(f"implausible invariants in {entry['label']}")
    return entry


class LMFDBClient:
    def __init__(
        self,
        cache_path: str | os.PathLike,
        *,
        offline: bool | None = None,
        session: requests.Session | None = None,
        min_interval: float = 1.0,
        timeout: float = 20.0,
    ):
        self.cache = FactCache(cache_path)
        self.offline = offline_forced() if offline is None else offline
        self.session = session or requests.Session()
        self.session.headers["User-Agent"] = USER_AGENT
        self.min_interval = max(1.0, min_interval)
        self.timeout = timeout
        self._last_call = -math.inf
        self._inflight = threading.Lock()

    # -- remote ---------------------------------------------------------------

    def _remote(self, disc: int) -> list[dict]:
        params = {
            "degree": 3,
            "disc_abs": abs(disc),
            "disc_sign": 1 if disc > 0 else -1,
            "_format": "json",
            "_fields": "label,coeffs,disc_abs,disc_sign,class_number,regulator",
        }
        with self._inflight:
            wait = self._last_call + self.min_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            try:
                resp = self.session.get(API_URL, params=params, timeout=self.timeout)
            except requests.RequestException as exc:
                raise NetworkUnavailable(f"LMFDB request failed: {exc}") from exc
            finally:
                self._last_call = time.monotonic()
        if resp.status_code != 200:
            raise NetworkUnavailable(f"LMFDB answered HTTP {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError:
            raise SchemaMismatch("LMFDB payload is not JSON") from None
        if not isinstance(payload, dict) or not isinstance(payload.get("data"), list):
            raise SchemaMismatch("LMFDB payload lacks a 'data' list")
        return [_parse_entry(r) for r in payload["data"]]

    # -- lookup ---------------------------------------------------------------

    def _entries(self, disc: int) -> tuple[list[dict], str]:
        hit = self.cache.get(disc)
        if hit is not None:
            return hit, "cache"
        if self.offline:
            raise NetworkUnavailable(
                f"no cached facts for discriminant {disc} and offline mode is on "
                f"(unset {OFFLINE_ENV} or supply a fixture cache)"
            )
        entries = self._remote(disc)
        self.cache.put(disc, entries)
        return entries, "remote"

    def fetch_field(self, key: int | MonicIntPolynomial) -> FieldFact:
        """Invariants of the cubic field with discriminant ``key`` or defined by ``key``."""
        poly = key if isinstance(key, MonicIntPolynomial) else None
        disc = maximal_order(poly)[1] if poly is not None else int(key)
        entries, source = self._entries(disc)
        if not entries:
            raise NotFound(f"no cubic field of discriminant {disc}")
        if len(entries) > 1:
            if poly is None:
                raise NotFound(f"{len(entries)} fields have discriminant {disc}; pass a defining polynomial")
            nf = NumberField(poly)
            entries = [e for e in entries if nf.roots_in_field(MonicIntPolynomial(tuple(e["coeffs"][:-1])))]
            if len(entries) != 1:
                raise NotFound(f"no unique field of discriminant {disc} matches {poly}")
        e = entries[0]
        return FieldFact(e["label"], e["discriminant"], e["h"], e["R"], source, _now(), tuple(e["coeffs"]))


# ---------------------------------------------------------------------------
# cross-check


@dataclass(frozen=True)
class LocalRow:
    discriminant: int
    h: int
    R: float
    poly: MonicIntPolynomial | None = None


@dataclass
class CrosscheckReport:
    checked: int = 0
    discrepancies: list[dict] = field(default_factory=list)
    unverifiable: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.discrepancies


def crosscheck(rows: Iterable[LocalRow], client: LMFDBClient, *, tol: float = R_TOLERANCE) -> CrosscheckReport:
    """Compare local ``(disc, h, R)`` against the reference; fetch errors mark rows unverifiable."""
    report = CrosscheckReport()
    for row in rows:
        try:
            fact = client.fetch_field(row.poly if row.poly is not None else row.discriminant)
        except (NotFound, NetworkUnavailable, SchemaMismatch) as exc:
            report.unverifiable.append({"discriminant": row.discriminant, "reason": f"{type(exc).__name__}: {exc}"})
            continue
        report.checked += 1
        problems = []
        if fact.h != row.h:
            problems.append(f"h {row.h} != {fact.h}")
        if not abs(row.R - fact.R) <= tol:
            problems.append(f"|R - R_ref| = {abs(row.R - fact.R):.3e} > {tol:g}")
        if problems:
            report.discrepancies.append(
                {"discriminant": row.discriminant, "label": fact.label, "local_h": row.h, "ref_h": fact.h,
                 "local_R": row.R, "ref_R": fact.R, "problems": problems}
            )
    return report
