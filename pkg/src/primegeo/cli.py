"""Command-line entry point: ``primegeo {enumerate,theta-sweep,dirichlet,psi,crosscheck}``.

Options come from a JSON config file (``--config``) and are overridden by
flags.  Recognised config keys::

    d, signature [r, s], S [p, ...], convention, thresholds [T, ...],
    grid [[T, ...], ...], precision_bits, shards, cache, caps {index_cap,
    conductor_cap, minkowski_cap, disc_cap}, output, format (csv|json),
    fixtures, offline, j [..], s_grid [[s, ...], ...], verbosity

The box convention has no default.  Exit codes: 0 success, 1 validation or
check failure, 2 environment failure (network, unreadable files).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

from . import harvest
from .chamber import BoxSpec, Convention, psi
from .dirichlet import SeriesPoint, leading_term, partial_L
from .errors import ConfigError, DivergenceWarning, NetworkUnavailable, PrimeGeoError, SchemaMismatch
from .lmfdbclient import LMFDBClient, LocalRow, crosscheck
from .unitlattice import class_regulator_data

log = logging.getLogger("primegeo")

EXIT_OK, EXIT_CHECK, EXIT_ENV = 0, 1, 2
DEFAULT_FIXTURES = "tests/fixtures/fieldfacts.json"


@dataclass
class RunConfig:
    d: int = 3
    signature: tuple[int, int] | None = None
    S: tuple[int, ...] = (2, 3)
    convention: str | None = None
    thresholds: tuple[float, ...] | None = None
    grid: list[tuple[float, ...]] = field(default_factory=list)
    precision_bits: int = 128
    shards: int = 1
    cache: str | None = None
    caps: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "csv"
    fixtures: str = DEFAULT_FIXTURES
    offline: bool | None = None
    j: tuple[int, ...] = (0,)
    s_grid: list[tuple[float, ...]] = field(default_factory=list)
    verbosity: int = 0

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        cfg = cls(**data)
        cfg.normalise()
        return cfg

    def normalise(self) -> None:
        def tup(v, kind):
            if v is None:
                return None
            if isinstance(v, (int, float)):
                v = [v]
            return tuple(kind(x) for x in v)

        try:
            self.signature = tup(self.signature, int)
            self.S = tup(self.S, int)
            self.thresholds = tup(self.thresholds, float)
            self.grid = [tup(g, float) for g in self.grid]
            self.j = tup(self.j, int)
            self.s_grid = [tup(g, float) for g in self.s_grid]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from None
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        if self.signature is not None and len(self.signature) != 2:
            raise ConfigError("signature must be a pair [r, s]")

    def box(self, thresholds: Sequence[float] | None = None) -> BoxSpec:
        if self.convention is None:
            raise ConfigError("box convention is required: pass --convention linear|multiplicative")
        t = thresholds if thresholds is not None else self.thresholds
        if t is None:
            if not self.grid:
                raise ConfigError("no box thresholds given")
            t = self.grid[-1]
        try:
            return BoxSpec(tuple(t), Convention.parse(self.convention))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def sweep(self, thresholds: Sequence[float] | None = None) -> harvest.SweepConfig:
        if self.signature is None:
            raise ConfigError("signature is required")
        try:
            caps = harvest.Caps(**self.caps)
        except TypeError as exc:
            raise ConfigError(f"bad caps: {exc}") from None
        return harvest.SweepConfig(
            d=self.d,
            signature=self.signature,
            S=self.S,
            box=self.box(thresholds),
            precision_bits=self.precision_bits,
            caps=caps,
            shards=self.shards,
            cache_path=self.cache,
        )


# ---------------------------------------------------------------------------
# argument parsing


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--convention", choices=[c.value for c in Convention])
    common.add_argument("--signature", type=int, nargs=2, metavar=("R", "S"))
    common.add_argument("--d", type=int)
    common.add_argument("--primes", type=int, nargs="+", dest="S", metavar="P", help="the prime set S")
    common.add_argument("--thresholds", type=_floats, help="box thresholds T_1,...")
    common.add_argument("--grid", type=_floats, action="append", help="one box per flag, ascending")
    common.add_argument("--precision-bits", type=int, dest="precision_bits")
    common.add_argument("--shards", type=int)
    common.add_argument("--cache", help="harvest cache file (JSON lines)")
    common.add_argument("--output", "-o")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--offline", action="store_true", default=None)
    common.add_argument("-v", "--verbose", action="count", dest="verbosity")

    p = argparse.ArgumentParser(prog="primegeo", description="Unit sweeps, class-number asymptotics and checks for prime-degree fields.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("enumerate", parents=[common], help="list units inside a box")
    sub.add_parser("theta-sweep", parents=[common], help="theta_S / prod T along a grid of boxes")
    dp = sub.add_parser("dirichlet", parents=[common], help="rescaled partial sums of L^j(s)")
    dp.add_argument("--j", type=int, nargs="+")
    dp.add_argument("--s", type=_floats, action="append", dest="s_grid", help="one point s per flag")
    sub.add_parser("psi", parents=[common], help="Psi (sum of flat volumes) along a grid of boxes")
    cp = sub.add_parser("crosscheck", parents=[common], help="compare local h, R with reference facts")
    cp.add_argument("--fixtures", help="fact cache file")
    return p


def load_config(ns: argparse.Namespace) -> RunConfig:
    data: dict[str, Any] = {}
    if ns.config:
        try:
            data = json.loads(Path(ns.config).read_text())
        except OSError as exc:
            raise FileNotFoundError(f"cannot read config {ns.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {ns.config} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for key in ("convention", "signature", "d", "S", "thresholds", "grid", "precision_bits", "shards", "cache",
                "output", "format", "offline", "verbosity", "j", "s_grid", "fixtures"):
        val = getattr(ns, key, None)
        if val is not None:
            data[key] = list(val) if isinstance(val, tuple) else val
    return RunConfig.from_mapping(data)


# ---------------------------------------------------------------------------
# commands


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


ENUMERATE_COLUMNS = ("charpoly", "disc", "alpha", "multiplicity")


def cmd_enumerate(cfg: RunConfig) -> int:
    sweep = cfg.sweep()
    h = harvest.Harvester(sweep)
    units, skips = h.screened()
    fields_, assignment = h.group_fields(units)
    rows = []
    for u in units:
        key, roots = assignment[u.poly]
        rows.append({
            "charpoly": " ".join(map(str, u.poly)),
            "disc": fields_[key].disc,
            "alpha": ";".join(repr(a) for a in u.alpha),
            "multiplicity": len(roots),
        })
    if cfg.format == "json":
        _emit(json.dumps({"columns": list(ENUMERATE_COLUMNS), "rows": rows, "skipped": [s.__dict__ for s in skips]}, indent=2, default=list) + "\n", cfg)
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=ENUMERATE_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _emit(buf.getvalue(), cfg)
    for s in skips:
        log.warning("skipped %s: %s", s.poly, s.reason)
    return EXIT_OK


def _grid(cfg: RunConfig) -> list[tuple[float, ...]]:
    if cfg.grid:
        return list(cfg.grid)
    if cfg.thresholds:
        return [cfg.thresholds]
    raise ConfigError("give --grid (one or more boxes) or --thresholds")


def cmd_theta_sweep(cfg: RunConfig) -> int:
    grid = _grid(cfg)
    sweep = cfg.sweep(grid[-1])
    rows, _ = harvest.sweep_ratios(sweep, grid)
    text = harvest.rows_to_json(rows, sweep) + "\n" if cfg.format == "json" else harvest.rows_to_csv(rows, sweep.rank)
    _emit(text, cfg)
    last = rows[-1]
    grade = "acceptance-grade" if last.skipped_mass == 0 else "NOT acceptance-grade (skipped mass > 0)"
    print(f"final ratio {last.ratio:.6g} vs target {last.target:.6g}; skipped mass {last.skipped_mass}; {grade}", file=sys.stderr)
    return EXIT_OK


def cmd_psi(cfg: RunConfig) -> int:
    grid = _grid(cfg)
    sweep = cfg.sweep(grid[-1])
    records = harvest.Harvester(sweep).run().geodesic_records()
    rank = sweep.rank
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = [f"T_{k + 1}" for k in range(rank)] + ["psi", "ratio"]
    out = []
    for t in grid:
        box = cfg.box(t)
        val = psi(records, box)
        out.append({"T": list(t), "psi": val, "ratio": val / box.volume})
    if cfg.format == "json":
        _emit(json.dumps({"convention": cfg.convention, "rows": out}, indent=2) + "\n", cfg)
    else:
        w.writerow(header)
        for row in out:
            w.writerow([repr(v) for v in row["T"]] + [repr(row["psi"]), repr(row["ratio"])])
        _emit(buf.getvalue(), cfg)
    return EXIT_OK


def cmd_dirichlet(cfg: RunConfig) -> int:
    sweep = cfg.sweep()
    if not cfg.s_grid:
        raise ConfigError("give at least one point with --s")
    rank = sweep.rank
    points = []
    for s in cfg.s_grid:
        s = s * rank if len(s) == 1 else s
        if len(s) != rank:
            raise ConfigError(f"s needs {rank} coordinates")
        for j in cfg.j:
            points.append(SeriesPoint(s, j))
    for pt in points:
        if any(not v.real > 1 for v in pt.s):
            raise DivergenceWarning(f"refusing s = {[v.real for v in pt.s]}: the series converges only for Re(s_k) > 1")
    records = harvest.Harvester(sweep).run().geodesic_records()
    out = []
    for pt in points:
        val = partial_L(records, pt)
        lead = leading_term(pt, 1)
        out.append({"s": [v.real for v in pt.s], "j": pt.j, "partial": val.real, "leading": lead.real, "rescaled": (val / lead).real})
    if cfg.format == "json":
        _emit(json.dumps({"rows": out}, indent=2) + "\n", cfg)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"s_{k + 1}" for k in range(rank)] + ["j", "partial", "leading", "rescaled"])
        for row in out:
            w.writerow([repr(v) for v in row["s"]] + [row["j"], repr(row["partial"]), repr(row["leading"]), repr(row["rescaled"])])
        _emit(buf.getvalue(), cfg)
    return EXIT_OK


def local_field_rows(cfg: RunConfig) -> list[LocalRow]:
    """Locally computed (disc, h, R) for every field met by the sweep of the configured box."""
    sweep = cfg.sweep()
    h = harvest.Harvester(sweep)
    units, _ = h.screened()
    fields_, _ = h.group_fields(units)
    rows = []
    for f in sorted(fields_.values(), key=lambda f: (abs(f.disc), f.poly)):
        p = harvest.MonicIntPolynomial.from_high(f.poly)
        basis, disc, _ = harvest.maximal_order(p)
        data = class_regulator_data(basis, harvest.isolate_roots(p))
        rows.append(LocalRow(disc, data.h, data.R, p))
    return rows


def cmd_crosscheck(cfg: RunConfig, rows: list[LocalRow] | None = None) -> int:
    offline = cfg.offline
    if offline and not Path(cfg.fixtures).exists():
        raise NetworkUnavailable(
            f"offline mode needs a fact cache; {cfg.fixtures} does not exist "
            "(run scripts/make_fixtures.py or drop --offline)"
        )
    client = LMFDBClient(cfg.fixtures, offline=offline)
    rows = local_field_rows(cfg) if rows is None else rows
    report = crosscheck(rows, client)
    payload = {"checked": report.checked, "discrepancies": report.discrepancies, "unverifiable": report.unverifiable}
    _emit(json.dumps(payload, indent=2) + "\n", cfg)
    return EXIT_OK if report.ok else EXIT_CHECK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "theta-sweep": cmd_theta_sweep,
    "dirichlet": cmd_dirichlet,
    "psi": cmd_psi,
    "crosscheck": cmd_crosscheck,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = load_config(ns)
        logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity or 0, 2), format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[ns.command](cfg)
    except (ConfigError, DivergenceWarning, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (NetworkUnavailable, SchemaMismatch, OSError) as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except PrimeGeoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
