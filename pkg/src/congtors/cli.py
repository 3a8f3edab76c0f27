"""Batch orchestration and the command-line surface.

Pipeline: field -> congruence subgroup -> symmetric-power lattice ->
presentation complex -> homology -> bounds, emitted as schema-versioned
JSON reports plus optional CSV tables.  Independent values of m run in
parallel worker processes; per-m failures are isolated and recorded
instead of aborting the batch.

Exit-code contract: run-style commands exit 0 only when every hard
invariant (chain condition, cusp/volume consistency, Betti = kappa,
Gabber-Soule and H0 bounds, growth band when fitted) passed.

The presentation data directory can be overridden with the
CONGTORS_DATA_DIR environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .bianchi import congruence_subgroup, cusp_count, load_presentation
from .bounds import BoundReport, base_volume, bound_report
from .foxhom import TorsionReport, torsion_h2
from .hecke import hecke_table
from .quadfield import make_field, make_ideal, parse_element, zeta_F_at_2

RUN_REPORT_SCHEMA = "congtors-run-report v1"


@dataclass(frozen=True)
class RunConfig:
    D: int
    ideal: tuple[str, ...]
    ms: tuple[int, ...]
    jobs: int = 1
    precision: int = 9
    band_factors: tuple[float, float] = (0.3, 2.0)
    allow_small_level: bool = False
    snapshot_dir: str | None = None
    data_dir: str | None = None

    def validate(self) -> None:
        if not self.ideal:
            raise ValueError("at least one ideal generator is required")
        if not self.ms:
            raise ValueError("empty m range")
        if any(m < 0 for m in self.ms):
            raise ValueError("m values must be nonnegative")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if not 0 < self.band_factors[0] < self.band_factors[1]:
            raise ValueError("band factors must satisfy 0 < lo < hi")

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "ideal": list(self.ideal),
            "ms": list(self.ms),
            "jobs": self.jobs,
            "precision": self.precision,
            "band_factors": list(self.band_factors),
            "allow_small_level": self.allow_small_level,
            "snapshot_dir": self.snapshot_dir,
            "data_dir": self.data_dir,
        }


def build_subgroup(config: RunConfig):
    path = None
    if config.data_dir is not None:
        path = os.path.join(config.data_dir, f"d{config.D}.txt")
    P = load_presentation(config.D, path=path)
    gens = [parse_element(P.field, s) for s in config.ideal]
    I = make_ideal(P.field, gens)
    return congruence_subgroup(P, I, allow_small_level=config.allow_small_level)


def _torsion_worker(config: RunConfig, m: int) -> TorsionReport:
    # runs in a separate process: rebuild the subgroup from the config
    S = build_subgroup(config)
    return torsion_h2(S, m, snapshot_dir=config.snapshot_dir)


@dataclass
class RunReport:
    schema: str
    version: str
    config: dict
    D: int
    index: int
    kappa: int
    neat: bool
    torsion: list[TorsionReport]
    bounds: BoundReport | None
    failures: list[dict]
    all_pass: bool
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "version": self.version,
            "config": self.config,
            "D": self.D,
            "index": self.index,
            "kappa": self.kappa,
            "neat": self.neat,
            "torsion": [r.to_dict() for r in self.torsion],
            "bounds": self.bounds.to_dict() if self.bounds else None,
            "failures": self.failures,
            "all_pass": self.all_pass,
            "timings": self.timings,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def run(config: RunConfig) -> RunReport:
    """Execute the full pipeline for every m in the config."""
    config.validate()
    t0 = time.perf_counter()
    S = build_subgroup(config)
    c = cusp_count(S)
    timings = {"subgroup": time.perf_counter() - t0}

    ms = sorted(set(config.ms))
    reports: list[TorsionReport] = []
    failures: list[dict] = []
    t1 = time.perf_counter()
    if config.jobs > 1 and len(ms) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futs = {m: pool.submit(_torsion_worker, config, m) for m in ms}
            for m in ms:
                try:
                    reports.append(futs[m].result())
                except Exception as exc:  # per-m isolation
                    failures.append({"m": m, "error": f"{type(exc).__name__}: {exc}"})
    else:
        for m in ms:
            try:
                reports.append(torsion_h2(S, m, kappa=c.kappa,
                                          snapshot_dir=config.snapshot_dir))
            except Exception as exc:
                failures.append({"m": m, "error": f"{type(exc).__name__}: {exc}"})
    timings["torsion"] = time.perf_counter() - t1

    bounds = None
    ok = not failures
    if reports:
        t2 = time.perf_counter()
        bounds = bound_report(S, reports, band_factors=config.band_factors,
                              precision=config.precision)
        timings["bounds"] = time.perf_counter() - t2
        ok = ok and bounds.all_pass
    for r in reports:
        if r.betti_matches_kappa is False:
            ok = False

    return RunReport(
        schema=RUN_REPORT_SCHEMA,
        version=__version__,
        config=config.to_dict(),
        D=config.D,
        index=S.index,
        kappa=c.kappa,
        neat=S.neat,
        torsion=reports,
        bounds=bounds,
        failures=failures,
        all_pass=ok,
        timings=timings,
    )


TABLE_COLUMNS = (
    "m", "m_squared", "h1_betti", "kappa", "betti_matches_kappa",
    "h1_torsion_log", "h2_tors_log", "gs_log_bound", "gs_holds",
    "h0_order", "h0_bound_log", "h0_holds",
)


def table(report: RunReport) -> list[dict]:
    """Flatten a run into deterministic per-m rows for CSV export."""
    gs = {c["m"]: c for c in (report.bounds.gs_checks if report.bounds else [])}
    h0 = {c["m"]: c for c in (report.bounds.h0_checks if report.bounds else [])}
    rows = []
    for r in sorted(report.torsion, key=lambda r: r.m):
        rows.append({
            "m": r.m,
            "m_squared": r.m * r.m,
            "h1_betti": r.h1_betti,
            "kappa": r.kappa,
            "betti_matches_kappa": r.betti_matches_kappa,
            "h1_torsion_log": r.h1_torsion_log,
            "h2_tors_log": r.h2_tors_log,
            "gs_log_bound": gs.get(r.m, {}).get("log_bound"),
            "gs_holds": gs.get(r.m, {}).get("holds"),
            "h0_order": r.h0_order,
            "h0_bound_log": h0.get(r.m, {}).get("bound_log"),
            "h0_holds": h0.get(r.m, {}).get("holds"),
        })
    return rows


def write_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TABLE_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow(row)


# ---------------------------------------------------------------------------
# argument parsing


def _parse_ms(text: str) -> tuple[int, ...]:
    """'0..3' or '1,2,5' or '2'."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(t) for t in text.split(",") if t)


def _parse_ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--D", type=int, required=True, help="field parameter D in Q(sqrt(-D))")
    p.add_argument("--ideal", required=True,
                   help="comma-separated ideal generators, e.g. '3' or '1+2w'")
    p.add_argument("--m", default="0..2", help="m range: '0..3' or '1,2,5'")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--precision", type=int, default=9, help="digits for zeta/volume")
    p.add_argument("--band", default="0.3,2.0",
                   help="growth-band factors as 'lo,hi' multiples of vol/pi")
    p.add_argument("--allow-small-level", action="store_true",
                   help="permit levels of norm < 9 (neatness not guaranteed)")
    p.add_argument("--snapshot-dir", default=None, help="write matrix snapshots here")
    p.add_argument("--data-dir", default=None,
                   help="presentation data directory (default: CONGTORS_DATA_DIR or built-in)")
    p.add_argument("--output", default=None, help="write the JSON run report here")
    p.add_argument("--csv", default=None, help="write the per-m CSV table here")


def _config_from_args(args) -> RunConfig:
    lo, hi = (float(t) for t in args.band.split(","))
    return RunConfig(
        D=args.D,
        ideal=tuple(t for t in args.ideal.split(",") if t),
        ms=_parse_ms(args.m),
        jobs=args.jobs,
        precision=args.precision,
        band_factors=(lo, hi),
        allow_small_level=args.allow_small_level,
        snapshot_dir=args.snapshot_dir,
        data_dir=args.data_dir or os.environ.get("CONGTORS_DATA_DIR"),
    )


def _emit_run(report: RunReport, args, out) -> int:
    if args.output:
        report.write_json(args.output)
    if args.csv:
        write_csv(table(report), args.csv)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True), file=out)
    return 0 if report.all_pass else 1


def _cmd_field_info(args, out) -> int:
    F = make_field(args.D)
    info = {
        "D": F.D,
        "disc": F.disc,
        "omega": F.omega_desc,
        "unit_count": F.unit_count,
        "class_number": F.class_number,
        "zeta_F_2": zeta_F_at_2(F, args.precision),
        "base_volume": base_volume(F, args.precision),
    }
    print(json.dumps(info, indent=2, sort_keys=True), file=out)
    return 0


def _cmd_subgroup(args, out) -> int:
    cfg = _config_from_args(args)
    S = build_subgroup(cfg)
    c = cusp_count(S)
    info = {
        "D": cfg.D,
        "ideal_hnf": [list(r) for r in S.level.hnf],
        "ideal_norm": S.level.norm,
        "index": S.index,
        "neat": S.neat,
        "generators": S.presentation.generator_count,
        "relators": len(S.presentation.relators),
        "schreier_generators": S.schreier_generator_count,
        "kappa": c.kappa,
        "cusps_of_Gamma_D": c.kappa_Gamma_D,
    }
    print(json.dumps(info, indent=2, sort_keys=True), file=out)
    return 0


def _cmd_torsion(args, out) -> int:
    return _emit_run(run(_config_from_args(args)), args, out)


def _cmd_bounds(args, out) -> int:
    report = run(_config_from_args(args))
    if args.output:
        report.write_json(args.output)
    if args.csv:
        write_csv(table(report), args.csv)
    payload = report.bounds.to_dict() if report.bounds else None
    print(json.dumps(payload, indent=2, sort_keys=True), file=out)
    return 0 if report.all_pass else 1


def _cmd_hecke_table(args, out) -> int:
    qs = _parse_ints(args.q)
    orders = _parse_ints(args.orders)
    ms = _parse_ms(args.m)
    rows = hecke_table(qs, orders, ms)
    printable = [
        {"q": q, "chi_order": n, "root_index": k, "m": m,
         "ratio": str(r), "ratio_float": [z.real, z.imag]}
        for (q, n, k, m, r, z) in rows
    ]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["q", "chi_order", "root_index",
                                               "m", "ratio", "ratio_float"])
            w.writeheader()
            for row in printable:
                w.writerow(row)
    print(json.dumps(printable, indent=2), file=out)
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="congtors",
        description="Torsion in twisted (co)homology of congruence subgroups "
                    "of Bianchi groups.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    fi = sub.add_parser("field-info", help="imaginary quadratic field data")
    fi.add_argument("--D", type=int, required=True)
    fi.add_argument("--precision", type=int, default=9)
    fi.set_defaults(func=_cmd_field_info)

    sg = sub.add_parser("subgroup", help="congruence subgroup presentation data")
    _add_run_args(sg)
    sg.set_defaults(func=_cmd_subgroup)

    to = sub.add_parser("torsion", help="run the torsion pipeline over an m range")
    _add_run_args(to)
    to.set_defaults(func=_cmd_torsion)

    bo = sub.add_parser("bounds", help="run the pipeline and print the bound report")
    _add_run_args(bo)
    bo.set_defaults(func=_cmd_bounds)

    he = sub.add_parser("hecke-table", help="table of local intertwining ratios")
    he.add_argument("--q", default="5", help="comma-separated prime powers")
    he.add_argument("--orders", default="1", help="comma-separated character orders")
    he.add_argument("--m", default="2..4", help="m range")
    he.add_argument("--csv", default=None)
    he.set_defaults(func=_cmd_hecke_table)

    return p


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = make_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
