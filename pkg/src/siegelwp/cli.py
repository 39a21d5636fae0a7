"""Batch command line front end.

    siegelwp simulate <scenario.toml> [--out DIR] [--tol X] [--workers N]
    siegelwp compare  <scenario.toml> [--out DIR] [--tol X] [--workers N]
    siegelwp check    <suite> [--seed N] [--samples N] [--dim D] [--out DIR]

Exit status: 0 success, 1 runtime failure during integration, 2 configuration
error, 3 tolerance breach.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .checks import SUITES, run_suite
from .dynamics import hagedorn_rhs, heller_rhs
from .errors import ConfigError, SiegelWPError
from .integrate import compare_formulations, convergence_slope, drift_report, integrate_trajectory
from .scenario import OUT_ENV, Scenario, default_out_dir, load_scenario
from .trajio import write_csv
from .wavepacket import residual_norm

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_TOL = 0, 1, 2, 3
RESIDUAL_SAMPLES = 11
DRIFT_KEYS = ("energy_drift_max", "angular_momentum_drift_max", "momentum_residual_max",
              "onshell_residual_max")


class RunFailure(Exception):
    pass


def _workers(requested, n):
    return max(1, min(n, requested or os.cpu_count() or 1))


def _residual_profile(rec, V, prm):
    """Largest grid L2 Schrodinger residual over evenly spaced samples, divided by hbar."""
    rhs = hagedorn_rhs if rec.kind == "hagedorn" else heller_rhs
    idx = np.unique(np.linspace(0, len(rec) - 1, min(RESIDUAL_SAMPLES, len(rec))).round().astype(int))
    vals = [residual_norm(rec.states[i], rhs(rec.states[i], V, prm), V, prm) / prm.hbar for i in idx]
    return {"initial": vals[0], "final": vals[-1], "max": max(vals)}


def _simulate_one(sc: Scenario, point, kind):
    prm = point.prm
    try:
        if kind == "hagedorn":
            s0, argdet = sc.hagedorn_initial(prm)
            rec = integrate_trajectory(s0, point.potential, prm, point.step, argdet=argdet,
                                       meta=point.label)
        else:
            rec = integrate_trajectory(sc.heller_initial(prm), point.potential, prm, point.step,
                                       meta=point.label)
    except SiegelWPError as exc:
        raise RunFailure(f"{kind} run {point.label or '(base)'}: {type(exc).__name__}: {exc}") from None
    entry = {"label": point.label, "kind": kind, "drift": drift_report(rec)}
    if sc.residual:
        entry["residual"] = _residual_profile(rec, point.potential, prm)
    return point, rec, entry


def _state_error(a, b):
    return float(np.max(np.abs(a.states[-1].pack() - b.states[-1].pack())))


def _slopes(results):
    """Self-convergence slopes for groups sharing everything but dt (needs >= 3 dt values)."""
    groups = {}
    for point, rec, entry in results:
        rest = tuple((k, v) for k, v in point.label.items() if k != "dt")
        groups.setdefault((rest, entry["kind"]), []).append(rec)
    out = []
    for (rest, kind), recs in groups.items():
        recs = sorted(recs, key=lambda r: r.spec.dt)
        if len(recs) < 3 or len({r.spec.dt for r in recs}) < 3:
            continue
        ref, coarse = recs[0], recs[1:]
        errs = [_state_error(r, ref) for r in coarse]
        dts = [r.spec.dt for r in coarse]
        slope = convergence_slope(dts, errs) if all(e > 0 for e in errs) else float("nan")
        out.append({"group": dict(rest), "kind": kind, "reference_dt": ref.spec.dt,
                    "dt": dts, "errors": errs, "slope": slope})
    return out


def _residual_table(entries):
    rows = [{"hbar": e["label"].get("hbar"), "kind": e["kind"], **e["residual"]}
            for e in entries if "residual" in e]
    monotone = None
    by_kind = {}
    for r in rows:
        if r["hbar"] is not None:
            by_kind.setdefault(r["kind"], []).append(r)
    if by_kind:
        monotone = True
        for rs in by_kind.values():
            rs = sorted(rs, key=lambda r: r["hbar"])
            monotone &= all(a["max"] < b["max"] for a, b in zip(rs, rs[1:]))
    return rows, monotone


def _dump(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


def cmd_simulate(args) -> int:
    sc = load_scenario(args.file)
    out = default_out_dir(sc, args.out)
    kinds = ["hagedorn", "heller"] if sc.formulation == "both" else [sc.formulation]
    tasks = [(pt, k) for pt in sc.points() for k in kinds]
    with ThreadPoolExecutor(_workers(args.workers, len(tasks))) as pool:
        futures = [pool.submit(_simulate_one, sc, pt, k) for pt, k in tasks]
        results, failures = [], []
        for f in futures:
            try:
                results.append(f.result())
            except RunFailure as exc:
                failures.append(str(exc))
    entries = []
    for point, rec, entry in results:
        path = write_csv(rec, out / f"{sc.name}{point.tag}.{entry['kind']}.csv")
        entry["csv"] = str(path)
        entries.append(entry)
    table, monotone = _residual_table(entries)
    summary = {"scenario": sc.name, "source": sc.source, "formulation": sc.formulation,
               "runs": entries, "slopes": _slopes(results), "failures": failures}
    if table:
        summary["residual_table"] = table
        summary["residual_monotone_in_hbar"] = monotone
    breaches = []
    if args.tol is not None:
        for e in entries:
            for k in DRIFT_KEYS:
                v = e["drift"].get(k)
                if v is not None and not v <= args.tol:
                    breaches.append(f"{e['kind']} {e['label'] or '(base)'} {k}={v:.3e}")
    summary["tolerance"] = args.tol
    summary["breaches"] = breaches
    _dump(out / f"{sc.name}.summary.json", summary)

    for e in entries:
        dr = e["drift"]
        line = (f"{e['kind']:9s} {json.dumps(e['label']) if e['label'] else '(base)':24s} "
                f"energy {dr['energy_drift_max']:.3e}  J {dr['angular_momentum_drift_max']:.3e}")
        if "momentum_residual_max" in dr:
            line += f"  |M-J| {dr['momentum_residual_max']:.3e}  onshell {dr['onshell_residual_max']:.3e}"
        if "residual" in e:
            line += f"  residual/hbar {e['residual']['max']:.4e}"
        print(line)
    for s in summary["slopes"]:
        print(f"slope {s['kind']} {json.dumps(s['group'])}: {s['slope']:.3f}")
    if table:
        print(f"residual monotone in hbar: {monotone}")
    print(f"summary written to {out / (sc.name + '.summary.json')}")
    for msg in failures:
        print(f"error: {msg}", file=sys.stderr)
    if failures:
        return EXIT_RUNTIME
    for b in breaches:
        print(f"tolerance breach: {b}", file=sys.stderr)
    return EXIT_TOL if breaches else EXIT_OK


def _compare_one(sc: Scenario, point):
    s0, argdet = sc.hagedorn_initial(point.prm)
    try:
        c = compare_formulations(s0, point.potential, point.prm, point.step, argdet)
    except SiegelWPError as exc:
        raise RunFailure(f"compare {point.label or '(base)'}: {type(exc).__name__}: {exc}") from None
    return {"label": point.label, "projection_gap": c.projection_gap, "phase_gap": c.phase_gap,
            "t_end": float(c.hagedorn.times[-1]), "samples": len(c.hagedorn)}


def cmd_compare(args) -> int:
    sc = load_scenario(args.file)
    if sc.formulation != "both":
        raise ConfigError(f"compare needs formulation = \"both\", got {sc.formulation!r}",
                          key="formulation")
    tol = args.tol if args.tol is not None else sc.compare_tol
    out = default_out_dir(sc, args.out)
    points = sc.points()
    with ThreadPoolExecutor(_workers(args.workers, len(points))) as pool:
        futures = [pool.submit(_compare_one, sc, pt) for pt in points]
        rows, failures = [], []
        for f in futures:
            try:
                rows.append(f.result())
            except RunFailure as exc:
                failures.append(str(exc))
    for r in rows:
        r["passed"] = bool(r["projection_gap"] <= tol and r["phase_gap"] <= tol)
    report = {"scenario": sc.name, "source": sc.source, "tolerance": tol, "runs": rows,
              "failures": failures, "passed": bool(rows) and all(r["passed"] for r in rows) and not failures}
    _dump(out / f"{sc.name}.compare.json", report)
    for r in rows:
        print(f"{'PASS' if r['passed'] else 'FAIL'} {json.dumps(r['label']) if r['label'] else '(base)':24s} "
              f"projection gap {r['projection_gap']:.3e}  phase gap {r['phase_gap']:.3e}  (tol {tol:.1e})")
    print(f"report written to {out / (sc.name + '.compare.json')}")
    for msg in failures:
        print(f"error: {msg}", file=sys.stderr)
    if failures:
        return EXIT_RUNTIME
    return EXIT_OK if report["passed"] else EXIT_TOL


def cmd_check(args) -> int:
    dims = (args.dim,) if args.dim is not None else (1, 2, 3)
    if args.dim is not None and args.dim < 1:
        raise ConfigError("--dim must be >= 1", key="--dim")
    report = run_suite(args.suite, seed=args.seed, samples=args.samples, dims=dims)
    out = default_out_dir(None, args.out)
    path = out / f"check_{args.suite}.json"
    _dump(path, report.as_dict())
    if report.empty:
        print("empty report: no samples requested, nothing was checked")
        return EXIT_OK
    for r in report.results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.suite}/{r.name} d={r.d} "
              f"worst={r.worst:.3e} tol={r.tol:.1e} samples={r.samples}")
    worst = max(report.results, key=lambda r: r.worst / r.tol if r.tol > 0 else (math.inf if r.worst > 0 else 0))
    print(f"{sum(r.passed for r in report.results)}/{len(report.results)} passed; "
          f"closest to tolerance: {worst.suite}/{worst.name} d={worst.d} worst={worst.worst:.3e}")
    print(f"report written to {path}")
    return EXIT_OK if report.passed else EXIT_TOL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="siegelwp",
        description="Gaussian wave packet dynamics on the Siegel upper half space.",
        epilog=f"Output directory: --out, else the scenario's output.dir, else ${OUT_ENV}, "
               "else ./siegelwp-out.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory")

    for name, helptext in (("simulate", "integrate a scenario and write CSV trajectories"),
                           ("compare", "run both formulations and report the commutation gaps")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file", help="scenario TOML file (or the name of a bundled scenario)")
        common(p)
        p.add_argument("--tol", type=float, default=None, help="tolerance for the exit status")
        p.add_argument("--workers", type=int, default=None, help="worker threads for sweeps")

    p = sub.add_parser("check", help="run a randomized verification battery")
    p.add_argument("suite", choices=(*SUITES, "all"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--dim", type=int, default=None, help="single dimension (default: 1, 2 and 3)")
    common(p)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"simulate": cmd_simulate, "compare": cmd_compare, "check": cmd_check}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        key = f" [{exc.key}]" if exc.key else ""
        print(f"config error{key}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
