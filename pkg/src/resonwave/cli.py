"""Command-line front end: scans, expansion runs, verification, coupling sweeps.

Subcommands
    resonances  locate Jost-function zeros for the configured model
    expand      assemble the windowed residue + tail expansion and compare
                against the vertical-line reference
    verify      run the model's self-check suite; exit 0 iff all pass
    scan-alpha  track zero trajectories over a coupling sweep

Exit codes: 0 ok, 1 verification failure, 2 config error, 3 numerical
non-convergence.  Errors are reported as one JSON object on stderr.
CSV uses %.17g; JSON numbers are raw doubles.  Runs with --threads 1 are
bit-reproducible; with more threads the CSV rows agree after sorting.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (ConfigError, NonConvergence, ResonwaveError,
                     TruncationNotConverged)
from .model import (DELTA, PIECEWISE, PotentialSpec, load_problem, serialize)
from .resonances import (ScanRegion, find_resonances, save_resonances_csv,
                         save_resonances_json)
from .resolvent import resolvent_residual
from .expansion import (expand, scan_bounds, save_expansion_json,
                        save_series_csv, spectral_projection_apply,
                        windowed_l2)
from .model import l2_norm


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, int(args.threads))
    env = os.environ.get("RESONWAVE_THREADS")
    return max(1, int(env)) if env else 1


def _load(args):
    """Config dict + ProblemSpec, with --tol override applied to quad_tol."""
    path = Path(args.config)
    if not path.exists():
        raise ConfigError("--config", f"no such file: {path}")
    doc = json.loads(path.read_text()) if path.suffix == ".json" \
        else json.loads(path.read_text())
    if not isinstance(doc, dict):
        raise ConfigError("$", "config must be a JSON object")
    if args.tol is not None:
        doc.setdefault("contour", {})["quad_tol"] = float(args.tol)
    problem = load_problem(doc)
    return doc, problem


def _scan_region(doc, problem) -> ScanRegion:
    sec = doc.get("scan")
    if sec is None:
        return scan_bounds(problem.potential, problem.contour)
    try:
        return ScanRegion(float(sec["re_min"]), float(sec["re_max"]),
                          float(sec["im_min"]), float(sec["im_max"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("scan", f"bad scan region: {exc}") from None


class _Manifest:
    def __init__(self, command, args, out_dir: Path):
        self.doc = {
            "command": command,
            "config": str(args.config),
            "out_dir": str(out_dir),
            "tol": args.tol,
            "threads": _threads(args),
            "version": __version__,
            "outputs": [],
            "timings": {},
        }
        self.out_dir = out_dir
        self._t0 = time.time()

    def add(self, name: str):
        self.doc["outputs"].append(name)

    def timing(self, name: str, seconds: float):
        self.doc["timings"][name] = seconds

    def write(self):
        self.doc["timings"]["total"] = time.time() - self._t0
        self.add("manifest.json")
        with open(self.out_dir / "manifest.json", "w") as fh:
            json.dump(self.doc, fh, indent=2)
            fh.write("\n")


# -- subcommands -----------------------------------------------------------

def _cmd_resonances(args) -> int:
    doc, problem = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    man = _Manifest("resonances", args, out)
    t0 = time.time()
    region = _scan_region(doc, problem)
    found = find_resonances(region, problem.potential, contour=problem.contour)
    man.timing("scan", time.time() - t0)
    save_resonances_csv(out / "resonances.csv", found)
    man.add("resonances.csv")
    save_resonances_json(out / "resonances.json", found, {
        "config": serialize(problem),
        "region": {"re_min": region.re_min, "re_max": region.re_max,
                   "im_min": region.im_min, "im_max": region.im_max},
    })
    man.add("resonances.json")
    man.write()
    for r in found:
        print(f"{r.lambda0.real:+.12g}{r.lambda0.imag:+.12g}j  "
              f"mult {r.multiplicity}  {r.kind}")
    return 0


def _cmd_expand(args) -> int:
    doc, problem = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    man = _Manifest("expand", args, out)
    sec = doc.get("expand", {})
    kind = sec.get("kind", "cosine")
    times = [float(t) for t in sec.get("times", [1.0, 2.0, 3.0])]
    n = int(sec.get("n", 1))
    nthreads = _threads(args)
    t0 = time.time()
    if nthreads > 1 and len(times) > 1:
        # t-sweep is embarrassingly parallel; one expand call per time keeps
        # the report helpers unchanged, resonance location is repeated though
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            parts = list(pool.map(
                lambda t: expand(kind, [t], problem.state, problem.potential,
                                 problem.contour, window=problem.window, n=n),
                times))
        report = parts[0]
        for extra in parts[1:]:
            report = replace(
                report,
                times=report.times + extra.times,
                tail_fields=report.tail_fields + extra.tail_fields,
                tail_norms=report.tail_norms + extra.tail_norms,
                reconstructions=report.reconstructions + extra.reconstructions,
                oracle_gap=report.oracle_gap + extra.oracle_gap,
                remainder_norms=report.remainder_norms + extra.remainder_norms,
            )
    else:
        report = expand(kind, times, problem.state, problem.potential,
                        problem.contour, window=problem.window, n=n)
    man.timing("expand", time.time() - t0)
    save_expansion_json(out / "expansion.json", report)
    man.add("expansion.json")
    save_series_csv(out / "series.csv", report)
    man.add("series.csv")
    man.write()
    for t, gap in zip(report.times, report.oracle_gap):
        print(f"t={t:g}  oracle gap {gap:.3e}")
    return 0


def _cmd_verify(args) -> int:
    doc, problem = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    man = _Manifest("verify", args, out)
    V, f, win = problem.potential, problem.state, problem.window
    contour = problem.contour
    tol = args.tol if args.tol is not None else 1e-4
    checks = []

    t0 = time.time()
    for lam in (1.0 + 0.5j, 2.0, 0.5 + 1.0j):
        try:
            r = resolvent_residual(lam, f, V, window=win)
            checks.append((f"resolvent_residual({lam:g})", r < tol, r))
        except ResonwaveError as exc:
            checks.append((f"resolvent_residual({lam:g})", False, str(exc)))
    man.timing("resolvent", time.time() - t0)

    t0 = time.time()
    region = _scan_region(doc, problem)
    try:
        found = find_resonances(region, V, contour=contour)
        conj_ok = True
        real_v = (V.kind == DELTA and V.alpha.imag == 0) or (
            V.kind == PIECEWISE and all(np.max(np.abs(np.imag(b))) == 0
                                        for b in V.blocks)) or V.kind == "free"
        if real_v:
            key = lambda z: (round(z.real, 8), round(z.imag, 8))
            lams = sorted((r.lambda0 for r in found
                           if region.contains(np.conj(r.lambda0))), key=key)
            conj = sorted((np.conj(r.lambda0) for r in found
                           if region.contains(np.conj(r.lambda0))), key=key)
            conj_ok = all(abs(a - b) < 1e-8 for a, b in zip(lams, conj))
        checks.append(("scan completes", True, len(found)))
        checks.append(("conjugate symmetry", conj_ok, len(found)))
    except ResonwaveError as exc:
        found = []
        checks.append(("scan completes", False, str(exc)))

    for r in found:
        if r.kind == "EigenvalueType" and r.multiplicity == 1:
            pf = spectral_projection_apply(r.lambda0, f, V).values
            ppf = spectral_projection_apply(
                r.lambda0, replace_values(f, pf), V).values
            gap = l2_norm(ppf - pf, problem.grid.spacing)
            # eigenfunctions decay like e^{-Re l0 |x|}; the grid clips their
            # tails, so allow for that truncation on narrow grids
            clip = np.exp(-2.0 * r.lambda0.real
                          * min(-problem.grid.x_min, problem.grid.x_max))
            checks.append((f"projection idempotent at {r.lambda0:.6g}",
                           gap < max(1e-6, 10.0 * clip), gap))
    man.timing("scan", time.time() - t0)

    t0 = time.time()
    try:
        rep = expand("cosine", [2.0], f, V, contour, window=win)
        gap = rep.oracle_gap[0]
        bound = 5.0 * (contour.quad_tol + 1e-5)
        checks.append(("expansion vs reference at t=2", gap < bound, gap))
    except ResonwaveError as exc:
        checks.append(("expansion vs reference at t=2", False, str(exc)))
    man.timing("expand", time.time() - t0)

    ok_all = all(ok for _, ok, _ in checks)
    report = [{"check": name, "pass": bool(ok), "value": val if isinstance(val, (int, float)) else str(val)}
              for name, ok, val in checks]
    with open(out / "verify.json", "w") as fh:
        json.dump({"passed": ok_all, "checks": report}, fh, indent=2)
        fh.write("\n")
    man.add("verify.json")
    man.write()
    for name, ok, val in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {val}")
    return 0 if ok_all else 1


def replace_values(f, values):
    """New sample values on f's grid, spline-evaluable off-grid; the support
    is widened to the whole grid because projections are not compactly
    supported."""
    from .expansion import field_to_state
    radius = max(abs(f.grid.x_min), abs(f.grid.x_max))
    return field_to_state(values, f.grid, radius, kinks=f.kinks)


def _sweep_values(doc) -> list[complex]:
    sec = doc.get("sweep")
    if sec is None:
        raise ConfigError("sweep", "scan-alpha needs a sweep section")
    if "values" in sec:
        out = []
        for v in sec["values"]:
            if isinstance(v, (list, tuple)):
                out.append(complex(float(v[0]), float(v[1])))
            else:
                out.append(complex(v))
        return out
    try:
        start, stop = float(sec["start"]), float(sec["stop"])
        count = int(sec["count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("sweep", f"bad sweep: {exc}") from None
    if count < 2:
        raise ConfigError("sweep.count", "must be >= 2")
    return [complex(a) for a in np.linspace(start, stop, count)]


def _with_coupling(V: PotentialSpec, alpha: complex) -> PotentialSpec:
    if V.kind == DELTA:
        return PotentialSpec.delta(alpha, V.beta)
    if V.kind == PIECEWISE and V.is_single_well and V.is_scalar:
        a = V.breakpoints[-1]
        return PotentialSpec.square_well(alpha, half_width=a)
    raise ConfigError("potential", "scan-alpha supports delta or single-well models")


def _cmd_scan_alpha(args) -> int:
    doc, problem = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    man = _Manifest("scan-alpha", args, out)
    alphas = _sweep_values(doc)
    nthreads = _threads(args)

    def one(alpha):
        Va = _with_coupling(problem.potential, alpha)
        region = _scan_region(doc, problem) if "scan" in doc \
            else scan_bounds(Va, problem.contour)
        return find_resonances(region, Va, contour=problem.contour)

    t0 = time.time()
    if nthreads > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            rows = list(pool.map(one, alphas))
    else:
        rows = [one(a) for a in alphas]
    man.timing("sweep", time.time() - t0)

    path = out / "trajectories.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha_re", "alpha_im", "zeros"])
        for alpha, found in zip(alphas, rows):
            lams = sorted((r.lambda0 for r in found),
                          key=lambda z: (z.real, z.imag))
            writer.writerow(["%.17g" % alpha.real, "%.17g" % alpha.imag,
                             ";".join("%.17g%+.17gj" % (z.real, z.imag)
                                      for z in lams)])
    man.add("trajectories.csv")
    man.write()
    print(f"{len(alphas)} couplings -> {path}")
    return 0


# -- entry point -----------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resonwave",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in (("resonances", _cmd_resonances), ("expand", _cmd_expand),
                     ("verify", _cmd_verify), ("scan-alpha", _cmd_scan_alpha)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=".")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.set_defaults(fn=fn)
    return p


def _error_json(exc: Exception) -> dict:
    doc = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        doc["field"] = exc.field_path
    return doc


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(json.dumps(_error_json(exc)), file=sys.stderr)
        return 2
    except (NonConvergence, TruncationNotConverged) as exc:
        print(json.dumps(_error_json(exc)), file=sys.stderr)
        return 3
    except ResonwaveError as exc:
        print(json.dumps(_error_json(exc)), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
