"""Twelve end-to-end acceptance checks, one printed pass/fail line each.

Run with `pytest -v -s tests/test_acceptance.py` to see the lines.
"""

import csv
import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

from resonwave import oracle
from resonwave.expansion import (delta_projection_closed, expand,
                                 field_to_state, residue_term,
                                 spectral_projection_apply, windowed_l2)
from resonwave.jost import (double_zero_coupling, jost_function,
                            jost_function_derivative,
                            jost_function_scaled_batch, well_wpp_at_minus1)
from resonwave.model import (ContourSpec, LocalizedState, PotentialSpec,
                             UniformGrid, cutoff_window, l2_norm,
                             sample_state)
from resonwave.resolvent import resolvent_residual
from resonwave.resonances import (Resonance, ScanRegion, find_resonances,
                                  winding_multiplicity)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _report(num, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}"
    print(line)
    assert ok, line


def test_criterion_01_delta_eigenvalue(contour):
    t0 = time.time()
    V = PotentialSpec.delta(-2.0)
    region = ScanRegion(-1.5, 1.5, -1.0, 1.0)
    found = find_resonances(region, V, contour=contour)
    dt = time.time() - t0
    ok = (len(found) == 1 and abs(found[0].lambda0 - 1.0) < 1e-10
          and found[0].multiplicity == 1
          and found[0].kind == "EigenvalueType" and dt < 1.0)
    _report(1, ok, f"delta alpha=-2: lambda={found[0].lambda0:.3g}, "
                   f"mult {found[0].multiplicity}, {found[0].kind}, {dt:.2f}s")


def test_criterion_02_delta_resonance():
    V = PotentialSpec.delta(2.0)
    contour = ContourSpec(eps=0.05, g0_level=0.05, gstar_eta=1.5,
                          gstar_etatilde=0.05, im_truncation=40.0,
                          quad_tol=1e-5)
    found = find_resonances(ScanRegion(-1.4, 0.5, -0.5, 0.5), V,
                            contour=contour)
    ok = (len(found) == 1 and abs(found[0].lambda0 + 1.0) < 1e-10
          and found[0].multiplicity == 1 and found[0].kind == "ResonanceType")
    _report(2, ok, f"delta alpha=+2: lambda={found[0].lambda0:.3g}, "
                   f"{found[0].kind}")


def test_criterion_03_free_jost_identity():
    rng = np.random.default_rng(42)
    lams = rng.uniform(-5, 5, (100, 2)) @ np.array([1.0, 1.0j])
    w = jost_function_scaled_batch(lams, PotentialSpec.free())
    rel = float(np.max(np.abs(w - 2.0 * lams) / np.abs(2.0 * lams)))
    _report(3, rel < 1e-12, f"max |W - 2l|/|2l| = {rel:.2e} over 100 samples")


def _well_bound_lams(alpha: float):
    kmax = np.sqrt(alpha)
    lams = []
    for which in ("even", "odd"):
        def cond(k):
            lam = np.sqrt(alpha - k * k)
            return lam - k * np.tan(k) if which == "even" \
                else lam + k / np.tan(k)
        ks = np.linspace(1e-9, kmax - 1e-9, 4001)
        vals = [cond(k) for k in ks]
        for a, b, va, vb in zip(ks, ks[1:], vals, vals[1:]):
            if np.isfinite(va) and np.isfinite(vb) and va * vb < 0 \
                    and abs(va) < 50 and abs(vb) < 50:
                k0 = brentq(cond, a, b, xtol=1e-14)
                lams.append(float(np.sqrt(alpha - k0 * k0)))
    return sorted(lams)


def test_criterion_04_well_bound_states():
    alpha = 5.0
    V = PotentialSpec.square_well(alpha)
    expect = _well_bound_lams(alpha)
    region = ScanRegion(0.01, np.sqrt(alpha) + 0.2, -0.5, 0.5)
    found = sorted(r.lambda0.real for r in find_resonances(region, V))
    count_ap = sum(winding_multiplicity(l, V) for l in found)
    gaps = [abs(a - b) for a, b in zip(found, expect)]
    ok = (len(found) == len(expect) and max(gaps) < 1e-8
          and count_ap == len(expect))
    _report(4, ok, f"{len(found)} bound states, max gap to bisection "
                   f"{max(gaps):.2e}, argument-principle count {count_ap}")


def test_criterion_05_double_resonance():
    alpha = double_zero_coupling()
    V = PotentialSpec.square_well(alpha)
    found = find_resonances(ScanRegion(-1.4, -0.6, -0.4, 0.4), V)
    r = found[0]
    wind = winding_multiplicity(-1.0, V)
    wpp = jost_function_derivative(-1.0, V, order=2)
    ref = well_wpp_at_minus1(alpha)
    rel = abs(wpp - ref) / abs(ref)
    ok = (len(found) == 1 and r.multiplicity == 2 and wind == 2
          and abs(r.lambda0 + 1.0) < 1e-6 and rel < 1e-6)
    _report(5, ok, f"alpha={alpha:.6f}: lambda0={r.lambda0:.6g}, "
                   f"mult {r.multiplicity}, winding {wind}, "
                   f"|W''-ref|/|ref|={rel:.2e}")


def test_criterion_06_projection():
    g = UniformGrid(-12.0, 12.0, 3073)
    V = PotentialSpec.delta(-2.0)
    f = sample_state("indicator", {"a": -1.0, "b": 1.0}, g)
    pf = spectral_projection_apply(1.0, f, V).values
    ppf = spectral_projection_apply(
        1.0, field_to_state(pf, g, 12.0, kinks=(0.0,)), V).values
    idem = l2_norm(ppf - pf, g.spacing)
    closed = delta_projection_closed(f, V).values
    route = l2_norm(pf - closed, g.spacing)
    expect = 2.0 * (1.0 - np.exp(-1.0)) * np.exp(-np.abs(g.nodes()))
    exact = l2_norm(closed - expect, g.spacing)
    ok = idem < 1e-8 and route < 1e-8 and exact < 1e-6
    _report(6, ok, f"||P^2f-Pf||={idem:.2e}, contour-vs-closed={route:.2e}, "
                   f"closed-vs-analytic={exact:.2e}")


def test_criterion_07_expansion_vs_oracle(grid, window):
    t0 = time.time()
    V = PotentialSpec.delta(-2.0)
    f = sample_state("indicator", {"a": -1.0, "b": 1.0}, grid)
    r = Resonance(lambda0=1.0 + 0.0j, multiplicity=1)
    ts = np.arange(2.0, 6.01, 0.5)
    details = []
    ok = True
    for kind, kappa, prop in (("cosine", 1, oracle.delta_cosine_exact),
                              ("sine", 0, oracle.delta_sine_exact)):
        term = residue_term(r, kappa, f, V)
        norms = [windowed_l2(prop(t, f, V).values - term.evaluate(t),
                             window, grid.spacing) for t in ts]
        slope = float(np.polyfit(ts, np.log(norms), 1)[0])
        n5 = norms[list(ts).index(5.0)]
        ok = ok and n5 <= 1e-3 and slope <= -1.0
        details.append(f"{kind}: |rem(5)|={n5:.1e}, slope={slope:.2f}")
    dt = time.time() - t0
    ok = ok and dt < 60.0
    _report(7, ok, "; ".join(details) + f"; {dt:.1f}s")


def test_criterion_08_decomposition_identity(grid, window, contour):
    bound = 5.0 * (contour.quad_tol + 1e-5)
    worst = 0.0
    for V, f in ((PotentialSpec.delta(-2.0),
                  sample_state("bump", {"center": 1.2, "radius": 1.0}, grid)),
                 (PotentialSpec.square_well(5.0),
                  sample_state("bump", {"center": 0.3, "radius": 0.6}, grid))):
        for kind in ("cosine", "sine"):
            rep = expand(kind, [1.0, 2.0, 3.0], f, V, contour, window=window)
            worst = max(worst, max(rep.oracle_gap))
    _report(8, worst < bound,
            f"max residues+tail vs Bromwich gap {worst:.2e} (bound {bound:.0e})")


def test_criterion_09_oracle_triangle():
    h = 2.0 ** -9
    g = UniformGrid(-8.0, 8.0, int(16 / h) + 1)
    f = sample_state("bump", {"center": 0.0, "radius": 1.0}, g)
    win = cutoff_window(3, g)
    V = PotentialSpec.free()
    t = 2.0
    da = oracle.dalembert_cosine(t, f).values
    lf = oracle.timestep_wave(t, f, None, V, dt=h / 4.0).u.values
    br = oracle.bromwich_apply("cosine", t, f, V, window=win).values
    gaps = [windowed_l2(a - b, win, g.spacing)
            for a, b in ((da, lf), (da, br), (lf, br))]
    # functional equation with an exact evaluator for the inner C(s)f
    tt, s = 0.7, 0.4
    cs = LocalizedState(
        grid=g, values=oracle.dalembert_cosine(s, f).values,
        support_radius=f.support_radius + s,
        eval_fn=lambda xv: 0.5 * (f.evaluate(np.asarray(xv) + s)
                                  + f.evaluate(np.asarray(xv) - s)))
    fe = windowed_l2(
        2.0 * oracle.dalembert_cosine(tt, cs).values
        - oracle.dalembert_cosine(tt + s, f).values
        - oracle.dalembert_cosine(tt - s, f).values, win, g.spacing)
    ok = max(gaps) < 1e-4 and fe < 1e-10
    _report(9, ok, f"triangle gaps {['%.1e' % x for x in gaps]}, "
                   f"functional-eq {fe:.1e}")


def test_criterion_10_resolvent_identity():
    g = UniformGrid(-8.0, 8.0, 2 ** 14 + 1)  # h = 2^-10
    worst = 0.0
    for V, prm in ((PotentialSpec.delta(2.0), {"center": 1.2, "radius": 1.0}),
                   (PotentialSpec.square_well(5.0),
                    {"center": 0.3, "radius": 0.6})):
        f = sample_state("bump", prm, g)
        for lam in (1.0, 2.0, 1.0 + 1.0j):
            worst = max(worst, resolvent_residual(lam, f, V))
    _report(10, worst < 1e-4, f"max resolvent residual {worst:.2e} at h=2^-10")


def test_criterion_11_matrix_well():
    evals = [5.0, -3.0 + 1.0j]
    Q = np.array([[2.0, 1.0], [1.0, 1.0]])
    V0 = Q @ np.diag(evals) @ np.linalg.inv(Q)
    Vm = PotentialSpec.square_well(V0)
    region = ScanRegion(-2.0, 3.0, -4.0, 4.0)
    got = sorted((r.lambda0 for r in find_resonances(region, Vm)),
                 key=lambda z: (round(z.real, 8), round(z.imag, 8)))
    expect = []
    for e in evals:
        expect.extend(r.lambda0
                      for r in find_resonances(region, PotentialSpec.square_well(e)))
    expect = sorted(expect, key=lambda z: (round(z.real, 8), round(z.imag, 8)))
    ok = len(got) == len(expect) and all(
        abs(a - b) < 1e-8 for a, b in zip(got, expect))
    gap = max((abs(a - b) for a, b in zip(got, expect)), default=float("inf"))
    _report(11, ok, f"{len(got)} det-Jost zeros vs {len(expect)} scalar-union "
                    f"zeros, max gap {gap:.2e}")


def test_criterion_12_determinism(tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        r = subprocess.run(
            [sys.executable, "-m", "resonwave.cli", "resonances",
             "--config", str(CONFIGS / "delta_m2.json"),
             "--out", str(out), "--threads", "1"],
            capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        outs.append((out / "resonances.csv").read_bytes())
    ok = outs[0] == outs[1]
    _report(12, ok, f"two --threads 1 runs byte-identical: {ok}")
