"""Windowed expansion of C(t)f for the attractive delta model.

Locates the single eigenvalue at -alpha/2, assembles residue + tail, and
prints the gap against the vertical-line (Bromwich) reference per time.
"""

import numpy as np

from resonwave.expansion import expand
from resonwave.model import (ContourSpec, PotentialSpec, UniformGrid,
                             cutoff_window, sample_state)

grid = UniformGrid(-5.0, 5.0, 1281)
V = PotentialSpec.delta(-2.0)
f = sample_state("bump", {"center": 1.2, "radius": 1.0}, grid)
window = cutoff_window(3, grid)
contour = ContourSpec(eps=0.05, g0_level=0.05, gstar_eta=1.0,
                      gstar_etatilde=0.05, im_truncation=40.0, quad_tol=1e-5)

for kind in ("cosine", "sine"):
    rep = expand(kind, [1.0, 2.0, 3.0], f, V, contour, window=window)
    print(f"\n{kind} family: {len(rep.terms)} residue term(s)")
    for term in rep.terms:
        print(f"  lambda0 = {term.lambda0:.6g}  mult {term.multiplicity}")
    print(f"  {'t':>4} {'tail norm':>12} {'oracle gap':>12}")
    for t, tn, gap in zip(rep.times, rep.tail_norms, rep.oracle_gap):
        print(f"  {t:4g} {tn:12.4e} {gap:12.4e}")
