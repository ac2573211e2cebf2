"""Zero location for the (scaled) Jost function by the argument principle.

Winding numbers are computed by discrete phase tracking with step halving;
boxes are subdivided quadtree-style until each leaf isolates one zero
cluster, which is then polished by Newton (Muller fallback) and assigned a
multiplicity from a final small-circle winding count.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import BoundaryZero, NonConvergence, OnCurve
from .model import PIECEWISE, ContourSpec, PotentialSpec
from . import jost

EIGENVALUE = "EigenvalueType"
RESONANCE = "ResonanceType"

_R_LOC = 1e-3
_FLOOR = 1e-6


@dataclass(frozen=True)
class ScanRegion:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if self.re_min >= self.re_max or self.im_min >= self.im_max:
            raise ValueError("empty scan region")

    @property
    def side(self) -> float:
        return max(self.re_max - self.re_min, self.im_max - self.im_min)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max),
                       0.5 * (self.im_min + self.im_max))

    def contains(self, lam: complex, slack: float = 0.0) -> bool:
        return (self.re_min - slack <= lam.real <= self.re_max + slack
                and self.im_min - slack <= lam.imag <= self.im_max + slack)

    def dilate(self, factor: float) -> "ScanRegion":
        cr, ci = self.center.real, self.center.imag
        hr = 0.5 * (self.re_max - self.re_min) * factor
        hi = 0.5 * (self.im_max - self.im_min) * factor
        return ScanRegion(cr - hr, cr + hr, ci - hi, ci + hi)

    def quadrants(self, fr: float = 0.5, fi: float = 0.5):
        cr = self.re_min + fr * (self.re_max - self.re_min)
        ci = self.im_min + fi * (self.im_max - self.im_min)
        return [ScanRegion(self.re_min, cr, self.im_min, ci),
                ScanRegion(cr, self.re_max, self.im_min, ci),
                ScanRegion(self.re_min, cr, ci, self.im_max),
                ScanRegion(cr, self.re_max, ci, self.im_max)]


@dataclass(frozen=True)
class Resonance:
    lambda0: complex
    multiplicity: int
    kind: str | None = None
    newton_residual: float = float("nan")


# -- winding ---------------------------------------------------------------

def _phase_sum(w_of, z0, z1, w0, w1, depth=0):
    """Total continuous phase change of w along the segment [z0, z1]."""
    d = np.angle(w1 / w0)
    if abs(d) <= 0.5 * np.pi:
        return d
    if abs(z1 - z0) < 1e-12 * max(1.0, abs(z0)) or depth > 46:
        # the path runs essentially through a zero
        raise BoundaryZero(f"phase jump across {z0}")
    zm = 0.5 * (z0 + z1)
    wm = w_of(zm)
    return (_phase_sum(w_of, z0, zm, w0, wm, depth + 1)
            + _phase_sum(w_of, zm, z1, wm, w1, depth + 1))


def _winding_on_path(V: PotentialSpec, zs: np.ndarray) -> float:
    ws = jost.jost_function_scaled_batch(zs, V)
    if np.any(np.abs(ws) == 0.0):
        raise BoundaryZero("exact zero on scan path")
    w_of = lambda z: complex(jost.jost_function_scaled_batch(np.array([z]), V)[0])
    total = 0.0
    for k in range(len(zs) - 1):
        total += _phase_sum(w_of, zs[k], zs[k + 1], ws[k], ws[k + 1])
    return total / (2.0 * np.pi)


def _phase_rate_bound(V: PotentialSpec) -> float:
    """Crude upper bound on |d arg w_scaled / d lambda| used to pick a
    sampling step that cannot alias a full phase turn between samples."""
    if V.kind == PIECEWISE:
        return 2.0 + 4.0 * V.half_support * V.dim
    return 4.0


def _box_path(box: ScanRegion, V: PotentialSpec, refine: int = 1) -> np.ndarray:
    step = 0.5 / (_phase_rate_bound(V) * refine)
    pieces = []
    corners = [complex(box.re_min, box.im_min), complex(box.re_max, box.im_min),
               complex(box.re_max, box.im_max), complex(box.re_min, box.im_max)]
    for k in range(4):
        z0, z1 = corners[k], corners[(k + 1) % 4]
        n = max(24, int(np.ceil(abs(z1 - z0) / step)))
        t = np.linspace(0.0, 1.0, n, endpoint=False)
        pieces.append(z0 + t * (z1 - z0))
    pieces.append(np.array([corners[0]]))
    return np.concatenate(pieces)


def count_zeros(box: ScanRegion, V: PotentialSpec, refine: int = 1) -> int:
    """Number of Jost-function zeros in the box, counted with multiplicity."""
    return _count_zeros_region(box, V, refine)[0]


def _count_zeros_region(box: ScanRegion, V: PotentialSpec, refine: int = 1):
    """(count, region actually counted): the box is dilated slightly when a
    zero sits on its boundary, and root acceptance must match that region."""
    region = box
    dilations = 0
    while True:
        zs = _box_path(region, V, refine)
        ws = jost.jost_function_scaled_batch(zs, V)
        scale = np.max(np.abs(ws))
        if np.min(np.abs(ws)) > 1e-9 * scale:
            try:
                winding = _winding_on_path(V, zs)
            except BoundaryZero:
                winding = None
            if winding is not None:
                n = int(round(winding))
                if abs(winding - n) > 0.05:
                    if refine > 64:
                        raise NonConvergence(region, "(winding not integral)")
                    refine *= 2
                    continue
                return n, region
        if dilations >= 3:
            raise BoundaryZero(f"zero on boundary of {region} after 3 dilations")
        region = region.dilate(1.01 + 0.007 * dilations)
        dilations += 1


def winding_multiplicity(lam0: complex, V: PotentialSpec, r_loc: float = _R_LOC) -> int:
    theta = np.linspace(0.0, 2.0 * np.pi, 129)
    zs = lam0 + r_loc * np.exp(1j * theta)
    return int(round(_winding_on_path(V, zs)))


# -- refinement ------------------------------------------------------------

def _w_scaled(lam: complex, V: PotentialSpec) -> complex:
    return complex(jost.jost_function_scaled_batch(np.array([lam]), V)[0])


def _newton(V: PotentialSpec, lam: complex, deriv_order: int = 0,
            max_iter: int = 60) -> complex | None:
    """Newton on w_scaled (deriv_order=0) or on its deriv_order-th derivative
    (used to polish multiple zeros). Derivatives via Cauchy circles, which are
    exact for entire functions."""
    def g(z):
        if deriv_order == 0:
            return _w_scaled(z, V)
        return jost.cauchy_derivative(
            lambda zz: jost.jost_function_scaled_batch(zz, V), z, deriv_order)

    def gp(z):
        return jost.cauchy_derivative(
            lambda zz: jost.jost_function_scaled_batch(zz, V), z, deriv_order + 1)

    z = complex(lam)
    for _ in range(max_iter):
        gz, gpz = g(z), gp(z)
        if gpz == 0:
            return None
        dz = gz / gpz
        z = z - dz
        if abs(dz) < 1e-13 * max(1.0, abs(z)):
            return z
    return None


def _muller(V: PotentialSpec, lam: complex, spread: float,
            max_iter: int = 80) -> complex | None:
    pts = [lam - spread, lam, lam + spread * 1j]
    vals = [_w_scaled(p, V) for p in pts]
    for _ in range(max_iter):
        p0, p1, p2 = pts[-3:]
        f0, f1, f2 = vals[-3:]
        h1, h2 = p1 - p0, p2 - p1
        if h1 == 0 or h2 == 0 or h2 + h1 == 0:
            return None
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = np.sqrt(b * b - 4.0 * f2 * a)
        denom = b + disc if abs(b + disc) > abs(b - disc) else b - disc
        if denom == 0:
            return None
        step = -2.0 * f2 / denom
        p3 = p2 + step
        pts.append(p3)
        vals.append(_w_scaled(p3, V))
        if abs(step) < 1e-13 * max(1.0, abs(p3)):
            return p3
    return None


def _starts(box: ScanRegion):
    pts = []
    for fr in (0.5, 0.25, 0.75):
        for fi in (0.5, 0.3, 0.7):
            pts.append(complex(box.re_min + fr * (box.re_max - box.re_min),
                               box.im_min + fi * (box.im_max - box.im_min)))
    return pts


def _resolve_leaf(box: ScanRegion, V: PotentialSpec, count: int,
                  counted: ScanRegion | None = None):
    """Try to account for all `count` zeros in the box by Newton refinement.
    Returns a list of Resonance on success, None if the caller should
    subdivide further. `counted` is the (possibly dilated) region the count
    refers to; roots are accepted only strictly inside it, so a leaf can
    never claim a neighbouring box's zero."""
    if count == 0:
        return []
    counted = counted or box
    found: list[Resonance] = []
    for s in _starts(box):
        root = _newton(V, s) or _muller(V, s, 0.2 * box.side + 1e-8)
        if root is None or not counted.contains(root, slack=1e-9 * (1.0 + abs(root))):
            continue
        if any(abs(root - r.lambda0) < 1e-8 for r in found):
            continue
        mult = winding_multiplicity(root, V)
        if mult >= 1:
            found.append(Resonance(root, mult, None, abs(_w_scaled(root, V))))
        if sum(r.multiplicity for r in found) == count:
            return found
    # cluster fallback: polish an m-fold zero via Newton on W^{(m-1)}
    if count >= 2:
        for s in _starts(box):
            root = _newton(V, s, deriv_order=count - 1)
            if root is not None and counted.contains(root, slack=1e-9 * (1.0 + abs(root))):
                mult = winding_multiplicity(root, V)
                if mult == count:
                    return [Resonance(root, mult, None, abs(_w_scaled(root, V)))]
    if box.side <= _FLOOR:
        return [Resonance(box.center, count, None, abs(_w_scaled(box.center, V)))]
    return None


def _search(box: ScanRegion, V: PotentialSpec, depth: int = 0) -> list[Resonance]:
    count, counted = _count_zeros_region(box, V)
    if count == 0:
        return []
    if depth > 60:
        raise NonConvergence(box)
    got = _resolve_leaf(box, V, count, counted)
    if got is not None and sum(r.multiplicity for r in got) == count:
        return got
    # deterministic jitter keeps split lines off zeros hit at previous depths
    fr = (0.5, 0.531, 0.468)[depth % 3]
    fi = (0.531, 0.5, 0.468)[depth % 3]
    out = []
    for q in box.quadrants(fr, fi):
        out.extend(_search(q, V, depth + 1))
    return out


def _merge(roots: list[Resonance]) -> list[Resonance]:
    merged: list[Resonance] = []
    for r in sorted(roots, key=lambda r: (r.lambda0.real, r.lambda0.imag)):
        if merged and abs(merged[-1].lambda0 - r.lambda0) < 1e-8:
            prev = merged[-1]
            keep = prev if prev.newton_residual <= r.newton_residual else r
            merged[-1] = replace(keep, multiplicity=max(prev.multiplicity, r.multiplicity))
        else:
            merged.append(r)
    return merged


def find_resonances(region: ScanRegion, V: PotentialSpec,
                    contour: ContourSpec | None = None) -> list[Resonance]:
    """All Jost-function zeros in the region (origin excluded by a small
    margin), Newton-polished, with multiplicities; classified when a contour
    is supplied. The summed multiplicities must equal the whole-region count."""
    boxes = _exclude_origin(region)
    total = sum(count_zeros(b, V) for b in boxes)
    roots: list[Resonance] = []
    for b in boxes:
        roots.extend(_search(b, V))
    roots = _merge(roots)
    found = sum(r.multiplicity for r in roots)
    if found != total:
        raise NonConvergence(region, f"(found {found} of {total} zeros)")
    if contour is not None:
        roots = [classify(r, contour) for r in roots]
        roots = [r for r in roots
                 if r.lambda0.real > float(contour.g_star(r.lambda0.imag)) + contour.eps]
    return roots


def _exclude_origin(region: ScanRegion, margin: float = 1e-3) -> list[ScanRegion]:
    """Split the region into rectangles avoiding a margin-sized square at 0."""
    if not region.contains(0.0 + 0.0j):
        return [region]
    m = margin
    boxes = []
    if region.re_min < -m:
        boxes.append(ScanRegion(region.re_min, -m, region.im_min, region.im_max))
    if region.re_max > m:
        boxes.append(ScanRegion(m, region.re_max, region.im_min, region.im_max))
    if region.im_min < -m:
        boxes.append(ScanRegion(max(region.re_min, -m), min(region.re_max, m),
                                region.im_min, -m))
    if region.im_max > m:
        boxes.append(ScanRegion(max(region.re_min, -m), min(region.re_max, m),
                                m, region.im_max))
    return boxes


def classify(r: Resonance, contour: ContourSpec) -> Resonance:
    if abs(r.lambda0.real - contour.g0_level) <= 1e-6:
        raise OnCurve(f"zero at {r.lambda0} lies on the classification level")
    kind = EIGENVALUE if r.lambda0.real > contour.g0_level else RESONANCE
    return replace(r, kind=kind)


# -- persistence -----------------------------------------------------------

def resonances_to_rows(resonances: list[Resonance]) -> list[list[str]]:
    rows = []
    for r in sorted(resonances, key=lambda r: (r.lambda0.real, r.lambda0.imag)):
        rows.append(["%.17g" % r.lambda0.real, "%.17g" % r.lambda0.imag,
                     str(r.multiplicity), r.kind or "", "%.17g" % r.newton_residual])
    return rows


def save_resonances_csv(path, resonances: list[Resonance]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im", "multiplicity", "kind", "newton_residual"])
        writer.writerows(resonances_to_rows(resonances))


def save_resonances_json(path, resonances: list[Resonance], metadata: dict) -> None:
    doc = {
        "resonances": [
            {"re": r.lambda0.real, "im": r.lambda0.imag,
             "multiplicity": r.multiplicity, "kind": r.kind,
             "newton_residual": r.newton_residual}
            for r in sorted(resonances, key=lambda r: (r.lambda0.real, r.lambda0.imag))
        ],
        "scan": metadata,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
