"""Residue terms, zero-frequency terms, and contour tails of the cosine and
sine operator-family expansions.

The windowed solution of u'' = (d_xx + V) u with data f decomposes as

    phi_i C(t) f = sum over located zeros lambda0 of Res[e^{lt} l^kappa R(l) f]
                 + zero-frequency term + p.v. tail along the shifted log curve,

with kappa = 1 for the cosine family and kappa = 0 for the sine family.  The
tail is computed from the Bromwich-type representation

    C(t) f = sum_{j<n} t^{2j}/(2j)! A^j f + (1/2 pi i) int e^{lt} l^{1-2n} R(l) A^n f dl
    S(t) f = sum_{j<n} t^{2j+1}/(2j+1)! A^j f + (1/2 pi i) int e^{lt} l^{-2n} R(l) A^n f dl

deformed onto lambda(s) = g_*(s) + eps + i s; the identity
R(l) A^n f = l^{2n} R(l) f - sum_{j<n} l^{2j} A^{n-1-j} f shows the residues
picked up at lambda0 != 0 are exactly the kappa-weighted ones above, and the
residue at 0 cancels the Taylor block up to the Laurent moments of R(l) f.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonSimpleDerivative, TruncationNotConverged
from .model import (DELTA, FREE, PIECEWISE, ContourSpec, CutoffWindow,
                    LocalizedState, PotentialSpec, UniformGrid, l2_norm)
from . import jost
from .resolvent import Field, apply_resolvent_batch, apply_semi_separable_batch, \
    operator_apply
from .resonances import Resonance, ScanRegion, find_resonances, winding_multiplicity

_CIRCLE_NODES = 64


def _circle(lam0: complex, radius: float, n: int = _CIRCLE_NODES):
    theta = 2.0 * np.pi * np.arange(n) / n
    lams = lam0 + radius * np.exp(1j * theta)
    # (1/2 pi i) ∮ g dl  ==  mean over nodes of g(l) * (l - lam0)
    weights = (lams - lam0) / n
    return lams, weights


def windowed_l2(values: np.ndarray, window: CutoffWindow | None,
                h: float) -> float:
    v = np.asarray(values)
    if window is not None:
        v = v * window.samples
    return l2_norm(v, h)


# -- polynomial factors ----------------------------------------------------

def poly_coeff(kappa: int, mu: complex, j: int) -> np.ndarray:
    """Ascending coefficients of the polynomial p(t) with

        (1/2 pi i) ∮_{mu} l^kappa e^{lt} / (l^2 - mu^2)^j dl = p(t) e^{mu t}.

    Closed forms for j <= 2; circle quadrature plus a Vandermonde fit in t
    for 3 <= j <= 6.
    """
    if kappa not in (0, 1):
        raise ValueError("kappa must be 0 or 1")
    if mu == 0:
        raise ValueError("mu must be nonzero")
    if not 1 <= j <= 6:
        raise ValueError("j must be in 1..6")
    mu = complex(mu)
    if j == 1:
        return np.array([0.5 if kappa == 1 else 0.5 / mu], dtype=complex)
    if j == 2:
        if kappa == 1:
            return np.array([0.0, 0.25 / mu], dtype=complex)
        return np.array([-0.25 / mu ** 3, 0.25 / mu ** 2], dtype=complex)
    radius = 0.3 * min(1.0, abs(mu))
    lams, wts = _circle(mu, radius)
    base = lams ** kappa / (lams * lams - mu * mu) ** j
    ts = np.arange(j, dtype=float)
    vals = np.array([np.sum(base * np.exp(lams * t) * wts) * np.exp(-mu * t)
                     for t in ts])
    vander = np.vander(ts, j, increasing=True)
    return np.linalg.solve(vander, vals)


# -- spectral projections --------------------------------------------------

def delta_projection_closed(f: LocalizedState, V: PotentialSpec) -> Field:
    """Rank-one spectral projection of the delta model (alpha < 0):
    P f = (-alpha/2) e^{alpha|x-beta|/2} <f, e^{alpha|.-beta|/2}>, with the
    bilinear (unconjugated) pairing."""
    if V.kind != DELTA:
        raise ValueError("closed-form projection is specific to the delta model")
    alpha, beta = V.alpha, V.beta
    from .resolvent import _build_rule
    rule = _build_rule(f, V, 16)
    inner = np.sum(rule.wq * rule.fq * np.exp(alpha * np.abs(rule.yq - beta) / 2.0))
    xs = f.grid.nodes()
    shape = np.exp(alpha * np.abs(xs - beta) / 2.0)
    return Field(grid=f.grid, values=(-alpha / 2.0) * inner * shape)


def spectral_projection_apply(mu: complex, f: LocalizedState, V: PotentialSpec,
                              r_star: float | None = None) -> Field:
    """Riesz projection (1/pi i) ∮_mu l R(l) f dl on a small circle around a
    located zero mu, applied to f via the resolvent."""
    mu = complex(mu)
    if r_star is None:
        r_star = min(0.25, 0.45 * abs(mu)) if mu != 0 else 0.25
    lams, wts = _circle(mu, r_star)
    rf = apply_resolvent_batch(lams, f, V)
    vals = 2.0 * np.sum((lams * wts)[:, None] * rf, axis=0)
    return Field(grid=f.grid, values=vals)


# -- residue terms ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ResidueTerm:
    """One resonance/eigenvalue contribution p(t) e^{lambda0 t} with
    field-valued polynomial coefficients: value(t) = e^{lambda0 t} *
    sum_k t^k coeff_fields[k]."""

    lambda0: complex
    kappa: int
    multiplicity: int
    grid: UniformGrid
    coeff_fields: np.ndarray = field(repr=False)  # (mult, n_x)

    def evaluate(self, t: float) -> np.ndarray:
        powers = np.array([t ** k for k in range(self.coeff_fields.shape[0])])
        return np.exp(self.lambda0 * t) * (powers @ self.coeff_fields)

    @property
    def spatial(self) -> np.ndarray:
        return self.coeff_fields[0]

    @property
    def poly(self) -> np.ndarray:
        """Scalar view of the polynomial: projections of each coefficient
        field onto the leading one (exact when the fields are parallel, e.g.
        for simple zeros). degree(poly) <= multiplicity - 1 always."""
        s = self.coeff_fields[0]
        denom = np.vdot(s, s)
        return np.array([np.vdot(s, c) / denom for c in self.coeff_fields])


def _numerator_apply(lams, f: LocalizedState, V: PotentialSpec) -> np.ndarray:
    """W(l) * R(l) f for scalar models (entire in l), shape (n_lam, n_x)."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    if V.kind == DELTA:
        # W R = ((2l+a)/(2l)) * free numerator
        #       - (a/(2l)) e^{-l|x-b|} int e^{-l|y-b|} f,
        # with the pole of the rank-one correction cancelled analytically
        alpha, beta = V.alpha, V.beta
        free_model = PotentialSpec.free()
        num = apply_semi_separable_batch(lams, f, free_model)
        xs = f.grid.nodes()
        from .resolvent import _build_rule
        rule = _build_rule(f, V, 16)
        inner = np.array([np.sum(rule.wq * rule.fq * np.exp(-l * np.abs(rule.yq - beta)))
                          for l in lams])
        shape_x = np.exp(-lams[:, None] * np.abs(xs - beta)[None, :])
        return (num * ((2.0 * lams + alpha) / (2.0 * lams))[:, None]
                - (alpha / (2.0 * lams))[:, None] * inner[:, None] * shape_x)
    return apply_semi_separable_batch(lams, f, V)


def residue_term(r: Resonance, kappa: int, f: LocalizedState, V: PotentialSpec,
                 radius: float | None = None, method: str = "moments") -> ResidueTerm:
    """Residue of e^{lt} l^kappa R(l) f at the located zero r.lambda0.

    method="moments": coefficient fields from circle moments,
        c_k = (1/2 pi i) ∮ (l - lambda0)^k l^kappa R(l) f dl / k!.
    method="closed": explicit simple/double-zero residue rules
        F/W' and 2F'/W'' - 2FW'''/(3 W''^2) with F(l) = l^kappa W(l) R(l) f;
        cross-check path, scalar models, multiplicity <= 2.
    """
    lam0 = complex(r.lambda0)
    m = r.multiplicity
    if radius is None:
        radius = 1e-2 * max(1.0, abs(lam0))
    if m == 1:
        wp = jost.jost_function_derivative(lam0, V, 1)
        if abs(wp) < 1e-10:
            raise NonSimpleDerivative(
                f"|W'({lam0})| = {abs(wp):.2e} but multiplicity is 1")
    if method == "closed":
        return _residue_term_closed(lam0, m, kappa, f, V)
    lams, wts = _circle(lam0, radius)
    rf = apply_resolvent_batch(lams, f, V)
    integrand = (lams ** kappa)[:, None] * rf
    coeffs = np.empty((m, f.grid.nodes().size), dtype=complex)
    for k in range(m):
        moment = np.sum(((lams - lam0) ** k * wts)[:, None] * integrand, axis=0)
        coeffs[k] = moment / math.factorial(k)
    return ResidueTerm(lambda0=lam0, kappa=kappa, multiplicity=m,
                       grid=f.grid, coeff_fields=coeffs)


def _residue_term_closed(lam0, m, kappa, f, V) -> ResidueTerm:
    if m > 2:
        raise ValueError("closed-form residues implemented for multiplicity <= 2")
    nf = lambda l: _numerator_apply(np.array([l]), f, V)[0]
    n0 = nf(lam0)
    if m == 1:
        wp = jost.jost_function_derivative(lam0, V, 1)
        coeffs = (lam0 ** kappa * n0 / wp)[None, :]
    else:
        wpp = jost.jost_function_derivative(lam0, V, 2)
        wppp = jost.jost_function_derivative(lam0, V, 3)
        # vector-valued Cauchy derivative of F0(l) = l^kappa N(l) f
        radius = 1e-2 * max(1.0, abs(lam0))
        lams, wts = _circle(lam0, radius)
        nvals = _numerator_apply(lams, f, V)
        fvals = (lams ** kappa)[:, None] * nvals
        f0p = np.sum((wts / (lams - lam0) ** 2)[:, None] * fvals, axis=0)
        f0 = lam0 ** kappa * n0
        c0 = 2.0 * f0p / wpp - 2.0 * f0 * wppp / (3.0 * wpp * wpp)
        c1 = 2.0 * f0 / wpp
        coeffs = np.stack([c0, c1])
    return ResidueTerm(lambda0=lam0, kappa=kappa, multiplicity=m,
                       grid=f.grid, coeff_fields=coeffs)


# -- zero-frequency term ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class ZeroResonanceTerm:
    """Laurent moments L_m = (1/2 pi i) ∮_0 l^{m-1} R(l) f dl, m = 1..order.
    Contribution to the kappa-family: sum_m L_m t^{m-1-kappa}/(m-1-kappa)!
    over m with m - 1 - kappa >= 0."""

    grid: UniformGrid
    moments: np.ndarray = field(repr=False)  # (order, n_x)

    @property
    def order(self) -> int:
        return self.moments.shape[0]

    @property
    def even_part(self) -> list:
        return [self.moments[k] for k in range(0, self.order, 2)]

    @property
    def odd_part(self) -> list:
        return [self.moments[k] for k in range(1, self.order, 2)]

    def evaluate(self, kappa: int, t: float) -> np.ndarray:
        out = np.zeros(self.moments.shape[1], dtype=complex)
        for m in range(1, self.order + 1):
            p = m - 1 - kappa
            if p >= 0:
                out += self.moments[m - 1] * t ** p / math.factorial(p)
        return out


def zero_resonance_term(f: LocalizedState, V: PotentialSpec,
                        contour: ContourSpec | None = None,
                        r0: float = 1e-3) -> ZeroResonanceTerm | None:
    """Detect a zero of the Jost function at lambda = 0 by small-circle
    winding of the scaled Jost function and, if present, extract the Laurent
    moments of R(l) f there.  Returns None when 0 is regular."""
    try:
        order = winding_multiplicity(0.0 + 0.0j, V, r_loc=r0)
    except Exception:
        order = 0
    if order <= 0:
        return None
    lams, wts = _circle(0.0 + 0.0j, r0)
    rf = apply_resolvent_batch(lams, f, V)
    moments = np.empty((order, f.grid.nodes().size), dtype=complex)
    for m in range(1, order + 1):
        moments[m - 1] = np.sum((lams ** (m - 1) * wts)[:, None] * rf, axis=0)
    return ZeroResonanceTerm(grid=f.grid, moments=moments)


# -- contour tail ----------------------------------------------------------

def field_to_state(values: np.ndarray, grid: UniformGrid, support_radius: float,
                   kinks=()) -> LocalizedState:
    """Wrap sampled values as a LocalizedState with a piecewise cubic-spline
    evaluator split at the kinks (linear interpolation at quadrature nodes
    would dominate downstream error budgets)."""
    from scipy.interpolate import CubicSpline
    xs = grid.nodes()
    vals = np.asarray(values, dtype=complex)
    cuts = [xs[0]] + sorted(k for k in kinks if xs[0] < k < xs[-1]) + [xs[-1]]
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        sel = (xs >= a - 1e-12) & (xs <= b + 1e-12)
        if np.count_nonzero(sel) >= 4:
            pieces.append((a, b, CubicSpline(xs[sel], vals[sel])))
        else:
            pieces.append((a, b, None))

    def eval_fn(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for a, b, sp in pieces:
            sel = (x >= a) & (x <= b)
            if np.any(sel):
                out[sel] = (np.interp(x[sel], xs, vals.real)
                            + 1j * np.interp(x[sel], xs, vals.imag)) \
                    if sp is None else sp(x[sel])
        return out

    return LocalizedState(grid=grid, values=vals, support_radius=support_radius,
                          kinks=tuple(kinks), eval_fn=eval_fn)


def _as_state(values: np.ndarray, f: LocalizedState, V: PotentialSpec) -> LocalizedState:
    kinks = tuple(sorted(set(list(f.kinks) + list(V.breakpoints)
                             + ([V.beta] if V.kind == DELTA else []))))
    return field_to_state(values, f.grid, f.support_radius, kinks=kinks)


def _support_in_one_region(f: LocalizedState, V: PotentialSpec) -> bool:
    """True when V is constant across supp f, so products like d^2(Vf) = V f''
    hold pointwise and A^n f can use the state's analytic derivatives."""
    if V.kind == FREE:
        return True
    xs = f.grid.nodes()
    nz = np.nonzero(np.abs(f.values) > 0)[0]
    if nz.size == 0:
        return True
    h = f.grid.spacing
    lo, hi = xs[nz[0]] - h, xs[nz[-1]] + h
    if V.kind == DELTA:
        return not (lo < V.beta < hi)
    return not any(lo < b < hi for b in V.breakpoints)


def operator_state(f: LocalizedState, V: PotentialSpec, n: int) -> LocalizedState:
    """A^n f as a LocalizedState with an exact off-grid evaluator when the
    shape's analytic derivatives are available; cubic-spline fallback
    otherwise.  Exactness matters: A^2 f of a bump has an 8th-derivative
    scale ~1e9, so spline interpolation at quadrature nodes costs ~1e-4."""
    vals = operator_apply(f, V, n)
    if n == 0:
        return f
    exact_ok = f.d2_eval is not None and (n == 1 or
                                          (n == 2 and f.d4_eval is not None))
    if exact_ok and _support_in_one_region(f, V):
        if n == 1:
            def eval_fn(xv):
                xv = np.asarray(xv, dtype=float)
                return f.d2_eval(xv) + V.value_at(xv) * f.evaluate(xv)
        else:
            def eval_fn(xv):
                xv = np.asarray(xv, dtype=float)
                vv = V.value_at(xv)
                return (f.d4_eval(xv) + 2.0 * vv * f.d2_eval(xv)
                        + vv * vv * f.evaluate(xv))
        kinks = tuple(sorted(set(list(f.kinks) + list(V.breakpoints)
                                 + ([V.beta] if V.kind == DELTA else []))))
        return LocalizedState(grid=f.grid, values=vals,
                              support_radius=f.support_radius,
                              eval_fn=eval_fn, kinks=kinks)
    return _as_state(vals, f, V)


def taylor_block(kind: str, t: float, f: LocalizedState, V: PotentialSpec,
                 n: int) -> np.ndarray:
    out = np.zeros_like(f.values, dtype=complex)
    for j in range(n):
        aj = f.values if j == 0 else operator_apply(f, V, j)
        if kind == "cosine":
            out += aj * t ** (2 * j) / math.factorial(2 * j)
        else:
            out += aj * t ** (2 * j + 1) / math.factorial(2 * j + 1)
    return out


def _panel_nodes(s0: float, s1: float, per_unit: int = 16):
    """Gauss-Legendre nodes/weights on [s0, s1], split into unit-width panels."""
    edges = np.linspace(s0, s1, max(1, int(np.ceil(s1 - s0))) + 1)
    xg, wg = np.polynomial.legendre.leggauss(per_unit)
    ss, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        ss.append(mid + half * xg)
        ws.append(half * wg)
    return np.concatenate(ss), np.concatenate(ws)


def tail_integral(t: float, f: LocalizedState, n: int, contour: ContourSpec,
                  kind: str, window: CutoffWindow | None, V: PotentialSpec,
                  s_max_limit: float = 4096.0) -> Field:
    """p.v. integral (1/2 pi i) int e^{lt} l^{power} R(l) A^n f dl along
    lambda(s) = g_*(s) + eps + i s, power = 1-2n (cosine) or -2n (sine).
    Symmetric truncation at |s| <= S, doubled until the windowed L2 increment
    drops below contour.quad_tol."""
    if kind not in ("cosine", "sine"):
        raise ValueError("kind must be 'cosine' or 'sine'")
    power = 1 - 2 * n if kind == "cosine" else -2 * n
    g = operator_state(f, V, n)
    h = f.grid.spacing

    # resolves e^{ist} on unit panels; the higher base rate also keeps panels
    # accurate when excluded resonances sit just left of the curve
    per_unit = int(np.ceil(16 + 2.0 * abs(t)))

    def segment(s0: float, s1: float) -> np.ndarray:
        # contribution of s in [s0, s1] plus its mirror [-s1, -s0]
        ss, ws = _panel_nodes(s0, s1, per_unit)
        ss = np.concatenate([ss, -ss])
        ws = np.concatenate([ws, ws])
        lams = np.asarray(contour.curve_points(ss))
        # dl/ds = g_*'(s) + i, g_*'(s) = -etatilde * sign(s)/(1+|s|)
        dl = -contour.gstar_etatilde * np.sign(ss) / (1.0 + np.abs(ss)) + 1j
        rf = apply_resolvent_batch(lams, g, V)
        fac = np.exp(lams * t) * lams ** power * dl * ws / (2j * np.pi)
        return np.sum(fac[:, None] * rf, axis=0)

    s_cur = max(8.0, contour.im_truncation / 4.0)
    total = segment(0.0, s_cur)
    prev_inc = None
    while True:
        if 2.0 * s_cur > s_max_limit:
            raise TruncationNotConverged(prev_inc or float("nan"), s_cur)
        inc = segment(s_cur, 2.0 * s_cur)
        total = total + inc
        s_cur *= 2.0
        inc_norm = windowed_l2(inc, window, h)
        if inc_norm < contour.quad_tol:
            break
        if prev_inc is not None and inc_norm > 0.6 * prev_inc:
            # rounding-noise floor of the oscillatory quadrature
            if inc_norm > 50.0 * contour.quad_tol:
                raise TruncationNotConverged(inc_norm, s_cur)
            break
        prev_inc = inc_norm
    return Field(grid=f.grid, values=total)


# -- full expansion --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExpansionReport:
    kind: str
    times: list
    terms: list
    zero_term: ZeroResonanceTerm | None
    tail_fields: list
    tail_norms: list
    reconstructions: list = field(repr=False)
    oracle_gap: list | None
    remainder_norms: list
    fitted_decay_rate: float
    window: CutoffWindow | None
    t_min: float

    def reconstruction(self, idx: int) -> np.ndarray:
        return self.reconstructions[idx]


def scan_bounds(V: PotentialSpec, contour: ContourSpec) -> ScanRegion:
    """Rectangle guaranteed to contain every Jost zero right of the shifted
    curve within the truncated strip."""
    if V.kind == DELTA:
        re_max = abs(V.alpha) / 2.0 + 0.5
    elif V.kind == PIECEWISE:
        vmax = max((abs(b) for b in np.atleast_1d(V.scalar_blocks())), default=0.0) \
            if V.is_scalar else float(max(np.linalg.norm(np.atleast_2d(b), 2)
                                          for b in V.blocks))
        re_max = np.sqrt(vmax) + 0.5
    else:
        re_max = 0.5
    s_edge = contour.im_truncation
    re_min = float(contour.g_star(s_edge)) + contour.eps - 0.5
    return ScanRegion(re_min, float(re_max), -s_edge, s_edge)


def expand(kind: str, t_list, f: LocalizedState, V: PotentialSpec,
           contour: ContourSpec, window: CutoffWindow | None = None,
           n: int = 1, with_oracle: bool = True) -> ExpansionReport:
    """Assemble the windowed expansion of C(t) f or S(t) f: located residue
    terms + zero-frequency term + contour tail, with an oracle gap per time
    from the vertical-line (Bromwich) reference."""
    if kind not in ("cosine", "sine"):
        raise ValueError("kind must be 'cosine' or 'sine'")
    kappa = 1 if kind == "cosine" else 0
    h = f.grid.spacing
    region = scan_bounds(V, contour)
    located = find_resonances(region, V, contour=contour)
    terms = [residue_term(r, kappa, f, V) for r in located]
    zterm = zero_resonance_term(f, V, contour)

    tails, tail_norms, recons, gaps, rems = [], [], [], [], []
    oracle_mod = None
    if with_oracle:
        from . import oracle as oracle_mod
    for t in t_list:
        tail = tail_integral(t, f, n, contour, kind, window, V)
        res_sum = np.zeros_like(f.values, dtype=complex)
        for term in terms:
            res_sum = res_sum + term.evaluate(t)
        if zterm is not None:
            res_sum = res_sum + zterm.evaluate(kappa, t)
        recon = res_sum + tail.values
        tails.append(tail)
        tail_norms.append(windowed_l2(tail.values, window, h))
        recons.append(recon)
        if oracle_mod is not None:
            ref = oracle_mod.bromwich_apply(kind, t, f, V, n=n, window=window)
            gaps.append(windowed_l2(recon - ref.values, window, h))
            rems.append(windowed_l2(ref.values - res_sum, window, h))
        else:
            rems.append(windowed_l2(tail.values, window, h))
    if oracle_mod is None:
        gaps = None

    rate = float("nan")
    usable = [(t, r) for t, r in zip(t_list, rems) if r > 0]
    if len(usable) >= 2:
        ts = np.array([u[0] for u in usable])
        lr = np.log([u[1] for u in usable])
        rate = float(np.polyfit(ts, lr, 1)[0])
    t_min = (window.index + 1 + f.support_radius) if window is not None \
        else f.support_radius
    return ExpansionReport(kind=kind, times=list(t_list), terms=terms,
                           zero_term=zterm, tail_fields=tails,
                           tail_norms=tail_norms, reconstructions=recons,
                           oracle_gap=gaps, remainder_norms=rems,
                           fitted_decay_rate=rate, window=window,
                           t_min=float(t_min))


# -- persistence -----------------------------------------------------------

def save_expansion_json(path, report: ExpansionReport) -> None:
    doc = {
        "kind": report.kind,
        "times": list(map(float, report.times)),
        "fitted_decay_rate": report.fitted_decay_rate,
        "t_min": report.t_min,
        "terms": [
            {"lambda0": [t.lambda0.real, t.lambda0.imag],
             "kappa": t.kappa, "multiplicity": t.multiplicity,
             "poly": [[c.real, c.imag] for c in t.poly],
             "spatial_norm": l2_norm(t.spatial, t.grid.spacing)}
            for t in report.terms
        ],
        "zero_term_order": report.zero_term.order if report.zero_term else 0,
        "tail_norms": list(map(float, report.tail_norms)),
        "oracle_gap": None if report.oracle_gap is None
        else list(map(float, report.oracle_gap)),
        "remainder_norms": list(map(float, report.remainder_norms)),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def save_series_csv(path, report: ExpansionReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "residual_norm", "tail_norm", "oracle_gap"])
        for i, t in enumerate(report.times):
            gap = report.oracle_gap[i] if report.oracle_gap is not None else float("nan")
            writer.writerow(["%.17g" % t, "%.17g" % report.remainder_norms[i],
                             "%.17g" % report.tail_norms[i], "%.17g" % gap])
