"""Independent reference computations of C(t) f and S(t) f.

Three unrelated routes are provided so they can cross-check each other and
the expansion machinery:
  - d'Alembert closed form (free model);
  - an exact propagator for the delta model obtained by term-by-term Laplace
    inversion of its resolvent kernel;
  - leapfrog time stepping (any scalar model);
  - vertical-line (Bromwich) inversion of the resolvent.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationNotConverged
from .model import DELTA, FREE, PIECEWISE, CutoffWindow, LocalizedState, \
    PotentialSpec, UniformGrid
from .resolvent import Field, apply_resolvent_batch
from .expansion import taylor_block, windowed_l2


@dataclass(frozen=True, eq=False)
class WaveState:
    u: Field
    u_t: Field
    time: float


# -- exact piecewise quadrature helpers ------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _segment_integral(g, a: float, b: float, kinks) -> complex:
    """int_a^b g with Gauss-Legendre panels split at interior kinks."""
    if b <= a:
        return 0.0
    edges = [a] + sorted(k for k in kinks if a < k < b) + [b]
    total = 0.0 + 0.0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * np.sum(_GL_W * g(mid + half * _GL_X))
    return total


class _Antiderivative:
    """F(x) = int_{lo}^{x} g, exact per smooth piece, vectorized in x."""

    def __init__(self, g, lo: float, hi: float, kinks=()):
        self.g, self.lo, self.hi = g, lo, hi
        inner = sorted(k for k in kinks if lo < k < hi)
        edges = [lo] + inner + [hi]
        # keep panels short so partial-panel quadrature stays well resolved
        fine = []
        for a, b in zip(edges[:-1], edges[1:]):
            n = max(1, int(np.ceil((b - a) / 0.25)))
            fine.extend(np.linspace(a, b, n + 1)[:-1])
        fine.append(hi)
        self.edges = np.array(fine)
        vals = [0.0]
        for a, b in zip(self.edges[:-1], self.edges[1:]):
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            vals.append(vals[-1] + half * np.sum(
                np.asarray(g(mid + half * _GL_X)) * _GL_W, axis=-1))
        self.cum = np.array(vals)

    def __call__(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.lo, self.hi)
        idx = np.clip(np.searchsorted(self.edges, x, side="right") - 1,
                      0, len(self.edges) - 2)
        a = self.edges[idx]
        half = 0.5 * (x - a)
        nodes = a[..., None] + half[..., None] * (_GL_X + 1.0)
        partial = half * np.sum(np.asarray(self.g(nodes)) * _GL_W, axis=-1)
        return self.cum[idx] + partial


# -- d'Alembert (free model) -----------------------------------------------

def dalembert_cosine(t: float, f: LocalizedState, eval_x=None) -> Field:
    xs = f.grid.nodes() if eval_x is None else np.asarray(eval_x, dtype=float)
    vals = 0.5 * (f.evaluate(xs + t) + f.evaluate(xs - t))
    return Field(grid=f.grid, values=vals)


def dalembert_sine(t: float, f: LocalizedState, eval_x=None) -> Field:
    xs = f.grid.nodes() if eval_x is None else np.asarray(eval_x, dtype=float)
    r = f.support_radius
    F = _Antiderivative(f.evaluate, -r, r, kinks=f.kinks)
    vals = 0.5 * (F(xs + t) - F(xs - t))
    return Field(grid=f.grid, values=vals)


# -- exact delta propagator ------------------------------------------------

def _delta_moments(f: LocalizedState, V: PotentialSpec):
    """Cumulative integrals around beta used by the exact delta propagator:
    M(tau)  = int_{|y-beta|<=tau} e^{(alpha/2)|y-beta|} f(y) dy,
    M0(tau) = int_{|y-beta|<=tau} f(y) dy."""
    alpha, beta = V.alpha, V.beta
    s_max = abs(beta) + f.support_radius + 1e-9
    kinks = sorted({abs(k - beta) for k in
                    list(f.kinks) + [-f.support_radius, f.support_radius]})
    both = lambda s: f.evaluate(beta + s) + f.evaluate(beta - s)
    Mw = _Antiderivative(lambda s: np.exp(alpha * s / 2.0) * both(s),
                         0.0, s_max, kinks=kinks)
    M0 = _Antiderivative(both, 0.0, s_max, kinks=kinks)
    return Mw, M0


def delta_cosine_exact(t: float, f: LocalizedState, V: PotentialSpec,
                       eval_x=None) -> Field:
    """C(t) f for the delta model via the inverse Laplace transform of the
    resolvent kernel: free d'Alembert part plus
    -(alpha/4) e^{-(alpha/2) tau} M(tau), tau = t - |x - beta|."""
    if V.kind != DELTA:
        raise ValueError("exact propagator is specific to the delta model")
    xs = f.grid.nodes() if eval_x is None else np.asarray(eval_x, dtype=float)
    alpha, beta = V.alpha, V.beta
    vals = 0.5 * (f.evaluate(xs + t) + f.evaluate(xs - t)).astype(complex)
    tau = t - np.abs(xs - beta)
    pos = tau > 0
    Mw, _ = _delta_moments(f, V)
    vals[pos] += -(alpha / 4.0) * np.exp(-(alpha / 2.0) * tau[pos]) * Mw(tau[pos])
    return Field(grid=f.grid, values=vals)


def delta_sine_exact(t: float, f: LocalizedState, V: PotentialSpec,
                     eval_x=None) -> Field:
    """S(t) f for the delta model: free part (1/2) int_{x-t}^{x+t} f plus
    -(1/2) [M0(tau) - e^{-(alpha/2) tau} M(tau)]."""
    if V.kind != DELTA:
        raise ValueError("exact propagator is specific to the delta model")
    xs = f.grid.nodes() if eval_x is None else np.asarray(eval_x, dtype=float)
    alpha, beta = V.alpha, V.beta
    r = f.support_radius
    F = _Antiderivative(f.evaluate, -r, r, kinks=f.kinks)
    vals = (0.5 * (F(xs + t) - F(xs - t))).astype(complex)
    tau = t - np.abs(xs - beta)
    pos = tau > 0
    Mw, M0 = _delta_moments(f, V)
    vals[pos] += -0.5 * (M0(tau[pos])
                         - np.exp(-(alpha / 2.0) * tau[pos]) * Mw(tau[pos]))
    return Field(grid=f.grid, values=vals)


# -- leapfrog time stepper -------------------------------------------------

def _discrete_apply(u: np.ndarray, grid: UniformGrid, V: PotentialSpec) -> np.ndarray:
    h = grid.spacing
    out = np.zeros_like(u, dtype=complex)
    out[1:-1] = (u[2:] + u[:-2] - 2.0 * u[1:-1]) / (h * h)
    xs = grid.nodes()
    if V.kind == PIECEWISE:
        out += V.value_at(xs) * u
    elif V.kind == DELTA:
        j = grid.nearest_index(V.beta)
        if abs(xs[j] - V.beta) > 1e-9 * max(1.0, h):
            raise ValueError("delta location beta must be a grid node")
        # ghost-value elimination of the derivative jump u'(b+)-u'(b-)=alpha u(b)
        out[j] = (u[j + 1] + u[j - 1] - 2.0 * u[j] - h * V.alpha * u[j]) / (h * h)
    return out


def timestep_wave(t: float, f: LocalizedState, g: LocalizedState | None,
                  V: PotentialSpec, dt: float) -> WaveState:
    """Leapfrog integration of u_tt = u_xx + V u, u(0) = f, u_t(0) = g.
    Returns u(t) ~ C(t) f + S(t) g."""
    grid = f.grid
    h = grid.spacing
    if dt > 0.5 * h + 1e-15:
        raise ValueError(f"CFL violation: dt = {dt} > h/2 = {0.5 * h}")
    cone = f.support_radius + (0.0 if g is None else g.support_radius) + t
    if grid.x_max < cone + 2 * h or grid.x_min > -(cone + 2 * h):
        raise ValueError("support cone leaves the grid before time t")
    steps = max(1, int(np.ceil(t / dt)))
    dt = t / steps
    u_prev = f.values.astype(complex).copy()
    gv = np.zeros_like(u_prev) if g is None else g.values.astype(complex)
    a0 = _discrete_apply(u_prev, grid, V)
    u = u_prev + dt * gv + 0.5 * dt * dt * a0
    guard = 1e8 * (np.max(np.abs(u_prev)) + np.max(np.abs(gv)) + 1.0)
    for _ in range(steps - 1):
        u_next = 2.0 * u - u_prev + dt * dt * _discrete_apply(u, grid, V)
        u_prev, u = u, u_next
        if np.max(np.abs(u)) > guard:
            raise RuntimeError("leapfrog norm growth guard tripped")
    u_t = (u - u_prev) / dt
    return WaveState(u=Field(grid=grid, values=u),
                     u_t=Field(grid=grid, values=u_t), time=t)


# -- Bromwich inversion ----------------------------------------------------

def default_gamma(V: PotentialSpec) -> float:
    """Abscissa strictly right of the growth bound of the model."""
    if V.kind == DELTA:
        return abs(V.alpha) / 2.0 + 0.5
    if V.kind == PIECEWISE:
        if V.is_scalar:
            vmax = max((max(b.real, 0.0) for b in np.atleast_1d(V.scalar_blocks())),
                       default=0.0)
        else:
            vmax = max(float(np.linalg.norm(np.atleast_2d(b), 2)) for b in V.blocks)
        return math.sqrt(vmax) + 0.5
    return 0.5


def bromwich_apply(kind: str, t: float, f: LocalizedState, V: PotentialSpec,
                   gamma: float | None = None, n: int = 1,
                   window: CutoffWindow | None = None,
                   quad_tol: float = 1e-6, s_limit: float = 8192.0) -> Field:
    """C(t) f or S(t) f from the vertical-line inversion

        sum_{j<n} t^{2j(+1)}/(2j(+1))! A^j f
        + (1/2 pi i) int_{Re l = gamma} e^{lt} l^{power} R(l) A^n f dl,

    power = 1-2n (cosine) or -2n (sine), with symmetric truncation doubled
    until the windowed L2 increment drops below quad_tol."""
    if kind not in ("cosine", "sine"):
        raise ValueError("kind must be 'cosine' or 'sine'")
    from .expansion import operator_state, _panel_nodes
    if gamma is None:
        gamma = default_gamma(V)
    power = 1 - 2 * n if kind == "cosine" else -2 * n
    g = operator_state(f, V, n)
    h = f.grid.spacing

    per_unit = int(np.ceil(8 + 2.0 * abs(t)))

    def segment(s0: float, s1: float) -> np.ndarray:
        ss, ws = _panel_nodes(s0, s1, per_unit)
        ss = np.concatenate([ss, -ss])
        ws = np.concatenate([ws, ws])
        lams = gamma + 1j * ss
        rf = apply_resolvent_batch(lams, g, V)
        fac = np.exp(lams * t) * lams ** power * (1j * ws) / (2j * np.pi)
        return np.sum(fac[:, None] * rf, axis=0)

    s_cur = 16.0
    total = segment(0.0, s_cur)
    prev_inc = None
    while True:
        if 2.0 * s_cur > s_limit:
            raise TruncationNotConverged(prev_inc or float("nan"), s_cur)
        inc = segment(s_cur, 2.0 * s_cur)
        total = total + inc
        s_cur *= 2.0
        inc_norm = windowed_l2(inc, window, h)
        if inc_norm < quad_tol:
            break
        if prev_inc is not None and inc_norm > 0.6 * prev_inc:
            # increments stopped decaying: rounding-noise floor of the
            # oscillatory quadrature, not a genuine truncation tail
            if inc_norm > 50.0 * quad_tol:
                raise TruncationNotConverged(inc_norm, s_cur)
            break
        prev_inc = inc_norm
    vals = taylor_block(kind, t, f, V, n) + total
    return Field(grid=f.grid, values=vals)


# -- persistence -----------------------------------------------------------

def save_snapshot_csv(path, grid: UniformGrid, u: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re_u", "im_u"])
        for x, v in zip(grid.nodes(), np.asarray(u, dtype=complex)):
            writer.writerow(["%.17g" % x, "%.17g" % v.real, "%.17g" % v.imag])
