"""Jost solutions, Jost functions, and semi-separable kernels for 1-D
stationary problems u'' = (lambda^2 - V(x)) u with piecewise-constant V.

All branch-sensitive quantities are evaluated through the entire functions
c(z) = cosh(sqrt z) and s(z) = sinh(sqrt z)/sqrt z, so no square-root branch
of lambda^2 - alpha ever appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import PotentialSpec, FREE, DELTA, PIECEWISE

_SERIES_CUT = 1e-4


def cosh_sqrt(z):
    """Entire function c(z) = cosh(sqrt z)."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _SERIES_CUT
    w = np.sqrt(np.where(small, 1.0, z))
    series = 1.0 + z / 2.0 + z * z / 24.0 + z ** 3 / 720.0
    out = np.where(small, series, np.cosh(w))
    return out[()]


def sinhc_sqrt(z):
    """Entire function s(z) = sinh(sqrt z)/sqrt z."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _SERIES_CUT
    w = np.sqrt(np.where(small, 1.0, z))
    series = 1.0 + z / 6.0 + z * z / 120.0 + z ** 3 / 5040.0
    out = np.where(small, series, np.sinh(w) / w)
    return out[()]


def matrix_cs(Z: np.ndarray):
    """(c(Z), s(Z)) for a square matrix Z via diagonalization, falling back to
    the Schur-Parlett evaluator for defective matrices."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    d = Z.shape[0]
    if d == 1:
        return (np.array([[cosh_sqrt(Z[0, 0])]]),
                np.array([[sinhc_sqrt(Z[0, 0])]]))
    try:
        w, q = np.linalg.eig(Z)
        cond = np.linalg.cond(q)
        if cond < 1e8:
            qi = np.linalg.inv(q)
            return (q @ np.diag(cosh_sqrt(w)) @ qi,
                    q @ np.diag(sinhc_sqrt(w)) @ qi)
    except np.linalg.LinAlgError:
        pass
    return (scipy.linalg.funm(Z, cosh_sqrt), scipy.linalg.funm(Z, sinhc_sqrt))


def _propagate(u, du, dx, Z):
    """One step of the stationary equation U'' = Z U across a region where Z
    is constant: U(x+dx) = c(dx^2 Z) U + dx s(dx^2 Z) U'."""
    if np.ndim(Z) == 2:
        C, S = matrix_cs(dx * dx * Z)
        return C @ u + dx * (S @ du), dx * (Z @ (S @ u)) + C @ du
    arg = dx * dx * Z
    C, S = cosh_sqrt(arg), sinhc_sqrt(arg)
    return C * u + dx * S * du, dx * Z * S * u + C * du


def _regions(V: PotentialSpec):
    """(breakpoints, Z-values per region) with free regions appended on both
    sides; Z = lambda^2 - V is formed by the caller."""
    if V.kind != PIECEWISE:
        return np.array([]), []
    return np.asarray(V.breakpoints, dtype=float), list(V.blocks)


def jost_pair(x: float, lam: complex, V: PotentialSpec, side: int = +1,
              transposed: bool = False):
    """Jost solution (value, x-derivative) at x.

    side=+1: U_+ with U_+ = e^{-lambda x} (times I) for x beyond the right
    edge of the support; side=-1: U_- = e^{+lambda x} beyond the left edge.
    transposed=True solves with V(x)^T (used for matrix Green kernels).
    Returns scalars for scalar V, (d, d) matrices otherwise.
    """
    lam = complex(lam)
    matrix = not V.is_scalar
    eye = np.eye(V.dim, dtype=complex) if matrix else 1.0

    def free_values(xv):
        val = np.exp(-side * lam * xv)
        return val * eye, -side * lam * val * eye

    if V.kind != PIECEWISE:
        return free_values(x)
    bp, blocks = _regions(V)
    if (side == +1 and x >= bp[-1]) or (side == -1 and x <= bp[0]):
        return free_values(x)

    if side == +1:
        pos, order = bp[-1], range(len(blocks) - 1, -1, -1)
    else:
        pos, order = bp[0], range(len(blocks))
    u, du = free_values(pos)

    for j in order:
        block = blocks[j].T if transposed else blocks[j]
        if matrix:
            Z = lam * lam * np.eye(V.dim) - np.asarray(block, dtype=complex)
        else:
            Z = lam * lam - complex(np.asarray(block)[0, 0])
        # propagate to the far edge of this block, or stop at x inside it
        target = bp[j] if side == +1 else bp[j + 1]
        if bp[j] <= x <= bp[j + 1]:
            target = x
        u, du = _propagate(u, du, target - pos, Z)
        pos = target
        if pos == x:
            return u, du
    # x lies beyond the far edge of the support: continue through free space
    Zfree = lam * lam * eye if matrix else lam * lam
    return _propagate(u, du, x - pos, Zfree)


def jost_batch(xs: np.ndarray, lams: np.ndarray, V: PotentialSpec, side: int = +1):
    """Vectorized scalar Jost solutions.

    Returns (u, du) with shape (n_lambda, n_x). Scalar potentials only.
    """
    if not V.is_scalar:
        raise ValueError("jost_batch supports scalar potentials only")
    xs = np.asarray(xs, dtype=float)
    lams = np.asarray(lams, dtype=complex)
    lcol = lams[:, None]
    if V.kind != PIECEWISE:
        u = np.exp(-side * lcol * xs[None, :])
        return u, -side * lcol * u

    bp = np.asarray(V.breakpoints, dtype=float)
    vals = V.scalar_blocks()
    m = len(vals)
    # boundary data at every breakpoint, by propagation from the far edge
    n_bp = bp.size
    ub = np.empty((lams.size, n_bp), dtype=complex)
    dub = np.empty_like(ub)
    if side == +1:
        start_idx, step = n_bp - 1, -1
    else:
        start_idx, step = 0, +1
    ub[:, start_idx] = np.exp(-side * lams * bp[start_idx])
    dub[:, start_idx] = -side * lams * ub[:, start_idx]
    idx = start_idx
    while 0 <= idx + step < n_bp:
        j = idx + step
        block = vals[min(idx, j)]
        z = lams * lams - block
        dx = bp[j] - bp[idx]
        arg = dx * dx * z
        C, S = cosh_sqrt(arg), sinhc_sqrt(arg)
        u_new = C * ub[:, idx] + dx * S * dub[:, idx]
        du_new = dx * z * S * ub[:, idx] + C * dub[:, idx]
        ub[:, j], dub[:, j] = u_new, du_new
        idx = j

    u = np.empty((lams.size, xs.size), dtype=complex)
    du = np.empty_like(u)
    # exponential regions
    if side == +1:
        outer = xs >= bp[-1]
    else:
        outer = xs <= bp[0]
    if np.any(outer):
        e = np.exp(-side * lcol * xs[None, outer])
        u[:, outer] = e
        du[:, outer] = -side * lcol * e
    # far free region (beyond the opposite edge of the support)
    far = xs < bp[0] if side == +1 else xs > bp[-1]
    ref_idx = 0 if side == +1 else n_bp - 1
    if np.any(far):
        dx = (xs[far] - bp[ref_idx])[None, :]
        z = (lams * lams)[:, None]
        arg = dx * dx * z
        C, S = cosh_sqrt(arg), sinhc_sqrt(arg)
        u[:, far] = C * ub[:, ref_idx][:, None] + dx * S * dub[:, ref_idx][:, None]
        du[:, far] = dx * z * S * ub[:, ref_idx][:, None] + C * dub[:, ref_idx][:, None]
    # interior blocks
    for j in range(m):
        if side == +1:
            sel = (xs >= bp[j]) & (xs < bp[j + 1])
        else:
            sel = (xs > bp[j]) & (xs <= bp[j + 1])
        if not np.any(sel):
            continue
        anchor = j + 1 if side == +1 else j
        dx = (xs[sel] - bp[anchor])[None, :]
        z = (lams * lams - vals[j])[:, None]
        arg = dx * dx * z
        C, S = cosh_sqrt(arg), sinhc_sqrt(arg)
        u[:, sel] = C * ub[:, anchor][:, None] + dx * S * dub[:, anchor][:, None]
        du[:, sel] = dx * z * S * ub[:, anchor][:, None] + C * dub[:, anchor][:, None]
    return u, du


@dataclass(frozen=True)
class JostFunctionValue:
    w: complex
    w_scaled: complex
    provenance: str


def _well_jost_closed(lam, alpha: complex, a: float):
    """Scalar single-well Jost function, scaled form W(lambda) e^{2 lambda a}.

    W(lambda) = 2 e^{-2 lambda a} (lambda c + a z s)(c + lambda a s) with
    c = c(a^2 z), s = s(a^2 z), z = lambda^2 - alpha.
    """
    lam = np.asarray(lam, dtype=complex)
    z = lam * lam - alpha
    arg = a * a * z
    c, s = cosh_sqrt(arg), sinhc_sqrt(arg)
    return 2.0 * (lam * c + a * z * s) * (c + lam * a * s)


def matrix_well_jost_scaled(lam, V0: np.ndarray, a: float):
    """det of the matrix Jost function for a single matrix well, scaled by
    e^{2 lambda a d}. All factors are functions of Z = lambda^2 I - V0 and
    commute, so the scalar formula lifts verbatim."""
    lam = complex(lam)
    V0 = np.atleast_2d(np.asarray(V0, dtype=complex))
    d = V0.shape[0]
    Z = lam * lam * np.eye(d) - V0
    C, S = matrix_cs(a * a * Z)
    M = (lam * C + a * (Z @ S)) @ (C + lam * a * S)
    return complex(np.linalg.det(2.0 * M))


def _wronskian_matrix(lam: complex, V: PotentialSpec) -> np.ndarray:
    """x-independent matrix pairing hat-U_-'(x)^T U_+(x) - hat-U_-(x)^T U_+'(x)
    (reduces to the scalar Wronskian for d = 1); evaluated at the right edge."""
    x0, xm = V.support
    up, dup = jost_pair(xm, lam, V, side=+1)
    um, dum = jost_pair(xm, lam, V, side=-1, transposed=True)
    if V.is_scalar:
        return np.array([[dum * up - um * dup]])
    return dum.T @ up - um.T @ dup


def _wronskian_matrix_hat(lam: complex, V: PotentialSpec) -> np.ndarray:
    """Companion pairing hat-U_+^T U_-' - hat-U_+'^T U_- used for the x < y
    half of the matrix Green kernel."""
    x0, xm = V.support
    um, dum = jost_pair(x0, lam, V, side=-1)
    up, dup = jost_pair(x0, lam, V, side=+1, transposed=True)
    if V.is_scalar:
        return np.array([[up * dum - dup * um]])
    return up.T @ dum - dup.T @ um


def jost_function(lam: complex, V: PotentialSpec) -> JostFunctionValue:
    """W(lambda) (scalar) or det of the matrix Wronskian, with the
    overflow-safe scaled variant W e^{2 lambda a d}."""
    lam = complex(lam)
    if V.kind == FREE:
        return JostFunctionValue(2.0 * lam, 2.0 * lam, "closed-form")
    if V.kind == DELTA:
        d = 2.0 * lam + V.alpha
        return JostFunctionValue(d, d, "closed-form")
    a = V.half_support
    scale = np.exp(2.0 * lam * a * V.dim)
    if V.is_single_well and V.is_scalar:
        ws = complex(_well_jost_closed(lam, complex(V.blocks[0][0, 0]), a))
        return JostFunctionValue(ws / scale, ws, "closed-form")
    if V.is_single_well:
        ws = matrix_well_jost_scaled(lam, V.blocks[0], a)
        return JostFunctionValue(ws / scale, ws, "closed-form")
    w = complex(np.linalg.det(_wronskian_matrix(lam, V)))
    return JostFunctionValue(w, w * scale, "transfer-matrix")


def jost_function_scaled_batch(lams, V: PotentialSpec) -> np.ndarray:
    """Vectorized w_scaled over an array of lambda values."""
    lams = np.asarray(lams, dtype=complex)
    if V.kind == FREE:
        return 2.0 * lams
    if V.kind == DELTA:
        return 2.0 * lams + V.alpha
    if V.is_single_well and V.is_scalar:
        return _well_jost_closed(lams, complex(V.blocks[0][0, 0]), V.half_support)
    flat = lams.ravel()
    out = np.array([jost_function(l, V).w_scaled for l in flat])
    return out.reshape(lams.shape)


def wronskian_from_solutions(x: float, lam: complex, V: PotentialSpec) -> complex:
    """Scalar Wronskian U_+ U_-' - U_+' U_- evaluated at x (for testing its
    x-independence and agreement with the closed form)."""
    up, dup = jost_pair(x, lam, V, side=+1)
    um, dum = jost_pair(x, lam, V, side=-1)
    return up * dum - dup * um


def cauchy_derivative(func, lam0: complex, order: int,
                      radius: float | None = None, n_nodes: int = 64):
    """order-th derivative at lam0 of an entire function via trapezoid
    quadrature of the Cauchy integral on a circle; func must accept an ndarray."""
    lam0 = complex(lam0)
    if radius is None:
        radius = 1e-2 * max(1.0, abs(lam0))
    theta = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    ring = np.exp(1j * theta)
    vals = np.asarray(func(lam0 + radius * ring))
    moment = np.mean(vals * np.exp(-1j * order * theta))
    return complex(math.factorial(order) * moment / radius ** order)


def jost_function_derivative(lam: complex, V: PotentialSpec, order: int) -> complex:
    """d^order/d lambda^order of W at lambda (order 1..3)."""
    if order < 1 or order > 3:
        raise ValueError("order must be 1, 2 or 3")
    if V.kind == FREE:
        return 2.0 if order == 1 else 0.0
    if V.kind == DELTA:
        return 2.0 if order == 1 else 0.0
    return cauchy_derivative(lambda ls: np.array([jost_function(l, V).w for l in ls]),
                             lam, order)


def well_wprime_at_zero(lam0: complex, alpha: complex) -> complex:
    """Closed form for W'(lambda0) at a simple zero of the unit-half-width
    scalar well; branch-free via z^{3/2}/sinh(2 sqrt z) = z / (2 s(4z))."""
    lam0 = complex(lam0)
    z = lam0 * lam0 - alpha
    s4 = sinhc_sqrt(4.0 * z)
    return -alpha ** 2 * (1.0 + lam0) * 2.0 * s4 / (lam0 * z * np.exp(2.0 * lam0))


def well_wpp_at_minus1(alpha: complex) -> complex:
    """W''(-1) for the unit well when -1 is a double zero."""
    return 2.0 * np.exp(2.0) * alpha / (1.0 - alpha)


def well_wppp_at_minus1(alpha: complex) -> complex:
    """W'''(-1) for the unit well when -1 is a double zero."""
    return 2.0 * np.exp(2.0) * alpha * (6.0 * alpha - 1.0) / (1.0 - alpha) ** 2


def double_zero_coupling() -> complex:
    """The well coupling for which W has a double zero at lambda = -1.

    The two defining conditions sqrt(a) sinh(sqrt(1-a)) + sqrt(1-a) = 0 and
    sqrt(a) cosh(sqrt(1-a)) + 1 = 0 reduce to tanh(mu) = mu with
    mu = sqrt(1-a); the nontrivial roots are mu = i xi with tan(xi) = xi,
    giving a = 1 + xi^2. The branch in (pi, 3 pi/2) satisfies both sign
    conditions under principal square roots.
    """
    from scipy.optimize import brentq
    xi = brentq(lambda x: np.tan(x) - x, np.pi + 1e-6, 1.5 * np.pi - 1e-6,
                xtol=1e-15, rtol=8.9e-16)
    return complex(1.0 + xi * xi)


def semi_separable_kernel(x: float, y: float, lam: complex, V: PotentialSpec):
    """Numerator kernel of the Green function: U_+(max) U_-(min) for scalar V;
    for matrix V, det(W) times the Green kernel."""
    lam = complex(lam)
    if V.is_scalar:
        hi, lo = (x, y) if x >= y else (y, x)
        up, _ = jost_pair(hi, lam, V, side=+1)
        um, _ = jost_pair(lo, lam, V, side=-1)
        return up * um
    wdet = complex(np.linalg.det(_wronskian_matrix(lam, V)))
    return wdet * matrix_green_kernel(x, y, lam, V)


def matrix_green_kernel(x: float, y: float, lam: complex, V: PotentialSpec) -> np.ndarray:
    """Matrix Green kernel via transposed-problem Jost solutions:
    G(x,y) = U_+(x) Wm^{-1} hat-U_-(y)^T for x >= y, and the companion
    pairing for x < y."""
    lam = complex(lam)
    if x >= y:
        up, _ = jost_pair(x, lam, V, side=+1)
        um, _ = jost_pair(y, lam, V, side=-1, transposed=True)
        Wm = _wronskian_matrix(lam, V)
        return up @ np.linalg.inv(Wm) @ um.T
    um, _ = jost_pair(x, lam, V, side=-1)
    up, _ = jost_pair(y, lam, V, side=+1, transposed=True)
    Wh = _wronskian_matrix_hat(lam, V)
    return um @ np.linalg.inv(Wh) @ up.T
