"""Problem definitions: potentials, grids, cutoff windows, localized states, contours.

All objects are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError

FREE = "free"
DELTA = "delta"
PIECEWISE = "piecewise"


@dataclass(frozen=True)
class UniformGrid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 2:
            raise ConfigError("grid.n_points", "must be >= 2")
        if not (self.x_max > self.x_min):
            raise ConfigError("grid.x_max", "must exceed x_min")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def nearest_index(self, x: float) -> int:
        return int(round((x - self.x_min) / self.spacing))


@dataclass(frozen=True)
class PotentialSpec:
    """V(x): free, a delta interaction of strength alpha at beta, or a
    piecewise-constant (possibly matrix-valued) potential on a compact interval."""

    kind: str
    alpha: complex = 0.0
    beta: float = 0.0
    breakpoints: tuple = ()
    blocks: tuple = ()  # tuple of d x d complex ndarrays, one per interval
    dim: int = 1

    def __post_init__(self):
        if self.kind not in (FREE, DELTA, PIECEWISE):
            raise ConfigError("potential.kind", f"unknown kind {self.kind!r}")
        if self.kind == PIECEWISE:
            bp = np.asarray(self.breakpoints, dtype=float)
            if bp.size < 2:
                raise ConfigError("potential.breakpoints", "need at least two breakpoints")
            if not np.all(np.diff(bp) > 0):
                raise ConfigError("potential.breakpoints", "not increasing")
            if len(self.blocks) != bp.size - 1:
                raise ConfigError("potential.blocks", "need one block per interval")
            for j, b in enumerate(self.blocks):
                if np.asarray(b).shape != (self.dim, self.dim):
                    raise ConfigError(f"potential.blocks[{j}]", f"must be {self.dim}x{self.dim}")
        if self.dim < 1:
            raise ConfigError("potential.dim", "must be >= 1")

    # -- constructors -----------------------------------------------------
    @staticmethod
    def free() -> "PotentialSpec":
        return PotentialSpec(kind=FREE)

    @staticmethod
    def delta(alpha: complex, beta: float = 0.0) -> "PotentialSpec":
        return PotentialSpec(kind=DELTA, alpha=complex(alpha), beta=float(beta))

    @staticmethod
    def square_well(alpha, half_width: float = 1.0, dim: int = 1) -> "PotentialSpec":
        a = float(half_width)
        if a <= 0:
            raise ConfigError("potential.half_width", "must be positive")
        block = np.atleast_2d(np.asarray(alpha, dtype=complex))
        d = block.shape[0]
        if dim != 1 and d == 1:
            block = complex(alpha) * np.eye(dim)
            d = dim
        return PotentialSpec(kind=PIECEWISE, breakpoints=(-a, a), blocks=(block,), dim=d)

    @staticmethod
    def piecewise(breakpoints, blocks) -> "PotentialSpec":
        blocks = tuple(np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks)
        dim = blocks[0].shape[0] if blocks else 1
        return PotentialSpec(
            kind=PIECEWISE, breakpoints=tuple(float(b) for b in breakpoints),
            blocks=blocks, dim=dim,
        )

    # -- structure --------------------------------------------------------
    @property
    def support(self) -> tuple:
        """(x0, xm) with V = 0 outside; a degenerate pair for delta/free."""
        if self.kind == PIECEWISE:
            return (self.breakpoints[0], self.breakpoints[-1])
        if self.kind == DELTA:
            return (self.beta, self.beta)
        return (0.0, 0.0)

    @property
    def half_support(self) -> float:
        x0, xm = self.support
        return 0.5 * (xm - x0)

    @property
    def is_scalar(self) -> bool:
        return self.dim == 1

    @property
    def is_single_well(self) -> bool:
        return self.kind == PIECEWISE and len(self.blocks) == 1

    def scalar_blocks(self) -> np.ndarray:
        if not self.is_scalar:
            raise ValueError("scalar_blocks on a matrix potential")
        return np.array([b[0, 0] for b in self.blocks])

    def value_at(self, x: np.ndarray) -> np.ndarray:
        """Pointwise V(x) (delta contributes nothing pointwise)."""
        x = np.asarray(x, dtype=float)
        if self.kind == PIECEWISE and self.is_scalar:
            out = np.zeros(x.shape, dtype=complex)
            vals = self.scalar_blocks()
            bp = np.asarray(self.breakpoints)
            for j in range(len(vals)):
                out = np.where((x >= bp[j]) & (x < bp[j + 1]), vals[j], out)
            return out
        return np.zeros(x.shape, dtype=complex)


def _smooth_step_down(u: np.ndarray) -> np.ndarray:
    # C^1 taper 1 - 3u^2 + 2u^3 on [0, 1]
    return 1.0 - 3.0 * u * u + 2.0 * u ** 3


def cutoff_value(i: int, x) -> np.ndarray:
    """Window function: 1 on [-i, i], 0 outside [-i-1, i+1], cubic taper between."""
    x = np.abs(np.asarray(x, dtype=float))
    u = np.clip(x - i, 0.0, 1.0)
    return _smooth_step_down(u)


@dataclass(frozen=True)
class CutoffWindow:
    index: int
    grid: UniformGrid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))


def cutoff_window(i: int, grid: UniformGrid) -> CutoffWindow:
    if i < 1:
        raise ConfigError("window.i", "must be a positive integer")
    if grid.x_min > -(i + 1) or grid.x_max < i + 1:
        raise ConfigError("window.i", f"grid must cover [-{i + 1}, {i + 1}]")
    return CutoffWindow(index=i, grid=grid, samples=cutoff_value(i, grid.nodes()))


@dataclass(frozen=True, eq=False)
class LocalizedState:
    """Grid-sampled compactly supported function.

    Optional extras set by sample_state: exact second/fourth derivatives
    (d2_values, d4_values), an exact off-grid evaluator (eval_fn), and the
    locations where the function or its derivatives jump (kinks) so that
    quadratures can split panels there.
    """

    grid: UniformGrid
    values: np.ndarray = field(repr=False)
    support_radius: float = 0.0
    d2_values: np.ndarray | None = field(default=None, repr=False)
    d4_values: np.ndarray | None = field(default=None, repr=False)
    eval_fn: object = field(default=None, repr=False)
    d2_eval: object = field(default=None, repr=False)
    d4_eval: object = field(default=None, repr=False)
    kinks: tuple = ()

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Values at arbitrary points: exact when the shape formula is known,
        linear interpolation of the samples otherwise."""
        x = np.asarray(x, dtype=float)
        if self.eval_fn is not None:
            return np.asarray(self.eval_fn(x), dtype=complex)
        nodes = self.grid.nodes()
        return (np.interp(x, nodes, self.values.real)
                + 1j * np.interp(x, nodes, self.values.imag))

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        if v.shape[0] != self.grid.n_points:
            raise ConfigError("state.values", "length must match grid.n_points")
        if self.support_radius > min(-self.grid.x_min, self.grid.x_max) + 1e-12:
            raise ConfigError("state.support_radius", "support exceeds grid")
        if self.d2_values is not None:
            object.__setattr__(self, "d2_values", np.asarray(self.d2_values, dtype=complex))
        if self.d4_values is not None:
            object.__setattr__(self, "d4_values", np.asarray(self.d4_values, dtype=complex))

    def norm_l2(self) -> float:
        return l2_norm(self.values, self.grid.spacing)

    def norm_linf(self) -> float:
        return float(np.max(np.abs(self.values)))

    def norm_h1(self) -> float:
        dv = np.gradient(self.values, self.grid.spacing, axis=0)
        return self.norm_l2() + l2_norm(dv, self.grid.spacing)


def l2_norm(values: np.ndarray, h: float) -> float:
    """Trapezoid-rule L2 norm of grid samples."""
    w = np.abs(np.asarray(values)) ** 2
    if w.ndim > 1:
        w = w.sum(axis=tuple(range(1, w.ndim)))
    s = w.sum() - 0.5 * (w[0] + w[-1])
    return float(np.sqrt(max(s * h, 0.0)))


@dataclass(frozen=True)
class ContourSpec:
    """Vertical reference level g0 and the logarithmic curve
    g_*(s) = -eta - etatilde * ln(1 + |s|), shifted right by eps."""

    eps: float
    g0_level: float
    gstar_eta: float
    gstar_etatilde: float
    im_truncation: float
    quad_tol: float

    def __post_init__(self):
        if self.eps <= 0:
            raise ConfigError("contour.eps", "must be positive")
        if self.gstar_eta <= 0 or self.gstar_etatilde <= 0:
            raise ConfigError("contour.eta", "eta and etatilde must be positive")
        if self.im_truncation <= 0:
            raise ConfigError("contour.im_truncation", "must be positive")
        if self.quad_tol <= 0:
            raise ConfigError("contour.quad_tol", "must be positive")
        # sup g_* is attained at s = 0
        if not (self.g_star(0.0) + self.eps < self.g0_level):
            raise ConfigError("contour.eps", "contour ordering violated: sup g_* + eps >= g0")

    def g_star(self, s) -> np.ndarray:
        return -self.gstar_eta - self.gstar_etatilde * np.log1p(np.abs(s))

    def curve_points(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return self.g_star(s) + self.eps + 1j * s


@dataclass(frozen=True)
class ProblemSpec:
    potential: PotentialSpec
    grid: UniformGrid
    contour: ContourSpec
    state: LocalizedState
    window: CutoffWindow
    state_shape: str = "raw"
    state_params: dict = field(default_factory=dict)


# -- state sampling -------------------------------------------------------

def sample_state(shape: str, params: dict, grid: UniformGrid) -> LocalizedState:
    """Build a LocalizedState from a named shape.

    Shapes: indicator {a, b}; bump {center, radius, amplitude}; gaussian
    {center, width, radius}; exp-kink {rate, center, radius}; raw {values}.
    """
    x = grid.nodes()
    d2 = d4 = eval_fn = d2_eval = d4_eval = None
    kinks: tuple = ()
    if shape == "indicator":
        a, b = float(params["a"]), float(params["b"])
        if a >= b:
            raise ConfigError("state.params", "need a < b")
        values = ((x >= a) & (x <= b)).astype(complex)
        radius = max(abs(a), abs(b))
        eval_fn = lambda xv: ((np.asarray(xv) >= a) & (np.asarray(xv) <= b)).astype(complex)
        kinks = (a, b)
    elif shape == "bump":
        c = float(params.get("center", 0.0))
        r = float(params.get("radius", 1.0))
        amp = complex(params.get("amplitude", 1.0))

        def bump_derivs(xv):
            u = (np.asarray(xv, dtype=float) - c) / r
            inside = np.abs(u) < 1.0
            us = np.where(inside, u, 0.0)
            w = 1.0 / (1.0 - us ** 2)
            g = np.where(inside, np.exp(1.0 - w), 0.0)
            # derivatives of the exponent via w' = 2u w^2 etc.
            w1 = 2.0 * us * w ** 2
            w2 = 2.0 * w ** 2 + 8.0 * us ** 2 * w ** 3
            w3 = 24.0 * us * w ** 3 + 48.0 * us ** 3 * w ** 4
            w4 = 24.0 * w ** 3 + 288.0 * us ** 2 * w ** 4 + 384.0 * us ** 4 * w ** 5
            g1, g2, g3, g4 = -w1, -w2, -w3, -w4
            f0 = amp * g
            f2 = f0 * (g2 + g1 ** 2) / r ** 2
            f4 = f0 * (g4 + 4.0 * g1 * g3 + 3.0 * g2 ** 2
                       + 6.0 * g1 ** 2 * g2 + g1 ** 4) / r ** 4
            return f0, f2, f4

        values, d2, d4 = bump_derivs(x)
        eval_fn = lambda xv: bump_derivs(xv)[0]
        d2_eval = lambda xv: bump_derivs(xv)[1]
        d4_eval = lambda xv: bump_derivs(xv)[2]
        radius = abs(c) + r
    elif shape == "gaussian":
        c = float(params.get("center", 0.0))
        w = float(params.get("width", 0.5))
        r = float(params.get("radius", 6.0 * w))

        def gauss(xv):
            xv = np.asarray(xv, dtype=float)
            g = np.exp(-((xv - c) ** 2) / (2.0 * w * w))
            return np.where(np.abs(xv - c) <= r, g, 0.0).astype(complex)

        y = x - c
        g = np.exp(-(y ** 2) / (2.0 * w * w))
        mask = np.abs(y) <= r
        values = np.where(mask, g, 0.0).astype(complex)
        d2 = np.where(mask, g * ((y / w ** 2) ** 2 - 1.0 / w ** 2), 0.0).astype(complex)
        d4 = np.where(mask, g * (y ** 4 - 6.0 * y ** 2 * w ** 2 + 3.0 * w ** 4) / w ** 8,
                      0.0).astype(complex)
        def gauss_d2(xv):
            xv = np.asarray(xv, dtype=float)
            yv = xv - c
            gg = np.exp(-(yv ** 2) / (2.0 * w * w))
            return np.where(np.abs(yv) <= r,
                            gg * ((yv / w ** 2) ** 2 - 1.0 / w ** 2), 0.0).astype(complex)

        def gauss_d4(xv):
            xv = np.asarray(xv, dtype=float)
            yv = xv - c
            gg = np.exp(-(yv ** 2) / (2.0 * w * w))
            return np.where(np.abs(yv) <= r,
                            gg * (yv ** 4 - 6.0 * yv ** 2 * w * w + 3.0 * w ** 4) / w ** 8,
                            0.0).astype(complex)

        eval_fn = gauss
        d2_eval = gauss_d2
        d4_eval = gauss_d4
        radius = abs(c) + r
        kinks = (c - r, c + r)
    elif shape == "exp-kink":
        # e^{rate * |x - center|}, truncated at the given radius
        rate = complex(params["rate"])
        c = float(params.get("center", 0.0))
        r = float(params["radius"])
        mask = np.abs(x - c) <= r
        values = np.where(mask, np.exp(rate * np.abs(x - c)), 0.0)
        d2 = np.where(mask, rate * rate * values, 0.0)
        d4 = rate * rate * d2
        eval_fn = lambda xv: np.where(
            np.abs(np.asarray(xv) - c) <= r,
            np.exp(rate * np.abs(np.asarray(xv) - c)), 0.0)
        d2_eval = lambda xv: rate * rate * eval_fn(xv)
        d4_eval = lambda xv: rate ** 4 * eval_fn(xv)
        kinks = (c - r, c, c + r)
        radius = abs(c) + r
    elif shape == "raw":
        values = np.asarray(params["values"], dtype=complex)
        nz = np.nonzero(np.abs(values) > 0)[0]
        radius = float(np.max(np.abs(x[nz]))) if nz.size else 0.0
    else:
        raise ConfigError("state.shape", f"unknown shape {shape!r}")
    return LocalizedState(grid=grid, values=values, support_radius=radius,
                          d2_values=d2, d4_values=d4, eval_fn=eval_fn,
                          d2_eval=d2_eval, d4_eval=d4_eval, kinks=kinks)


# -- config ingestion -----------------------------------------------------

def _potential_from_doc(doc: dict) -> PotentialSpec:
    kind = doc.get("kind")
    if kind == "free":
        return PotentialSpec.free()
    if kind == "delta":
        try:
            alpha = complex(doc["alpha"])
        except KeyError:
            raise ConfigError("potential.alpha", "required for delta") from None
        return PotentialSpec.delta(alpha, float(doc.get("beta", 0.0)))
    if kind == "well":
        if "breakpoints" in doc:
            return PotentialSpec.piecewise(doc["breakpoints"], doc["blocks"])
        try:
            alpha = doc["alpha"]
        except KeyError:
            raise ConfigError("potential.alpha", "required for well") from None
        if isinstance(alpha, str):
            alpha = complex(alpha)
        return PotentialSpec.square_well(alpha, float(doc.get("half_width", 1.0)),
                                         dim=int(doc.get("dim", 1)))
    if kind == "piecewise":
        try:
            return PotentialSpec.piecewise(doc["breakpoints"], doc["blocks"])
        except KeyError as exc:
            raise ConfigError(f"potential.{exc.args[0]}", "required for piecewise") from None
    raise ConfigError("potential.kind", f"unknown kind {kind!r}")


def load_problem(doc) -> ProblemSpec:
    """Build a validated ProblemSpec from a dict, JSON string, or file path."""
    if isinstance(doc, (str, Path)):
        try:
            is_file = Path(str(doc)).exists()
        except OSError:
            is_file = False
        text = Path(doc).read_text() if is_file else str(doc)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"config does not parse as JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("$", "config must be a JSON object")

    for key in ("potential", "grid", "contour", "state", "window"):
        if key not in doc:
            raise ConfigError(key, "missing section")

    def num(section, name, default=None):
        raw = doc[section].get(name, default)
        if raw is None:
            raise ConfigError(f"{section}.{name}", "missing required number")
        val = float(raw)
        if not np.isfinite(val):
            raise ConfigError(f"{section}.{name}", "must be finite")
        return val

    potential = _potential_from_doc(doc["potential"])
    grid = UniformGrid(num("grid", "x_min"), num("grid", "x_max"),
                       int(num("grid", "n_points")))
    contour = ContourSpec(
        eps=num("contour", "eps"),
        g0_level=num("contour", "g0_level"),
        gstar_eta=num("contour", "eta"),
        gstar_etatilde=num("contour", "etatilde"),
        im_truncation=num("contour", "im_truncation"),
        quad_tol=num("contour", "quad_tol"),
    )
    shape = doc["state"].get("shape")
    params = doc["state"].get("params", {})
    state = sample_state(shape, params, grid)
    window = cutoff_window(int(num("window", "i")), grid)
    return ProblemSpec(potential=potential, grid=grid, contour=contour,
                       state=state, window=window,
                       state_shape=shape, state_params=dict(params))


def serialize(problem: ProblemSpec) -> dict:
    """Inverse of load_problem (round-trips through JSON)."""
    p = problem.potential
    if p.kind == FREE:
        pot = {"kind": "free"}
    elif p.kind == DELTA:
        pot = {"kind": "delta", "alpha": _num_or_str(p.alpha), "beta": p.beta}
    else:
        pot = {
            "kind": "piecewise",
            "breakpoints": list(p.breakpoints),
            "blocks": [[[_num_or_str(v) for v in row] for row in np.asarray(b)]
                       for b in p.blocks],
        }
    return {
        "potential": pot,
        "grid": {"x_min": problem.grid.x_min, "x_max": problem.grid.x_max,
                 "n_points": problem.grid.n_points},
        "contour": {"eps": problem.contour.eps, "g0_level": problem.contour.g0_level,
                    "eta": problem.contour.gstar_eta,
                    "etatilde": problem.contour.gstar_etatilde,
                    "im_truncation": problem.contour.im_truncation,
                    "quad_tol": problem.contour.quad_tol},
        "state": {"shape": problem.state_shape, "params": problem.state_params},
        "window": {"i": problem.window.index},
    }


def _num_or_str(z):
    z = complex(z)
    if z.imag == 0.0:
        return z.real
    return repr(z).strip("()")
