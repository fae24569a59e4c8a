"""Reference solutions that share no code path with the main solvers.

``analytic_solid_ss`` is the closed form for a solid, untapered, simply
supported beam under uniform load.  ``fd_solve`` is a second-order finite
difference discretisation of the expanded equation, solved as a banded
system and Richardson-extrapolated over two nested grids.
"""

from __future__ import annotations

import mpmath
import numpy as np
import scipy.linalg
from scipy.interpolate import CubicSpline

from .model import BeamConfig, BoundaryKind, load, operator_coefficients
from .solution import DEFLECTION_SCALE

_DPS = 50


def analytic_solid_ss(X, q0: float, kp: float):
    """Reported deflection 100*W(X) of the solid uniform S-S beam.

    With V = W'' the equation W'''' - kp W'' = q0 becomes V'' - kp V = q0,
    V(0) = V(1) = 0, which integrates in closed form.  Evaluated in 50-digit
    arithmetic so that the kp -> 0 limit does not cancel catastrophically.
    """
    if kp < 0.0:
        raise ValueError("kp must be non-negative")
    scalar = np.ndim(X) == 0
    xs = np.atleast_1d(np.asarray(X, dtype=float))
    out = np.empty_like(xs)
    with mpmath.workdps(_DPS):
        q = mpmath.mpf(q0)
        if kp == 0.0:
            for i, x in enumerate(xs):
                x = mpmath.mpf(x)
                out[i] = float(q * (x**4 - 2 * x**3 + x) / 24)
        else:
            k = mpmath.mpf(kp)
            a = mpmath.sqrt(k)
            B = (1 - mpmath.cosh(a)) / mpmath.sinh(a)
            for i, x in enumerate(xs):
                x = mpmath.mpf(x)
                v = (mpmath.cosh(a * x) + B * mpmath.sinh(a * x) - 1) / k + (x - x * x) / 2
                out[i] = float(q / k * v)
    out *= DEFLECTION_SCALE
    return float(out[0]) if scalar else out


def _banded_system(cfg: BeamConfig, m: int):
    h = 1.0 / (m - 1)
    X = np.linspace(0.0, 1.0, m)
    c2, c3, c4 = operator_coefficients(X, cfg)
    rhs = load(X, cfg.q0, cfg.gamma) * h**4
    ab = np.zeros((5, m))  # scipy banded layout, l = u = 2

    def put(row, col, val):
        ab[2 + row - col, col] = val

    interior = np.arange(2, m - 2)
    stencil4 = (1.0, -4.0, 6.0, -4.0, 1.0)
    stencil3 = (-1.0, 2.0, 0.0, -2.0, 1.0)
    stencil2 = (0.0, 1.0, -2.0, 1.0, 0.0)
    for i in interior:
        for off in range(5):
            put(i, i + off - 2, c4[i] * stencil4[off] + 0.5 * h * c3[i] * stencil3[off]
                + h * h * c2[i] * stencil2[off])
    rhs[[0, 1, m - 2, m - 1]] = 0.0

    put(0, 0, 1.0)
    put(m - 1, m - 1, 1.0)
    if cfg.bc is BoundaryKind.SS:
        for off, v in enumerate((2.0, -5.0, 4.0, -1.0)):  # W''(0) = 0
            put(1, off, v)
    else:
        for off, v in enumerate((-3.0, 4.0, -1.0)):       # W'(0) = 0
            put(1, off, v)
    for off, v in enumerate((2.0, -5.0, 4.0, -1.0)):      # W''(1) = 0
        put(m - 2, m - 1 - off, v)
    return X, ab, rhs


def fd_solve_raw(cfg: BeamConfig, grid_size: int):
    """Nodes and non-dimensional deflection on a uniform grid of ``grid_size`` nodes."""
    if grid_size < 7:
        raise ValueError("grid_size too small for the 5-point stencils")
    X, ab, rhs = _banded_system(cfg, grid_size)
    try:
        W = scipy.linalg.solve_banded((2, 2), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"finite-difference system is singular for {cfg}") from exc
    return X, W


def fd_solve(cfg: BeamConfig, grid_size: int = 401):
    """Evaluator X -> 100*W(X) from Richardson-extrapolated finite differences.

    Solves on ``grid_size`` nodes and on the grid with every interval halved
    (``2*grid_size - 1`` nodes), combines them at the shared nodes and
    interpolates with a cubic spline.
    """
    if grid_size < 201:
        raise ValueError(f"grid_size must be at least 201, got {grid_size}")
    X, coarse = fd_solve_raw(cfg, grid_size)
    _, fine = fd_solve_raw(cfg, 2 * grid_size - 1)
    W = (4.0 * fine[::2] - coarse) / 3.0
    spline = CubicSpline(X, DEFLECTION_SCALE * W)

    def evaluate(x):
        v = spline(np.asarray(x, dtype=float))
        return float(v) if np.ndim(x) == 0 else v

    return evaluate
