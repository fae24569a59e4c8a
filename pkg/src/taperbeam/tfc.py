"""Constrained-expression collocation with a Chebyshev free function.

The trial deflection is the constrained expression of a Chebyshev series on
the mapped variable 2X - 1.  Both the expression and the beam operator are
linear in the series weights, so the collocation residual is exactly
``A @ w - b``.  The weights can be found in one least-squares solve or by
L-BFGS on the mean squared residual.
"""

from __future__ import annotations

import time

import numpy as np

from .ce import ConstrainedExpression, build_ce, ce_eval
from .chebyshev import BasisSet
from .model import BeamConfig, load, operator_coefficients
from .optim import LbfgsSettings, lbfgs_minimize, solve_least_squares
from .solution import DEFLECTION_SCALE, CollocationGrid, Method, SolveResult

LBFGS_DEFAULT = LbfgsSettings(outer_steps=10, max_inner_iterations=50, gradient_tolerance=1e-14)


class TfcModel:
    """Linear map from Chebyshev weights to the constrained deflection."""

    def __init__(self, bc, order: int = 15):
        self.ce: ConstrainedExpression = build_ce(bc)
        self.basis = BasisSet(order)
        ends = self.basis.evaluate([0.0, 1.0])
        self._functionals = np.array(
            [ends[int(f.location), :, f.derivative_order] for f in self.ce.functionals]
        )

    def design(self, X) -> np.ndarray:
        """Derivatives 0..4 of the constrained expression of each T_k; shape (5, n, order+1)."""
        X = np.atleast_1d(np.asarray(X, dtype=float))
        h = self.basis.evaluate(X).transpose(2, 0, 1)
        return ce_eval(self.ce, X, h, self._functionals)

    def derivatives(self, weights, X) -> np.ndarray:
        """Derivatives 0..4 of the trial deflection at X; shape (5, n)."""
        return self.design(X) @ np.asarray(weights, dtype=float)


def assemble_system(cfg: BeamConfig, grid: CollocationGrid, order: int = 15, model=None):
    """Collocation matrix ``A`` and right-hand side ``b`` with residual = A w - b."""
    model = model or TfcModel(cfg.bc, order)
    X = grid.points
    D = model.design(X)
    c2, c3, c4 = operator_coefficients(X, cfg)
    A = c2[:, None] * D[2] + c3[:, None] * D[3] + c4[:, None] * D[4]
    b = load(X, cfg.q0, cfg.gamma)
    return A, b


def _evaluator(model: TfcModel, weights):
    def evaluate(X):
        vals = DEFLECTION_SCALE * model.derivatives(weights, X)[0]
        return vals[0] if np.ndim(X) == 0 else vals

    return evaluate


def solve(
    cfg: BeamConfig,
    order: int = 15,
    grid: CollocationGrid | None = None,
    mode: str = "least-squares",
    settings: LbfgsSettings = LBFGS_DEFAULT,
) -> SolveResult:
    grid = grid or CollocationGrid.uniform(100)
    start = time.perf_counter()
    model = TfcModel(cfg.bc, order)
    A, b = assemble_system(cfg, grid, order, model)
    n = b.shape[0]
    if mode == "least-squares":
        ls = solve_least_squares(A, b)
        w = ls.x
        loss = float(np.mean(ls.residual**2))
        elapsed = time.perf_counter() - start
        return SolveResult(Method.TFC_LS, cfg, w, loss, elapsed, _evaluator(model, w), rank=ls.rank,
                           info={"order": order, "grid": len(grid)})
    if mode != "lbfgs":
        raise ValueError(f"unknown mode {mode!r}; expected 'least-squares' or 'lbfgs'")

    # Optimize over w = scale * v.  Column norms of A span ~6 decades, which
    # stalls L-BFGS on the raw weights; directions the constrained expression
    # annihilates (polynomials of degree <= 3) stay frozen at zero.
    norms = np.linalg.norm(A, axis=0)
    scale = np.where(norms > 1e-10 * norms.max(), 1.0 / np.where(norms > 0.0, norms, 1.0), 0.0)
    As = A * scale

    def f_and_grad(v):
        r = As @ v - b
        return float(r @ r) / n, (2.0 / n) * (As.T @ r)

    opt = lbfgs_minimize(f_and_grad, np.zeros(A.shape[1]), settings)
    w = scale * opt.x
    elapsed = time.perf_counter() - start
    return SolveResult(
        Method.TFC_LBFGS, cfg, w, opt.loss, elapsed, _evaluator(model, w),
        trace=opt.trace, converged=opt.converged, line_search_failed=opt.line_search_failed,
        info={"order": order, "grid": len(grid), "iterations": opt.iterations},
    )


def deflection(result: SolveResult, ce: ConstrainedExpression, X, order: int | None = None):
    """100 * the constrained expression with the solved weights, evaluated at X."""
    order = order if order is not None else result.weights.shape[0] - 1
    basis = BasisSet(order)
    X1 = np.atleast_1d(np.asarray(X, dtype=float))
    h = basis.evaluate(X1).transpose(2, 0, 1)
    ends = basis.evaluate([0.0, 1.0])
    c = np.array([ends[int(f.location), :, f.derivative_order] for f in ce.functionals])
    vals = DEFLECTION_SCALE * (ce_eval(ce, X1, h, c)[0] @ result.weights)
    return vals[0] if np.ndim(X) == 0 else vals
