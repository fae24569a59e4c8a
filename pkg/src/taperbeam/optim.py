"""Dense least squares and L-BFGS with a strong-Wolfe line search."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


@dataclass
class LstsqResult:
    x: np.ndarray
    residual: np.ndarray
    rank: int


def solve_least_squares(A, b, rcond: float = 1e-13) -> LstsqResult:
    """Minimum-norm minimizer of ||A x - b|| by column-pivoted QR.

    Columns whose pivot falls below ``rcond`` times the largest are treated
    as rank deficient; the returned solution is then the minimum-norm one.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] < A.shape[1]:
        raise ValueError(f"need an overdetermined or square system, got shape {A.shape}")
    x, _, rank, _ = scipy.linalg.lstsq(A, b, cond=rcond, lapack_driver="gelsy")
    return LstsqResult(x, A @ x - b, int(rank))


@dataclass(frozen=True)
class LbfgsSettings:
    outer_steps: int = 50
    max_inner_iterations: int = 50
    history_size: int = 10
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    gradient_tolerance: float = 1e-12
    max_line_search_evals: int = 25

    def __post_init__(self):
        if not 0.0 < self.wolfe_c1 < self.wolfe_c2 < 1.0:
            raise ValueError("need 0 < wolfe_c1 < wolfe_c2 < 1")
        if self.history_size < 1:
            raise ValueError("history_size must be at least 1")
        if self.outer_steps < 1 or self.max_inner_iterations < 1:
            raise ValueError("outer_steps and max_inner_iterations must be positive")


@dataclass
class LbfgsResult:
    x: np.ndarray
    loss: float
    trace: list = field(default_factory=list)
    converged: bool = False
    line_search_failed: bool = False
    iterations: int = 0
    evaluations: int = 0


def two_loop_direction(g, s_hist, y_hist) -> np.ndarray:
    """Search direction -H g from the stored curvature pairs (oldest first)."""
    q = -np.asarray(g, dtype=float).copy()
    if not s_hist:
        return q
    rhos = [1.0 / float(y @ s) for s, y in zip(s_hist, y_hist)]
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rhos)):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    s, y = s_hist[-1], y_hist[-1]
    q *= float(s @ y) / float(y @ y)
    for s, y, rho, a in zip(s_hist, y_hist, rhos, reversed(alphas)):
        beta = rho * float(y @ q)
        q += (a - beta) * s
    return q


def _cubic_min(x1, f1, g1, x2, f2, g2, lo, hi):
    # minimizer of the cubic through two points with slopes, clipped to [lo, hi]
    if x1 == x2:
        return 0.5 * (lo + hi)
    d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2)
    d2sq = d1 * d1 - g1 * g2
    if d2sq >= 0.0:
        d2 = math.sqrt(d2sq)
        if x1 <= x2:
            denom = g2 - g1 + 2.0 * d2
            t = x2 - (x2 - x1) * ((g2 + d2 - d1) / denom) if denom != 0.0 else 0.5 * (x1 + x2)
        else:
            denom = g1 - g2 + 2.0 * d2
            t = x1 - (x1 - x2) * ((g1 + d2 - d1) / denom) if denom != 0.0 else 0.5 * (x1 + x2)
        if math.isfinite(t):
            return min(max(t, lo), hi)
    return 0.5 * (lo + hi)


@dataclass
class _Trial:
    t: float
    f: float
    g: np.ndarray
    gtd: float


def strong_wolfe(f_and_grad, x, f0, g0, d, t, c1=1e-4, c2=0.9, max_evals=25):
    """Strong-Wolfe line search along ``d`` starting at step ``t``.

    Returns ``(trial, evals, ok)``.  ``trial`` is the accepted point, or the
    lowest point seen when the conditions could not be met; ``ok`` reports
    whether the strong-Wolfe conditions hold there.  ``trial`` is None if
    no point below ``f0`` was found.
    """
    gtd0 = float(g0 @ d)
    evals = 0
    best = None

    def probe(step):
        nonlocal evals, best
        f, g = f_and_grad(x + step * d)
        evals += 1
        trial = _Trial(step, float(f), g, float(g @ d))
        if math.isfinite(trial.f) and trial.f < f0 and (best is None or trial.f < best.f):
            best = trial
        return trial

    def armijo(trial):
        return math.isfinite(trial.f) and trial.f <= f0 + c1 * trial.t * gtd0

    def curvature(trial):
        return abs(trial.gtd) <= -c2 * gtd0

    prev = _Trial(0.0, f0, g0, gtd0)
    lo = hi = None
    while evals < max_evals:
        cur = probe(t)
        if not armijo(cur) or (prev.t > 0.0 and cur.f >= prev.f):
            lo, hi = prev, cur
            break
        if curvature(cur):
            return cur, evals, True
        if cur.gtd >= 0.0:
            lo, hi = cur, prev
            break
        t_next = _cubic_min(prev.t, prev.f, prev.gtd, cur.t, cur.f, cur.gtd, cur.t * 1.01, cur.t * 10.0)
        prev, t = cur, t_next
    else:
        return best, evals, False

    # zoom: lo satisfies Armijo and has the lowest value seen in the bracket
    while evals < max_evals:
        width = abs(hi.t - lo.t)
        if width <= 1e-12 * max(abs(lo.t), abs(hi.t)):
            break
        a, b = sorted((lo.t, hi.t))
        margin = 0.1 * (b - a)
        t = _cubic_min(lo.t, lo.f, lo.gtd, hi.t, hi.f, hi.gtd, a + margin, b - margin)
        cur = probe(t)
        if not armijo(cur) or cur.f >= lo.f:
            hi = cur
        else:
            if curvature(cur):
                return cur, evals, True
            if cur.gtd * (hi.t - lo.t) >= 0.0:
                hi = lo
            lo = cur
    return best, evals, False


def lbfgs_minimize(f_and_grad, x0, settings: LbfgsSettings = LbfgsSettings(), callback=None) -> LbfgsResult:
    """Minimize with L-BFGS in ``outer_steps`` rounds of up to ``max_inner_iterations``.

    Curvature history carries over between rounds.  ``trace`` records the
    best loss after every round.  The returned point is the best iterate;
    ``line_search_failed`` is set when no decrease could be found from it.
    """
    x = np.array(x0, dtype=float)
    f, g = f_and_grad(x)
    f = float(f)
    res = LbfgsResult(x.copy(), f, evaluations=1)
    if not math.isfinite(f):
        raise ValueError("objective is not finite at the starting point")
    s_hist: deque = deque(maxlen=settings.history_size)
    y_hist: deque = deque(maxlen=settings.history_size)

    def stationary(grad):
        return float(np.max(np.abs(grad))) <= settings.gradient_tolerance

    if stationary(g):
        res.converged = True
        res.trace.append(f)
        return res

    stop = False
    for _ in range(settings.outer_steps):
        for _ in range(settings.max_inner_iterations):
            d = two_loop_direction(g, s_hist, y_hist)
            gtd = float(g @ d)
            if not (gtd < 0.0 and math.isfinite(gtd)):
                s_hist.clear()
                y_hist.clear()
                d = -g
            t = 1.0 if s_hist else min(1.0, 1.0 / max(float(np.sum(np.abs(g))), 1e-300))
            trial, evals, _ = strong_wolfe(
                f_and_grad, x, f, g, d, t,
                settings.wolfe_c1, settings.wolfe_c2, settings.max_line_search_evals,
            )
            res.evaluations += evals
            if trial is None:
                if s_hist:
                    s_hist.clear()
                    y_hist.clear()
                    continue
                res.line_search_failed = True
                stop = True
                break
            step = trial.t * d
            y = trial.g - g
            ys = float(y @ step)
            if ys > 1e-10 * float(y @ y) and ys > 0.0:
                s_hist.append(step)
                y_hist.append(y)
            x = x + step
            f, g = trial.f, trial.g
            res.iterations += 1
            if f < res.loss:
                res.x, res.loss = x.copy(), f
            if callback is not None:
                callback(x, f)
            if stationary(g):
                res.converged = True
                stop = True
                break
            if float(np.max(np.abs(step))) <= 1e-15 * (1.0 + float(np.max(np.abs(x)))):
                stop = True
                break
        res.trace.append(res.loss)
        if stop:
            break
    return res
