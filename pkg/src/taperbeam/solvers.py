"""One entry point for every solution method, plus picklable sampling for worker pools."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import galerkin, oracles, pinn, tfc
from .model import BeamConfig, BoundaryKind
from .optim import LbfgsSettings
from .solution import CollocationGrid, Method, SolveResult

# names accepted on the command line; "dfl-tfc" is the least-squares route
METHOD_ALIASES = {
    "dfl-tfc": Method.TFC_LS,
    "dfl-tfc-ls": Method.TFC_LS,
    "dfl-tfc-lbfgs": Method.TFC_LBFGS,
    "galerkin": Method.GALERKIN,
    "pinn": Method.PINN,
    "fd": Method.FD,
    "analytic": Method.ANALYTIC,
}


def parse_method(name) -> Method:
    if isinstance(name, Method):
        return name
    try:
        return METHOD_ALIASES[str(name).lower()]
    except KeyError:
        raise ValueError(
            f"unknown method {name!r}; choose from {', '.join(sorted(METHOD_ALIASES))}"
        ) from None


@dataclass(frozen=True)
class SolverOptions:
    order: int = 15
    galerkin_n: int = 15
    grid_points: int = 100
    grid_kind: str = "uniform"
    fd_grid: int = 401
    seed: int | None = None
    hidden_layers: int = 3
    width: int = 5
    outer_steps: int | None = None
    inner_iterations: int | None = None

    def as_dict(self) -> dict:
        return asdict(self)

    def lbfgs(self, default: LbfgsSettings) -> LbfgsSettings:
        changes = {}
        if self.outer_steps is not None:
            changes["outer_steps"] = self.outer_steps
        if self.inner_iterations is not None:
            changes["max_inner_iterations"] = self.inner_iterations
        if not changes:
            return default
        return LbfgsSettings(**{**asdict(default), **changes})


def analytic_applicable(cfg: BeamConfig) -> bool:
    """Closed form exists only for a solid, untapered S-S beam under uniform load."""
    return (
        cfg.bc is BoundaryKind.SS
        and math.isclose(cfg.profile.s_factor, 1.0, rel_tol=1e-12)
        and cfg.phi == 0.0
        and cfg.psi == 0.0
        and cfg.gamma == 0.0
    )


def run(cfg: BeamConfig, method, options: SolverOptions = SolverOptions()) -> SolveResult:
    method = parse_method(method)
    grid = CollocationGrid.make(options.grid_points, options.grid_kind)
    if method is Method.TFC_LS:
        return tfc.solve(cfg, options.order, grid)
    if method is Method.TFC_LBFGS:
        return tfc.solve(cfg, options.order, grid, mode="lbfgs", settings=options.lbfgs(tfc.LBFGS_DEFAULT))
    if method is Method.GALERKIN:
        return galerkin.galerkin_solve(cfg, options.galerkin_n)
    if method is Method.PINN:
        return pinn.train_pinn(cfg, options.lbfgs(pinn.PINN_SETTINGS), options.seed,
                               options.hidden_layers, options.width, grid)
    if method is Method.FD:
        start = time.perf_counter()
        evaluate = oracles.fd_solve(cfg, options.fd_grid)
        return SolveResult(Method.FD, cfg, np.empty(0), math.nan, time.perf_counter() - start,
                           evaluate, info={"grid_size": options.fd_grid})
    if not analytic_applicable(cfg):
        raise ValueError("the analytic solution needs alpha=1 (or S=1), phi=psi=gamma=0 and S-S supports")
    start = time.perf_counter()
    oracles.analytic_solid_ss(0.5, cfg.q0, cfg.kp)  # include one evaluation in the timing

    def evaluate(X):
        return oracles.analytic_solid_ss(X, cfg.q0, cfg.kp)

    return SolveResult(Method.ANALYTIC, cfg, np.empty(0), math.nan, time.perf_counter() - start, evaluate)


@dataclass
class Sample:
    """Picklable outcome of one solve: deflections at requested points plus diagnostics."""

    method: str
    config: dict
    X: list
    W_tilde: list
    final_loss: float | None
    wall_time: float
    trace: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    error: str | None = None


def sample(cfg: BeamConfig, method, xs, options: SolverOptions = SolverOptions()) -> Sample:
    method = parse_method(method)
    xs = [float(x) for x in xs]
    try:
        res = run(cfg, method, options)
    except (ValueError, np.linalg.LinAlgError) as exc:
        return Sample(method.value, cfg.as_dict(), xs, [], None, 0.0, error=str(exc))
    values = [float(v) for v in np.atleast_1d(res.deflection(np.asarray(xs)))]
    loss = None if math.isnan(res.final_loss) else float(res.final_loss)
    info = {k: v for k, v in res.info.items() if k != "legendre_coefficients"}
    if res.line_search_failed:
        info["line_search_failed"] = True
    return Sample(method.value, cfg.as_dict(), xs, values, loss, res.wall_time,
                  [float(v) for v in res.trace], info)


def _sample_task(args):
    cfg_dict, method, xs, options = args
    return sample(BeamConfig(**cfg_dict), method, xs, options)


def sample_many(tasks, workers: int = 1) -> list:
    """Run ``(cfg, method, xs, options)`` tasks, returning samples in task order.

    With more than one worker the solves fan out over a process pool of that
    size; the result order never depends on completion order.
    """
    payload = [(cfg.as_dict(), parse_method(m).value, list(xs), opts) for cfg, m, xs, opts in tasks]
    if workers <= 1 or len(payload) <= 1:
        return [_sample_task(p) for p in payload]
    with ProcessPoolExecutor(max_workers=min(workers, len(payload))) as pool:
        return list(pool.map(_sample_task, payload))
