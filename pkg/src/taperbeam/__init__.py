"""Static bending of tapered perforated beams on a Pasternak foundation."""

__version__ = "0.1.0"

from ._core import BACKEND
from .ce import ConstrainedExpression, build_ce
from .galerkin import galerkin_solve
from .model import BeamConfig, BoundaryKind, stiffness_factor
from .oracles import analytic_solid_ss, fd_solve
from .pinn import train_pinn
from .solution import DEFLECTION_SCALE, CollocationGrid, Method, SolveResult
from .solvers import SolverOptions, run
from .tfc import solve as tfc_solve

__all__ = [
    "BACKEND",
    "BeamConfig",
    "BoundaryKind",
    "CollocationGrid",
    "ConstrainedExpression",
    "DEFLECTION_SCALE",
    "Method",
    "SolveResult",
    "SolverOptions",
    "analytic_solid_ss",
    "build_ce",
    "fd_solve",
    "galerkin_solve",
    "run",
    "stiffness_factor",
    "tfc_solve",
    "train_pinn",
]
