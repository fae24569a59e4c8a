"""Collocation grids and the result record shared by all solvers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .model import BeamConfig

DEFLECTION_SCALE = 100.0  # reported deflection is 100 x the non-dimensional one


class GridKind(str, enum.Enum):
    UNIFORM = "uniform"
    CGL = "chebyshev-gauss-lobatto"


@dataclass(frozen=True, eq=False)
class CollocationGrid:
    points: np.ndarray
    kind: GridKind = GridKind.UNIFORM

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1)
        if pts.size == 0:
            raise ValueError("collocation grid is empty")
        if pts[0] < 0.0 or pts[-1] > 1.0 or np.any(np.diff(pts) <= 0.0):
            raise ValueError("collocation points must be strictly increasing within [0, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, n: int = 100) -> "CollocationGrid":
        return cls(np.linspace(0.0, 1.0, n), GridKind.UNIFORM)

    @classmethod
    def chebyshev_lobatto(cls, n: int = 100) -> "CollocationGrid":
        k = np.arange(n)[::-1]
        pts = 0.5 * (1.0 + np.cos(np.pi * k / (n - 1)))
        pts[0], pts[-1] = 0.0, 1.0
        return cls(pts, GridKind.CGL)

    @classmethod
    def make(cls, n: int = 100, kind="uniform") -> "CollocationGrid":
        kind = GridKind(kind)
        return cls.uniform(n) if kind is GridKind.UNIFORM else cls.chebyshev_lobatto(n)

    def __len__(self):
        return self.points.shape[0]


class Method(str, enum.Enum):
    TFC_LS = "dfl-tfc-ls"
    TFC_LBFGS = "dfl-tfc-lbfgs"
    GALERKIN = "galerkin"
    PINN = "pinn"
    FD = "fd"
    ANALYTIC = "analytic"


@dataclass
class SolveResult:
    method: Method
    cfg: BeamConfig
    weights: np.ndarray
    final_loss: float
    wall_time: float
    evaluator: Callable = field(repr=False)
    trace: list = field(default_factory=list)
    converged: Optional[bool] = None
    line_search_failed: bool = False
    rank: Optional[int] = None
    info: dict = field(default_factory=dict)

    def deflection(self, X):
        """Reported deflection 100 * W(X)."""
        return self.evaluator(X)
