"""Chebyshev expansion on [0, 1] via the affine map X -> 2X - 1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _core

MAP_SCALE = 2.0


@dataclass(frozen=True)
class BasisSet:
    """T_0 .. T_order evaluated on the mapped variable 2X - 1."""

    order: int = 15
    map_scale: float = MAP_SCALE

    def __post_init__(self):
        if self.order < 4:
            raise ValueError(f"Chebyshev order must be at least 4, got {self.order}")

    @property
    def size(self) -> int:
        return self.order + 1

    def evaluate(self, X) -> np.ndarray:
        """Basis derivatives at each X, shape (n, order+1, 5)."""
        return _core.cheb_basis(np.atleast_1d(np.asarray(X, dtype=float)), self.order)


def eval_basis(X: float, order: int) -> np.ndarray:
    """Rows T_k(2X-1) with X-derivatives of order 0..4, shape (order+1, 5)."""
    return _core.cheb_basis(np.array([float(X)]), int(order))[0]


def free_function(weights, X) -> np.ndarray:
    """Linear-output Chebyshev free function h and four X-derivatives.

    For scalar X the result has shape (5,); for an array of n points, (5, n).
    """
    w = np.asarray(weights, dtype=float)
    B = _core.cheb_basis(np.atleast_1d(np.asarray(X, dtype=float)), w.shape[0] - 1)
    out = np.einsum("nkd,k->dn", B, w)
    return out[:, 0] if np.ndim(X) == 0 else out
