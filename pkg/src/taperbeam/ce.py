"""Constrained expressions for the S-S and C-S beam boundary conditions.

A constrained expression turns any smooth free function ``h`` into a trial
deflection that meets all four boundary conditions exactly:

    W(X) = h(X) - sum_j phi_j(X) * c_j[h]

``c_j`` are the boundary functionals (a value, slope or curvature at X=0 or
X=1) and ``phi_j`` are cubic switching polynomials with ``c_i[phi_j] = delta_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as P

from .model import BoundaryKind

N_SUPPORT = 4  # support functions 1, X, X^2, X^3


@dataclass(frozen=True)
class BoundaryFunctional:
    location: float
    derivative_order: int

    def __post_init__(self):
        if self.location not in (0.0, 1.0):
            raise ValueError("boundary functionals live at X=0 or X=1")
        if not 0 <= self.derivative_order <= 2:
            raise ValueError("only value, slope and curvature functionals are supported")

    def on_monomials(self, degree: int) -> np.ndarray:
        """Apply the functional to 1, X, ..., X**degree."""
        out = np.zeros(degree + 1)
        for j in range(degree + 1):
            c = np.zeros(degree + 1)
            c[j] = 1.0
            out[j] = P.polyval(self.location, P.polyder(c, self.derivative_order))
        return out


FUNCTIONALS = {
    BoundaryKind.SS: (
        BoundaryFunctional(0.0, 0),
        BoundaryFunctional(1.0, 0),
        BoundaryFunctional(0.0, 2),
        BoundaryFunctional(1.0, 2),
    ),
    BoundaryKind.CS: (
        BoundaryFunctional(0.0, 0),
        BoundaryFunctional(0.0, 1),
        BoundaryFunctional(1.0, 0),
        BoundaryFunctional(1.0, 2),
    ),
}

# Switching polynomials in ascending monomial coefficients, one row per
# functional above.  The constrained expression subtracts them, so these are
# the negated multipliers of h(0), h(1), ... in the written-out expressions.
_F = Fraction
CLOSED_FORM = {
    BoundaryKind.SS: (
        (_F(1), _F(-1), _F(0), _F(0)),
        (_F(0), _F(1), _F(0), _F(0)),
        (_F(0), _F(-1, 3), _F(1, 2), _F(-1, 6)),
        (_F(0), _F(-1, 6), _F(0), _F(1, 6)),
    ),
    BoundaryKind.CS: (
        (_F(1), _F(0), _F(-3, 2), _F(1, 2)),
        (_F(0), _F(1), _F(-3, 2), _F(1, 2)),
        (_F(0), _F(0), _F(3, 2), _F(-1, 2)),
        (_F(0), _F(0), _F(-1, 4), _F(1, 4)),
    ),
}


class SingularConstraintsError(ValueError):
    pass


@dataclass(frozen=True)
class ConstrainedExpression:
    bc: BoundaryKind
    functionals: tuple
    switching: np.ndarray  # shape (4, 4): row j holds phi_j coefficients

    def switching_derivatives(self, X) -> np.ndarray:
        """phi_j^(d)(X) for d = 0..4, shape (5, *X.shape, 4)."""
        X = np.asarray(X, dtype=float)
        out = np.zeros((5,) + X.shape + (N_SUPPORT,))
        for j, coeffs in enumerate(self.switching):
            c = coeffs
            for d in range(4):
                out[d, ..., j] = P.polyval(X, c)
                c = P.polyder(c)
            # degree <= 3, so the 4th derivative vanishes
        return out


def coefficient_matrix(functionals) -> np.ndarray:
    """Functionals applied to the support monomials: M[i, j] = c_i[X**j]."""
    return np.array([f.on_monomials(N_SUPPORT - 1) for f in functionals])


def build_ce_generic(bc) -> ConstrainedExpression:
    """Build switching polynomials by inverting the support coefficient matrix."""
    bc = BoundaryKind.parse(bc)
    functionals = FUNCTIONALS[bc]
    M = coefficient_matrix(functionals)
    if abs(np.linalg.det(M)) < 1e-12:
        raise SingularConstraintsError(f"boundary functionals for {bc.value} are linearly dependent")
    alpha = np.linalg.inv(M)
    # phi_j = sum_i alpha[i, j] * X**i
    return ConstrainedExpression(bc, functionals, np.ascontiguousarray(alpha.T))


def build_ce(bc) -> ConstrainedExpression:
    """Constrained expression for ``bc`` from the closed-form switching polynomials."""
    bc = BoundaryKind.parse(bc)
    table = np.array([[float(v) for v in row] for row in CLOSED_FORM[bc]])
    return ConstrainedExpression(bc, FUNCTIONALS[bc], table)


def ce_eval(ce: ConstrainedExpression, X, h_values, h_functionals) -> np.ndarray:
    """Evaluate the constrained expression and its first four derivatives.

    Parameters
    ----------
    X : array_like, shape (n,) or scalar
    h_values : array_like, shape (5, n, ...)
        Free function derivatives of order 0..4 at X.
    h_functionals : array_like, shape (4, ...)
        The boundary functionals of ``ce`` applied to the free function, in
        the same order as ``ce.functionals``.  Trailing axes must match
        those of ``h_values``.

    Returns
    -------
    ndarray, shape (5, n, ...)
    """
    h_values = np.asarray(h_values, dtype=float)
    c = np.asarray(h_functionals, dtype=float)
    phi = ce.switching_derivatives(X)
    correction = np.tensordot(phi, c, axes=([-1], [0]))
    return h_values - correction
