"""Weighted-residual Galerkin solver on boundary-characteristic polynomials.

The trial space is every polynomial of degree < n meeting all four boundary
conditions.  It is spanned by X**k minus its cubic boundary correction
(k = 4 .. n-1), then orthonormalized in L2(0, 1).  Orthonormalization is done
in exact rationals and the result is stored as shifted-Legendre coefficients,
which stay O(1) where monomial coefficients would grow past 1e9.  Test functions equal the
trial functions and the strong-form residual is projected on them directly,
with no integration by parts.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import legendre as leg

from .ce import FUNCTIONALS
from .model import BeamConfig, BoundaryKind, load, operator_coefficients
from .solution import DEFLECTION_SCALE, Method, SolveResult

QUADRATURE_POINTS = 64
MAX_N = 20


def gauss_legendre_01(npts: int = QUADRATURE_POINTS):
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def constraint_matrix(bc, n: int) -> np.ndarray:
    """The four boundary functionals applied to 1, X, ..., X**(n-1); shape (4, n)."""
    return np.array([f.on_monomials(n - 1) for f in FUNCTIONALS[BoundaryKind.parse(bc)]])


def _poly_derivatives(coeffs, X, upto=4):
    """Derivatives in X of shifted-Legendre series (argument 2X-1)."""
    t = 2.0 * np.asarray(X, dtype=float) - 1.0
    out = np.empty((upto + 1, len(coeffs)) + np.shape(X))
    for i, c in enumerate(coeffs):
        for d in range(upto + 1):
            out[d, i] = leg.legval(t, c)
            c = leg.legder(c, scl=2.0)
    return out


@functools.lru_cache(maxsize=None)
def _shifted_legendre_monomials(n: int):
    """Integer matrix M with M[k][j] = coefficient of X**k in P_j(2X-1)."""
    return [[(-1) ** (j + k) * math.comb(j, k) * math.comb(j + k, k) if k <= j else 0 for j in range(n)]
            for k in range(n)]


def _to_legendre(mono):
    # exact back substitution on the upper-triangular change of basis
    M = _shifted_legendre_monomials(len(mono))
    a = [Fraction(0)] * len(mono)
    for j in reversed(range(len(mono))):
        a[j] = (mono[j] - sum(M[j][i] * a[i] for i in range(j + 1, len(mono)))) / M[j][j]
    return a


@dataclass(frozen=True)
class GalerkinBasis:
    bc: BoundaryKind
    n: int
    polys: tuple  # shifted-Legendre coefficients, each of length n

    def derivatives(self, X, upto: int = 4) -> np.ndarray:
        """Basis derivatives, shape (upto+1, n-4, *X.shape)."""
        return _poly_derivatives(self.polys, np.asarray(X, dtype=float), upto)

    def gram(self, npts: int = QUADRATURE_POINTS) -> np.ndarray:
        x, w = gauss_legendre_01(npts)
        V = self.derivatives(x, 0)[0]
        return (V * w) @ V.T


@functools.lru_cache(maxsize=None)
def _exact_basis(bc: BoundaryKind, n: int):
    # Gram-Schmidt in exact rationals: inner products of monomials are 1/(i+j+1).
    C = [[Fraction(v).limit_denominator(1) for v in row] for row in constraint_matrix(bc, n)]
    # null space of C: X**k minus the cubic that restores the boundary values
    M = [row[:4] for row in C]
    inv = _inverse4(M)
    vecs = []
    for k in range(4, n):
        low = [-sum(inv[i][j] * C[j][k] for j in range(4)) for i in range(4)]
        vecs.append(low + [Fraction(int(j == k)) for j in range(4, n)])

    def inner(u, v):
        return sum(u[i] * v[j] / (i + j + 1) for i in range(n) if u[i] for j in range(n) if v[j])

    ortho, norms = [], []
    for v in vecs:
        for u, uu in zip(ortho, norms):
            proj = inner(u, v) / uu
            v = [a - proj * b for a, b in zip(v, u)]
        ortho.append(v)
        norms.append(inner(v, v))
    return tuple(
        np.array([float(c) for c in _to_legendre(v)]) / math.sqrt(float(nn)) for v, nn in zip(ortho, norms)
    )


def _inverse4(M):
    # Gauss-Jordan on a small rational matrix
    n = len(M)
    A = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise np.linalg.LinAlgError("boundary functionals are linearly dependent")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [a / p for a in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


def build_basis(bc, n: int) -> GalerkinBasis:
    """Orthonormal polynomials of degree < n that satisfy the four BCs of ``bc``.

    Orthonormality is exact before the coefficients are rounded to double.
    """
    bc = BoundaryKind.parse(bc)
    if n < 5:
        raise ValueError(f"need n >= 5 for a nonempty trial space, got {n}")
    if n > MAX_N:
        raise ValueError(f"n must be at most {MAX_N}, got {n}")
    return GalerkinBasis(bc, n, _exact_basis(bc, n))


def galerkin_solve(cfg: BeamConfig, n: int = 15) -> SolveResult:
    start = time.perf_counter()
    basis = build_basis(cfg.bc, n)
    x, w = gauss_legendre_01()
    D = basis.derivatives(x)
    c2, c3, c4 = operator_coefficients(x, cfg)
    L = c2 * D[2] + c3 * D[3] + c4 * D[4]      # operator applied to each trial function
    K = (D[0] * w) @ L.T                        # K[i, j] = <L theta_j, theta_i>
    f = (D[0] * w) @ load(x, cfg.q0, cfg.gamma)
    try:
        eta = np.linalg.solve(K, f)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"Galerkin system is singular for {cfg}") from exc
    coeffs = np.array(basis.polys).T @ eta      # shifted-Legendre coefficients of the deflection

    # mean squared strong residual on 100 uniform points, for comparison with collocation
    Xc = np.linspace(0.0, 1.0, 100)
    d = _poly_derivatives([coeffs], Xc)[:, 0]
    a2, a3, a4 = operator_coefficients(Xc, cfg)
    r = a2 * d[2] + a3 * d[3] + a4 * d[4] - load(Xc, cfg.q0, cfg.gamma)

    def evaluate(X):
        return DEFLECTION_SCALE * leg.legval(2.0 * np.asarray(X, dtype=float) - 1.0, coeffs)

    elapsed = time.perf_counter() - start
    return SolveResult(Method.GALERKIN, cfg, eta, float(np.mean(r * r)), elapsed, evaluate,
                       info={"n": n, "legendre_coefficients": coeffs.tolist()})
