"""Physical model of a tapered perforated beam on a Pasternak foundation.

Everything here is non-dimensional.  The bending stiffness is

    E(X) = S(alpha, N) * (1 + phi*X + psi*X**2)**3

and the load is ``q0 * exp(gamma*X)``.  The governing equation

    d2/dX2 [E W''] = q0 exp(gamma X) + kp W''

is used in product-rule form, ``E'' W'' + 2 E' W''' + E W''''``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class BoundaryKind(str, enum.Enum):
    SS = "SS"  # simply supported at both ends
    CS = "CS"  # clamped at X=0, simply supported at X=1

    @classmethod
    def parse(cls, value) -> "BoundaryKind":
        if isinstance(value, cls):
            return value
        key = str(value).upper().replace("-", "")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown boundary kind {value!r}; expected SS or CS") from None


def stiffness_factor(alpha: float, n_holes: int) -> float:
    """Perforation stiffness ratio S(alpha, N) of a beam with square holes.

    Equals 1 for a solid beam (alpha = 1) whatever the number of hole rows.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if n_holes < 0:
        raise ValueError(f"n_holes must be non-negative, got {n_holes}")
    a, n = float(alpha), float(n_holes)
    num = a * (n + 1.0) * (n * n + 2.0 * n + a * a)
    den = (
        (1.0 - a * a + a**3) * n**3
        + 3.0 * a * n * n
        + (3.0 + 2.0 * a - 3.0 * a * a + a**3) * a * a * n
        + a**3
    )
    return num / den


def taper_minimum(phi: float, psi: float) -> float:
    """Smallest value of 1 + phi*X + psi*X**2 over X in [0, 1]."""
    candidates = [1.0, 1.0 + phi + psi]
    if psi != 0.0:
        vertex = -phi / (2.0 * psi)
        if 0.0 < vertex < 1.0:
            candidates.append(1.0 + phi * vertex + psi * vertex * vertex)
    return min(candidates)


@dataclass(frozen=True)
class BeamConfig:
    alpha: float = 1.0
    n_holes: int = 0
    phi: float = 0.0
    psi: float = 0.0
    gamma: float = 0.0
    q0: float = 1.0
    kp: float = 0.0
    bc: BoundaryKind = BoundaryKind.SS

    def __post_init__(self):
        object.__setattr__(self, "bc", BoundaryKind.parse(self.bc))
        if isinstance(self.n_holes, float) and not self.n_holes.is_integer():
            raise ValueError(f"n_holes must be an integer, got {self.n_holes}")
        object.__setattr__(self, "n_holes", int(self.n_holes))
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.n_holes < 0:
            raise ValueError(f"n_holes must be non-negative, got {self.n_holes}")
        if self.q0 < 0.0:
            raise ValueError(f"q0 must be non-negative, got {self.q0}")
        if self.kp < 0.0:
            raise ValueError(f"kp must be non-negative, got {self.kp}")
        if taper_minimum(self.phi, self.psi) <= 0.0:
            raise ValueError(
                f"taper 1 + phi*X + psi*X^2 must stay positive on [0, 1] "
                f"(phi={self.phi}, psi={self.psi})"
            )

    @property
    def profile(self) -> "StiffnessProfile":
        return StiffnessProfile(stiffness_factor(self.alpha, self.n_holes), self.phi, self.psi)

    def replace(self, **changes) -> "BeamConfig":
        fields = self.as_dict()
        fields.update(changes)
        return BeamConfig(**fields)

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "n_holes": self.n_holes,
            "phi": self.phi,
            "psi": self.psi,
            "gamma": self.gamma,
            "q0": self.q0,
            "kp": self.kp,
            "bc": self.bc.value,
        }


@dataclass(frozen=True)
class StiffnessProfile:
    s_factor: float
    phi: float = 0.0
    psi: float = 0.0

    def __call__(self, X):
        return self.s_factor * (1.0 + self.phi * X + self.psi * np.square(X)) ** 3


def ei_eq(X, profile: StiffnessProfile):
    """Equivalent stiffness and its first two X-derivatives.

    Works on scalars or arrays; returns ``(e0, e1, e2)``.
    """
    s, phi, psi = profile.s_factor, profile.phi, profile.psi
    g = 1.0 + phi * X + psi * np.square(X)
    g1 = phi + 2.0 * psi * X
    g2 = 2.0 * psi
    e0 = s * g**3
    e1 = 3.0 * s * g**2 * g1
    e2 = s * (6.0 * g * g1**2 + 3.0 * g**2 * g2)
    return e0, e1, e2


def load(X, q0: float, gamma: float):
    if np.ndim(X) == 0:
        return q0 * math.exp(gamma * X)
    return q0 * np.exp(gamma * np.asarray(X, dtype=float))


def operator_coefficients(X, cfg: BeamConfig):
    """Coefficients (c2, c3, c4) of W'', W''', W'''' in the residual."""
    e0, e1, e2 = ei_eq(X, cfg.profile)
    return e2 - cfg.kp, 2.0 * e1, e0


def residual(X, w2, w3, w4, cfg: BeamConfig):
    """Strong-form residual at X given the 2nd..4th derivatives of a trial deflection."""
    c2, c3, c4 = operator_coefficients(X, cfg)
    return c2 * w2 + c3 * w3 + c4 * w4 - load(X, cfg.q0, cfg.gamma)
