"""Physics-informed network baseline.

A small tanh MLP maps X to the deflection.  The loss needs the 2nd..4th
input derivatives of the output; they are propagated forward as degree-4
jets, and the parameter gradient is obtained by reverse-mode
differentiation through the jet arithmetic (see ``taperbeam._core``).
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass

import numpy as np

from . import _core
from .model import BeamConfig, BoundaryKind, load, operator_coefficients
from .optim import LbfgsSettings, lbfgs_minimize
from .solution import DEFLECTION_SCALE, CollocationGrid, Method, SolveResult

DEFAULT_SEED = 42
PINN_SETTINGS = LbfgsSettings(
    outer_steps=50, max_inner_iterations=50, history_size=100, gradient_tolerance=1e-12
)

# boundary probes (location, derivative order), each weighted 1/4
BC_PROBES = {
    BoundaryKind.SS: ((0.0, 0), (1.0, 0), (0.0, 2), (1.0, 2)),
    BoundaryKind.CS: ((0.0, 0), (1.0, 0), (0.0, 1), (1.0, 2)),
}


def default_seed() -> int:
    return int(os.environ.get("TAPERBEAM_SEED", DEFAULT_SEED))


def layer_sizes(hidden_layers: int = 3, width: int = 5) -> tuple:
    return (1,) + (width,) * hidden_layers + (1,)


def n_params(sizes) -> int:
    return sum(a * b + b for a, b in zip(sizes[:-1], sizes[1:]))


@dataclass
class MlpParams:
    layer_sizes: tuple = (1, 5, 5, 5, 1)
    vector: np.ndarray = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if self.vector is None:
            self.vector = glorot_init(self.layer_sizes, self.seed)
        self.vector = np.asarray(self.vector, dtype=float)
        if self.vector.shape != (n_params(self.layer_sizes),):
            raise ValueError(
                f"expected {n_params(self.layer_sizes)} parameters for {self.layer_sizes}, "
                f"got {self.vector.shape}"
            )

    def layers(self):
        """(W, b) per layer, W of shape (fan_out, fan_in)."""
        out, off = [], 0
        for fi, fo in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            W = self.vector[off : off + fi * fo].reshape(fo, fi)
            off += fi * fo
            out.append((W, self.vector[off : off + fo]))
            off += fo
        return out


def glorot_init(sizes, seed: int) -> np.ndarray:
    """Uniform Glorot weights, zero biases."""
    rng = np.random.default_rng(seed)
    parts = []
    for fi, fo in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fi + fo))
        parts.append(rng.uniform(-limit, limit, size=fi * fo))
        parts.append(np.zeros(fo))
    return np.concatenate(parts)


class InputJet:
    """Value and first four derivatives of a quantity with respect to X.

    ``c[k]`` holds the k-th derivative; entries may be scalars or arrays.
    """

    __slots__ = ("c",)
    ORDER = 4

    def __init__(self, coeffs):
        self.c = [np.asarray(v, dtype=float) for v in coeffs]
        if len(self.c) != self.ORDER + 1:
            raise ValueError("a jet carries exactly five coefficients")

    @classmethod
    def variable(cls, x):
        x = np.asarray(x, dtype=float)
        zero = np.zeros_like(x)
        return cls([x, np.ones_like(x), zero, zero, zero])

    @classmethod
    def constant(cls, v):
        v = np.asarray(v, dtype=float)
        zero = np.zeros_like(v)
        return cls([v, zero, zero, zero, zero])

    def _coerce(self, other):
        return other if isinstance(other, InputJet) else InputJet.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        return InputJet([a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return InputJet([-a for a in self.c])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, InputJet):
            return InputJet([a * other for a in self.c])
        # Leibniz rule
        return InputJet([
            sum(math.comb(n, k) * self.c[k] * other.c[n - k] for k in range(n + 1))
            for n in range(self.ORDER + 1)
        ])

    __rmul__ = __mul__

    def tanh(self):
        t = np.tanh(self.c[0])
        t2 = t * t
        f1 = 1.0 - t2
        f2 = -2.0 * t * f1
        f3 = f1 * (6.0 * t2 - 2.0)
        f4 = f1 * t * (16.0 - 24.0 * t2)
        _, z1, z2, z3, z4 = self.c
        return InputJet([
            t,
            f1 * z1,
            f2 * z1**2 + f1 * z2,
            f3 * z1**3 + 3.0 * f2 * z1 * z2 + f1 * z3,
            f4 * z1**4 + 6.0 * f3 * z1**2 * z2 + f2 * (3.0 * z2**2 + 4.0 * z1 * z3) + f1 * z4,
        ])


def mlp_forward_reference(params: MlpParams, X):
    """Output jet built from ``InputJet`` arithmetic; slow, used to cross-check the kernels."""
    a = [InputJet.variable(X)]
    layers = params.layers()
    for i, (W, b) in enumerate(layers):
        z = []
        for o in range(W.shape[0]):
            acc = InputJet.constant(b[o] * np.ones_like(np.asarray(X, dtype=float)))
            for j, aj in enumerate(a):
                acc = acc + aj * W[o, j]
            z.append(acc)
        a = z if i == len(layers) - 1 else [zj.tanh() for zj in z]
    return np.array(a[0].c)


def mlp_forward_jet(params: MlpParams, X) -> np.ndarray:
    """(u, u', u'', u''', u'''') at X; shape (5,) for scalar X else (5, n)."""
    u = _core.mlp_forward_jet(params.vector, params.layer_sizes, np.atleast_1d(np.asarray(X, dtype=float)))
    return u[:, 0] if np.ndim(X) == 0 else u


class PinnObjective:
    """Loss and exact gradient for one configuration and collocation grid."""

    def __init__(self, cfg: BeamConfig, grid: CollocationGrid, sizes=(1, 5, 5, 5, 1)):
        self.cfg = cfg
        self.sizes = tuple(sizes)
        self.x = np.ascontiguousarray(grid.points)
        self.c2, self.c3, self.c4 = (np.ascontiguousarray(c) for c in operator_coefficients(self.x, cfg))
        self.rhs = np.ascontiguousarray(load(self.x, cfg.q0, cfg.gamma))
        probes = BC_PROBES[cfg.bc]
        self.probe_x = np.array([p[0] for p in probes])
        self.probe_order = np.array([p[1] for p in probes], dtype=np.intp)
        self.probe_weight = np.full(len(probes), 0.25)

    def __call__(self, theta):
        return _core.pinn_loss_grad(
            theta, self.sizes, self.x, self.c2, self.c3, self.c4, self.rhs,
            self.probe_x, self.probe_order, self.probe_weight,
        )


def pinn_loss_and_grad(params: MlpParams, cfg: BeamConfig, grid: CollocationGrid):
    return PinnObjective(cfg, grid, params.layer_sizes)(params.vector)


def train_pinn(
    cfg: BeamConfig,
    settings: LbfgsSettings = PINN_SETTINGS,
    seed: int | None = None,
    hidden_layers: int = 3,
    width: int = 5,
    grid: CollocationGrid | None = None,
) -> SolveResult:
    seed = default_seed() if seed is None else int(seed)
    grid = grid or CollocationGrid.uniform(100)
    sizes = layer_sizes(hidden_layers, width)
    start = time.perf_counter()
    params = MlpParams(sizes, seed=seed)
    objective = PinnObjective(cfg, grid, sizes)
    opt = lbfgs_minimize(objective, params.vector, settings)
    elapsed = time.perf_counter() - start
    trained = MlpParams(sizes, opt.x, seed)

    def evaluate(X):
        return DEFLECTION_SCALE * mlp_forward_jet(trained, X)[0]

    return SolveResult(
        Method.PINN, cfg, opt.x, opt.loss, elapsed, evaluate,
        trace=opt.trace, converged=opt.converged, line_search_failed=opt.line_search_failed,
        info={"layer_sizes": list(sizes), "seed": seed, "iterations": opt.iterations,
              "evaluations": opt.evaluations, "backend": _core.BACKEND},
    )
