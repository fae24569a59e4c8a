import os
import subprocess
import sys

import numpy as np
import pytest

from taperbeam import _core
from taperbeam.model import BeamConfig
from taperbeam.pinn import PinnObjective, n_params
from taperbeam.solution import CollocationGrid

needs_compiled = pytest.mark.skipif(_core.compiled is None, reason="compiled extension not built")
BACKENDS = [_core.fallback] + ([_core.compiled] if _core.compiled is not None else [])


@pytest.mark.parametrize("k", BACKENDS, ids=lambda k: k.NAME)
def test_cheb_basis_shape_and_endpoints(k):
    B = k.cheb_basis(np.array([0.0, 1.0]), 6)
    assert B.shape == (2, 7, 5)
    np.testing.assert_array_equal(B[1, :, 0], np.ones(7))
    np.testing.assert_array_equal(B[0, :, 0], [(-1) ** j for j in range(7)])


@needs_compiled
def test_cheb_basis_backends_agree():
    x = np.random.default_rng(0).uniform(0, 1, 200)
    np.testing.assert_allclose(_core.compiled.cheb_basis(x, 15), _core.fallback.cheb_basis(x, 15), rtol=1e-13, atol=1e-9)


@needs_compiled
@pytest.mark.parametrize("sizes", [(1, 5, 5, 5, 1), (1, 3, 1), (1, 8, 4, 1)])
def test_forward_jet_backends_agree(sizes):
    rng = np.random.default_rng(1)
    theta = rng.normal(size=n_params(sizes))
    x = rng.uniform(0, 1, 50)
    np.testing.assert_allclose(_core.compiled.mlp_forward_jet(theta, sizes, x),
                               _core.fallback.mlp_forward_jet(theta, sizes, x), rtol=1e-12, atol=1e-12)


@needs_compiled
@pytest.mark.parametrize("bc", ["SS", "CS"])
def test_loss_grad_backends_agree(bc):
    cfg = BeamConfig(alpha=0.8, gamma=5.0, phi=0.5, psi=0.5, n_holes=3, kp=10.0, q0=1.0, bc=bc)
    obj = PinnObjective(cfg, CollocationGrid.uniform())
    theta = np.random.default_rng(2).normal(size=76)
    args = (theta, obj.sizes, obj.x, obj.c2, obj.c3, obj.c4, obj.rhs, obj.probe_x, obj.probe_order, obj.probe_weight)
    lc, gc = _core.compiled.pinn_loss_grad(*args)
    lf, gf = _core.fallback.pinn_loss_grad(*args)
    assert lc == pytest.approx(lf, rel=1e-12)
    np.testing.assert_allclose(gc, gf, rtol=1e-10, atol=1e-12 * np.abs(gf).max())


def test_bad_parameter_length():
    with pytest.raises(ValueError):
        _core.fallback.mlp_forward_jet(np.zeros(5), (1, 5, 1), np.zeros(3))


def test_pure_python_switch():
    env = dict(os.environ, TAPERBEAM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import taperbeam; print(taperbeam.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
