import numpy as np
import pytest

from taperbeam.galerkin import galerkin_solve
from taperbeam.model import BeamConfig
from taperbeam.optim import LbfgsSettings
from taperbeam.pinn import (MlpParams, InputJet, PinnObjective, glorot_init, layer_sizes, mlp_forward_jet,
                            mlp_forward_reference, n_params, pinn_loss_and_grad, train_pinn)
from taperbeam.solution import CollocationGrid

T2 = dict(alpha=0.3, n_holes=4, gamma=1.0, phi=0.0, psi=0.0, kp=10.0, q0=10.0)
SEC51 = dict(alpha=0.8, gamma=5.0, phi=0.5, psi=0.5, n_holes=3, kp=10.0, q0=1.0)

# central stencils for derivatives 1..4 of u0, offsets -2..2
STENCILS = {
    1: np.array([1, -8, 0, 8, -1]) / 12.0,
    2: np.array([-1, 16, -30, 16, -1]) / 12.0,
    3: np.array([-1, 2, 0, -2, 1]) / 2.0,
    4: np.array([1, -4, 6, -4, 1]) / 1.0,
}
ORDER_ERR = {1: 4, 2: 4, 3: 2, 4: 2}


def fd_derivative(f, X, k, h):
    offs = np.arange(-2, 3)
    vals = np.array([f(X + o * h) for o in offs])
    return np.tensordot(STENCILS[k], vals, axes=1) / h**k


def richardson(f, X, k, h=1e-2):
    p = ORDER_ERR[k]
    a, b = fd_derivative(f, X, k, h), fd_derivative(f, X, k, h / 2)
    return (2**p * b - a) / (2**p - 1)


def random_params(rng, sizes=(1, 5, 5, 5, 1)):
    return MlpParams(sizes, rng.normal(scale=0.8, size=n_params(sizes)))


class TestNetwork:
    def test_parameter_count(self):
        assert n_params(layer_sizes()) == 76
        assert MlpParams().vector.shape == (76,)
        with pytest.raises(ValueError):
            MlpParams(vector=np.zeros(10))

    def test_glorot_bounds_and_zero_biases(self):
        v = glorot_init((1, 5, 5, 5, 1), 3)
        layers = MlpParams(vector=v).layers()
        for W, b in layers:
            assert np.all(np.abs(W) <= np.sqrt(6.0 / sum(W.shape)))
            assert np.all(b == 0.0)
        np.testing.assert_array_equal(v, glorot_init((1, 5, 5, 5, 1), 3))
        assert not np.array_equal(v, glorot_init((1, 5, 5, 5, 1), 4))

    def test_zero_params_give_zero_jet(self):
        np.testing.assert_array_equal(mlp_forward_jet(MlpParams(vector=np.zeros(76)), 0.3), np.zeros(5))

    def test_identity_jet(self):
        j = InputJet.variable(0.4)
        assert [float(c) for c in j.c] == [0.4, 1.0, 0.0, 0.0, 0.0]

    def test_kernel_matches_jet_reference(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(0, 1, 10)
        for _ in range(10):
            p = random_params(rng)
            np.testing.assert_allclose(mlp_forward_jet(p, X), mlp_forward_reference(p, X), rtol=1e-12, atol=1e-12)

    def test_unit_chain(self):
        # width-1 chain with unit weights: u = tanh(tanh(tanh(X)))
        sizes = (1, 1, 1, 1, 1)
        p = MlpParams(sizes, np.array([1.0, 0.0] * 4))
        X = np.linspace(0.05, 0.95, 7)
        u = mlp_forward_jet(p, X)
        np.testing.assert_allclose(u[0], np.tanh(np.tanh(np.tanh(X))), rtol=1e-15)
        f = lambda x: np.tanh(np.tanh(np.tanh(x)))
        for k in range(1, 5):
            np.testing.assert_allclose(u[k], richardson(f, X, k), rtol=1e-5, atol=1e-9)

    def test_first_derivative_central_difference(self):
        p = random_params(np.random.default_rng(1))
        eps = 1e-5
        u = mlp_forward_jet(p, 0.5)
        fd = (mlp_forward_jet(p, 0.5 + eps)[0] - mlp_forward_jet(p, 0.5 - eps)[0]) / (2 * eps)
        assert fd == pytest.approx(u[1], rel=1e-7)

    def test_jets_against_richardson_differences(self):
        rng = np.random.default_rng(2)
        tol = {1: 1e-7, 2: 1e-6, 3: 1e-4, 4: 1e-3}
        for _ in range(100):
            p = random_params(rng)
            X = rng.uniform(0.05, 0.95, 10)
            u = mlp_forward_jet(p, X)
            f = lambda x: mlp_forward_jet(p, x)[0]
            for k in range(1, 5):
                scale = np.abs(u[k]).max()
                np.testing.assert_allclose(u[k], richardson(f, X, k), rtol=tol[k], atol=tol[k] * scale)


class TestLoss:
    def test_zero_network_unloaded(self):
        cfg = BeamConfig(**{**T2, "q0": 0.0})
        loss, grad = pinn_loss_and_grad(MlpParams(vector=np.zeros(76)), cfg, CollocationGrid.uniform())
        assert loss == 0.0
        assert np.all(grad == 0.0)

    def test_zero_network_unit_load(self):
        cfg = BeamConfig(q0=1.0, kp=7.0)
        loss, _ = pinn_loss_and_grad(MlpParams(vector=np.zeros(76)), cfg, CollocationGrid.uniform())
        assert loss == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("bc", ["SS", "CS"])
    def test_gradient_per_component(self, bc):
        cfg = BeamConfig(**T2, bc=bc)
        p = random_params(np.random.default_rng(3))
        obj = PinnObjective(cfg, CollocationGrid.uniform())
        _, g = obj(p.vector)
        for i in range(76):
            h = 1e-6 * max(1.0, abs(p.vector[i]))
            e = np.zeros(76)
            e[i] = h
            fd = (obj(p.vector + e)[0] - obj(p.vector - e)[0]) / (2 * h)
            if abs(g[i]) > 1e-8:
                assert fd == pytest.approx(g[i], rel=1e-4), i

    def test_directional_derivatives(self):
        cfg = BeamConfig(**SEC51, bc="CS")
        rng = np.random.default_rng(4)
        p = random_params(rng)
        obj = PinnObjective(cfg, CollocationGrid.uniform())
        _, g = obj(p.vector)
        for _ in range(20):
            d = rng.normal(size=76)
            d /= np.linalg.norm(d)
            eps = 1e-6
            fd = (obj(p.vector + eps * d)[0] - obj(p.vector - eps * d)[0]) / (2 * eps)
            assert fd == pytest.approx(g @ d, rel=1e-5)


class TestTraining:
    def test_table_value_ss(self):
        res = train_pinn(BeamConfig(**T2, bc="SS"))
        assert res.deflection(0.5) == pytest.approx(14.6425, abs=5e-2)
        assert len(res.trace) <= 50
        assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))

    @pytest.mark.xfail(strict=True, reason="seed 42 stalls in a local minimum for this C-S case")
    def test_table_value_cs_default_seed(self):
        assert train_pinn(BeamConfig(**T2, bc="CS")).deflection(0.1) == pytest.approx(1.10, abs=0.1)

    def test_table_value_cs_best_of_seeds(self):
        runs = [train_pinn(BeamConfig(**T2, bc="CS"), seed=s) for s in range(5)]
        best = min(runs, key=lambda r: r.final_loss)
        assert best.deflection(0.1) == pytest.approx(1.10, abs=0.1)

    def test_unloaded_stays_flat(self):
        res = train_pinn(BeamConfig(**{**T2, "q0": 0.0}))
        assert np.max(np.abs(res.deflection(np.linspace(0, 1, 101)))) <= 1e-3

    @pytest.mark.parametrize("bc", ["SS", "CS"])
    def test_demo_configuration_loss_bracket(self, bc):
        res = train_pinn(BeamConfig(**SEC51, bc=bc))
        assert 1e-8 <= res.final_loss <= 1e-2
        assert res.info["seed"] == 42

    def test_close_to_galerkin_ss(self):
        cfg = BeamConfig(**T2, bc="SS")
        X = np.array([0.1, 0.5, 0.9])
        np.testing.assert_allclose(train_pinn(cfg).deflection(X), galerkin_solve(cfg).deflection(X), atol=5e-2)

    def test_seed_from_environment(self, monkeypatch):
        monkeypatch.setenv("TAPERBEAM_SEED", "7")
        s = LbfgsSettings(outer_steps=1, max_inner_iterations=1)
        assert train_pinn(BeamConfig(), settings=s).info["seed"] == 7
        assert train_pinn(BeamConfig(), settings=s, seed=3).info["seed"] == 3

    def test_custom_architecture(self):
        s = LbfgsSettings(outer_steps=2, max_inner_iterations=5)
        res = train_pinn(BeamConfig(), settings=s, hidden_layers=1, width=4)
        assert res.info["layer_sizes"] == [1, 4, 1]
        assert res.weights.shape == (n_params((1, 4, 1)),)
