import mpmath
import numpy as np
import pytest

from taperbeam.galerkin import galerkin_solve
from taperbeam.model import BeamConfig, residual
from taperbeam.oracles import analytic_solid_ss, fd_solve, fd_solve_raw
from taperbeam.tfc import solve as tfc_solve

T2 = dict(alpha=0.3, n_holes=4, gamma=1.0, q0=10.0, kp=10.0)
T3 = dict(alpha=0.5, n_holes=2, phi=0.5, psi=0.5, q0=5.0, kp=10.0)


class TestAnalytic:
    @pytest.mark.parametrize("kp,expected", [(0.0, 1.302083), (10.0, 0.6448), (25.0, 0.3661)])
    def test_midspan(self, kp, expected):
        assert analytic_solid_ss(0.5, 1.0, kp) == pytest.approx(expected, abs=5e-5)

    def test_kp_zero_is_5_over_384(self):
        assert analytic_solid_ss(0.5, 1.0, 0.0) == pytest.approx(100 * 5 / 384, rel=1e-15)

    def test_continuous_as_kp_vanishes(self):
        X = np.linspace(0, 1, 11)
        np.testing.assert_allclose(analytic_solid_ss(X, 1.0, 1e-12), analytic_solid_ss(X, 1.0, 0.0), atol=1e-6)

    def test_supports(self):
        assert analytic_solid_ss(0.0, 3.0, 7.0) == pytest.approx(0.0, abs=1e-15)
        assert analytic_solid_ss(1.0, 3.0, 7.0) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("kp", [0.0, 10.0, 25.0])
    def test_satisfies_the_equation(self, kp):
        # derivatives by 40-digit numerical differentiation of the closed form
        def w(x):
            k, q = mpmath.mpf(kp), mpmath.mpf(1)
            if kp == 0:
                return q * (x**4 - 2 * x**3 + x) / 24
            a = mpmath.sqrt(k)
            B = (1 - mpmath.cosh(a)) / mpmath.sinh(a)
            return q / k * ((mpmath.cosh(a * x) + B * mpmath.sinh(a * x) - 1) / k + (x - x * x) / 2)

        cfg = BeamConfig(kp=kp)
        for x in np.linspace(0.05, 0.95, 10):
            with mpmath.workdps(40):
                d = [float(mpmath.diff(w, mpmath.mpf(x), k)) for k in (2, 3, 4)]
            assert abs(residual(x, *d, cfg)) <= 1e-10
            with mpmath.workdps(40):
                ref = 100 * float(w(mpmath.mpf(x)))
            assert ref == pytest.approx(analytic_solid_ss(x, 1.0, kp), rel=1e-14)

    def test_negative_kp_rejected(self):
        with pytest.raises(ValueError):
            analytic_solid_ss(0.5, 1.0, -1.0)


class TestFiniteDifference:
    @pytest.mark.parametrize("params", [T2, T3])
    @pytest.mark.parametrize("bc", ["SS", "CS"])
    def test_second_order_convergence(self, params, bc):
        cfg = BeamConfig(**params, bc=bc)
        mids = [fd_solve_raw(cfg, m)[1][(m - 1) // 2] for m in (101, 201, 401, 801)]
        e = np.abs(np.diff(mids))
        assert e[0] / e[1] >= 3.5
        assert e[1] / e[2] >= 3.5

    def test_solid_beam(self):
        assert fd_solve(BeamConfig())(0.5) == pytest.approx(1.30208, abs=1e-4)

    def test_t2_midspan(self):
        assert fd_solve(BeamConfig(**T2))(0.5) == pytest.approx(14.6425, abs=1e-2)

    def test_zero_load(self):
        assert fd_solve(BeamConfig(q0=0.0, kp=3.0, bc="CS"))(np.linspace(0, 1, 5)) == pytest.approx(0.0, abs=1e-15)

    def test_grid_too_coarse(self):
        with pytest.raises(ValueError):
            fd_solve(BeamConfig(), 101)
        with pytest.raises(ValueError):
            fd_solve_raw(BeamConfig(), 5)

    @pytest.mark.parametrize("params", [T2, T3])
    @pytest.mark.parametrize("bc", ["SS", "CS"])
    def test_agrees_with_spectral_solvers(self, params, bc):
        cfg = BeamConfig(**params, bc=bc)
        X = np.array([0.1, 0.5, 0.9])
        fd = fd_solve(cfg)(X)
        np.testing.assert_allclose(tfc_solve(cfg).deflection(X), fd, atol=1e-2)
        np.testing.assert_allclose(galerkin_solve(cfg).deflection(X), fd, atol=1e-2)
