import math

import numpy as np
import pytest
from scipy.linalg import expm

from su11 import closed_form as cf
from su11 import oracle
from su11.coefficients import Constant, Sinusoid
from su11.core import SolvableScenario, Su11Hamiltonian, hamiltonian_matrix
from su11.oracle import IntegratorConfig, RiccatiBlowupError, integrate_riccati, integrate_system, integrate_U, factorised_matrix


def eig_exponential(m, t):
    w, v = np.linalg.eig(m)
    return v @ np.diag(np.exp(-1j * w * t)) @ np.linalg.inv(v)


class TestIntegrateU:
    def test_diagonal(self):
        h = Su11Hamiltonian.constant(1.3, 0.0)
        for t in (0.0, 0.7, 5.0):
            expected = np.diag([np.exp(-1.3j * t), np.exp(1.3j * t)])
            np.testing.assert_allclose(integrate_U(h, t), expected, atol=1e-9)

    @pytest.mark.parametrize("params", [(2.0, 1.0, 0.3), (0.5, 1.0, -1.2), (0.0, 0.8, 0.0), (1.0, 1.0, 0.4)])
    def test_constant_matches_exponential(self, params):
        h = Su11Hamiltonian.constant(*params)
        m = hamiltonian_matrix(h, 0.0)
        ts = np.array([0.5, 2.0, 4.0])
        got = integrate_U(h, ts)
        for t, u in zip(ts, got):
            ref = eig_exponential(m, t) if params[0] != params[1] else expm(-1j * m * t)
            assert np.max(np.abs(u - ref)) <= 1e-9 * max(1.0, np.max(np.abs(ref)))

    def test_tanh_law(self):
        sc = SolvableScenario.rabi(0.0, 0.7)
        ts = np.linspace(0.1, 8.0, 20)
        us = integrate_U(sc.hamiltonian(), ts)
        np.testing.assert_allclose(np.abs(us[:, 1, 0]) / np.abs(us[:, 0, 0]), np.tanh(0.7 * ts), atol=1e-10)

    def test_unit_determinant(self):
        h = Su11Hamiltonian(Sinusoid(1.0, 0.5, 1.0), Sinusoid(0.8, 0.3, 2.0), Sinusoid(0.0, 1.0, 0.5))
        cfg = oracle.DEFAULT
        us = integrate_U(h, np.linspace(0, 5, 11))
        size = np.max(np.abs(us), axis=(1, 2)) ** 2
        assert np.all(np.abs(np.linalg.det(us) - 1) <= 5 * cfg.abs_tol * size)

    def test_determinant_under_growth_scales_with_entries(self):
        # a ~ cosh(t): entrywise determinant only holds relative to |a|^2 in float64
        us = integrate_U(SolvableScenario.rabi(0.0, 1.0).hamiltonian(), np.array([2.0, 6.0, 10.0]))
        rel = np.abs(np.linalg.det(us) - 1) / np.max(np.abs(us), axis=(1, 2)) ** 2
        assert np.all(rel <= 1e-9)

    def test_halving_tolerance_converges(self):
        h = SolvableScenario(1.5, Sinusoid(1.0, 0.4, 1.0), Constant(0.2)).hamiltonian()
        coarse_cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
        fine_cfg = IntegratorConfig(rel_tol=5e-9, abs_tol=5e-11)
        coarse, fine = integrate_U(h, 6.0, coarse_cfg), integrate_U(h, 6.0, fine_cfg)
        assert np.max(np.abs(coarse - fine)) < 1e-8

    def test_rk4_fixed(self):
        sc = SolvableScenario.rabi(2.0, 1.0, 0.3)
        ts = np.array([1.0, 3.0])
        got = integrate_U(sc.hamiltonian(), ts, IntegratorConfig(method="rk4_fixed", max_step=1e-3))
        ref = np.array([p.matrix() for p in cf.propagators(sc, ts)])
        np.testing.assert_allclose(got, ref, atol=1e-10)

    def test_rk4_needs_finite_step(self):
        with pytest.raises(ValueError, match="max_step"):
            integrate_U(lambda t: np.zeros((2, 2)), 1.0, IntegratorConfig(method="rk4_fixed"))

    def test_step_budget(self):
        cfg = IntegratorConfig(method="rk4_fixed", max_step=1e-3, max_steps=10)
        with pytest.raises(oracle.IntegrationError, match="budget"):
            integrate_U(Su11Hamiltonian.constant(1.0, 0.5), 1.0, cfg)

    def test_negative_time(self):
        with pytest.raises(ValueError):
            integrate_U(Su11Hamiltonian.constant(1.0, 0.5), -1.0)

    def test_unsorted_times(self):
        h = Su11Hamiltonian.constant(2.0, 1.0)
        ts = np.array([3.0, 1.0, 2.0])
        got = integrate_U(h, ts)
        for t, u in zip(ts, got):
            np.testing.assert_allclose(u, integrate_U(h, t), atol=1e-9)

    def test_plain_callable(self):
        m = np.array([[1.0, -0.5], [0.5, -1.0]])
        np.testing.assert_allclose(integrate_U(lambda t: m, 2.0, IntegratorConfig(max_step=0.01)),
                                   expm(-2j * m), atol=1e-9)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(rel_tol=0.0), dict(abs_tol=-1.0), dict(max_step=0.0), dict(method="euler")])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            IntegratorConfig(**kw)


class TestRiccati:
    def test_initial(self):
        u = integrate_riccati(Su11Hamiltonian.constant(2.0, 1.0), 0.0)
        np.testing.assert_array_equal(u, [0, 0, 0])

    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.0])
    def test_change_of_variable(self, nu):
        sc = SolvableScenario(nu, Sinusoid(1.0, 0.5, 1.0), Sinusoid(0.0, 0.3, 1.0, math.pi / 2), phi0=0.4)
        ts = np.linspace(0.5, 8.0, 9)
        u1 = integrate_riccati(sc.hamiltonian(), ts)[:, 0]
        expected = 1j * np.exp(1j * sc.phi_omega.value(ts)) * cf.eval_Y(cf.solve(sc), ts)
        assert np.max(np.abs(u1 - expected)) <= 1e-7

    def test_caley_klein_relations(self):
        h = Su11Hamiltonian(Sinusoid(1.0, 0.5, 1.0), Sinusoid(0.8, 0.3, 2.0), Sinusoid(0.0, 1.0, 0.5))
        ts = np.array([0.5, 2.0, 4.0])
        us = integrate_riccati(h, ts)
        Us = integrate_U(h, ts)
        a, b = Us[:, 0, 0], Us[:, 0, 1]
        np.testing.assert_allclose(Us[:, 1, 0], np.conj(b), atol=1e-9)
        np.testing.assert_allclose(us[:, 0], b / np.conj(a), atol=1e-8)
        np.testing.assert_allclose(np.exp(us[:, 1]), np.conj(a), atol=1e-8)
        np.testing.assert_allclose(us[:, 2], np.conj(b) / np.conj(a), atol=1e-8)

    def test_factorised_matrix_cross_check(self):
        h = SolvableScenario.rabi(1.2, 1.0, 0.1).hamiltonian()
        us = integrate_riccati(h, np.array([1.0, 5.0]), cross_check=1e-7)
        for u, ref in zip(us, integrate_U(h, np.array([1.0, 5.0]))):
            assert np.max(np.abs(factorised_matrix(*u) - ref)) <= 1e-7

    def test_u2_is_continuous_past_branch_cut(self):
        # arg(a*) winds through pi for a strongly detuned field
        h = Su11Hamiltonian.constant(3.0, 0.5)
        ts = np.linspace(0, 6, 121)
        u2 = integrate_riccati(h, ts)[:, 1]
        assert np.max(np.abs(np.diff(u2))) < 0.3
        assert np.max(np.abs(u2.imag)) > math.pi

    def test_rk4_path(self):
        sc = SolvableScenario.rabi(0.5, 1.0)
        u = integrate_riccati(sc.hamiltonian(), 3.0, IntegratorConfig(method="rk4_fixed", max_step=1e-3))
        assert u[0] == pytest.approx(1j * cf.eval_Y(cf.solve(sc), 3.0), abs=1e-9)


class TestBlowupDetector:
    def test_escape_time_reported(self):
        # dz/dt = z^2, z(0) = 1 escapes as 1/(1 - t)
        def escape(t, y):
            return oracle.BLOWUP - math.hypot(y[0], y[1])

        escape.terminal = True
        with pytest.raises(RiccatiBlowupError) as info:
            integrate_system(lambda t, z: z * z, np.array([1.0 + 0j]), 2.0, IntegratorConfig(), events=escape)
        assert info.value.escape_time == pytest.approx(1 - 1 / oracle.BLOWUP, abs=1e-6)

    def test_su11_riccati_stays_bounded(self):
        # |u1| = |b| / |a| < 1 for every su(1,1) field
        h = Su11Hamiltonian(Sinusoid(0.0, 2.0, 1.0), Sinusoid(2.0, 1.0, 3.0), Constant(0.0))
        u = integrate_riccati(h, np.linspace(0, 20, 41))
        assert np.max(np.abs(u[:, 0])) < 1 + 1e-9
