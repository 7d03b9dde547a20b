"""Two counter-propagating modes coupled along ``z``.

``dA/dz = k exp(-i Delta z) B``, ``dB/dz = conj(k) exp(i Delta z) A``.  With
``A~ = A exp(i Delta z / 2)`` and ``B~ = B exp(-i Delta z / 2)`` this becomes
``i dV/dz = H(z) V`` for ``V = (A~, B~)`` and
``H(z) = [[-Delta/2, i k], [i conj(k), Delta/2]]``.

In the order ``(B~, A~)`` the same generator reads ``Omega = Delta/2``,
``|omega| = |k|``, ``phi_omega = -phi_k - pi/2``, and the solvability
condition becomes ``2 nu |k| + dphi_k/dz = Delta`` with ``nu >= 0``.  The
solver works in that order and swaps back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import closed_form, oracle
from .coefficients import Antiderivative, CoefficientFn, Constant, Derivative, Scaled, Sum
from .core import SIGMA_X, Su11Hamiltonian, SolvableScenario

DETECTOR_POINTS = 1001
DETECTOR_TOL = 1e-10


@dataclass(frozen=True)
class CoupledModeProblem:
    delta: float
    k_abs: CoefficientFn
    phi_k: CoefficientFn
    A0: complex = 1.0
    B0: complex = 0.0

    def k(self, z):
        return self.k_abs.value(z) * np.exp(1j * self.phi_k.value(z))

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "k_abs": self.k_abs.to_json(),
            "phi_k": self.phi_k.to_json(),
            "A0": [complex(self.A0).real, complex(self.A0).imag],
            "B0": [complex(self.B0).real, complex(self.B0).imag],
        }


def solvable_profile(nu: float, k_abs: CoefficientFn, delta: float, phi_k0: float = 0.0, **amplitudes):
    """Problem with ``phi_k(z) = phi_k0 + Delta z - 2 nu int_0^z |k|``, solvable by construction."""
    rate = Sum((Constant(delta), Scaled(-2.0 * nu, k_abs)))
    return CoupledModeProblem(delta, k_abs, Antiderivative(rate, phi_k0), **amplitudes)


def hamiltonian_z(problem: CoupledModeProblem, z: float) -> np.ndarray:
    k = complex(problem.k(z))
    d = problem.delta
    return np.array([[-d / 2, 1j * k], [1j * np.conj(k), d / 2]], dtype=complex)


def to_su11(problem: CoupledModeProblem) -> Su11Hamiltonian:
    """The generator in the swapped order ``(B~, A~)`` as a canonical su(1,1) Hamiltonian."""
    phi = Sum((Scaled(-1.0, problem.phi_k), Constant(-np.pi / 2)))
    return Su11Hamiltonian(Constant(problem.delta / 2), problem.k_abs, phi)


def to_tilde(problem: CoupledModeProblem, z, A, B):
    phase = np.exp(0.5j * problem.delta * np.asarray(z, dtype=float))
    return A * phase, B / phase


def from_tilde(problem: CoupledModeProblem, z, At, Bt):
    phase = np.exp(0.5j * problem.delta * np.asarray(z, dtype=float))
    return At / phase, Bt * phase


def detect_nu(problem: CoupledModeProblem, z_max: float, tol: float = DETECTOR_TOL,
              points: int = DETECTOR_POINTS) -> float | None:
    """``nu`` with ``2 nu |k| + dphi_k/dz = Delta`` on a grid over ``[0, z_max]``, or ``None``."""
    grid = np.linspace(0.0, z_max, points)
    mag = np.asarray(problem.k_abs.value(grid), dtype=float) * np.ones_like(grid)
    rate = np.asarray(problem.phi_k.derivative(grid), dtype=float) * np.ones_like(grid)
    if np.any(mag < 0):
        raise ValueError("k_abs must be non-negative")
    coupled = mag > 0
    if not np.any(coupled):
        return None
    nu = float(np.median((problem.delta - rate[coupled]) / (2 * mag[coupled])))
    if nu < -tol:
        return None
    nu = max(nu, 0.0)
    resid = np.max(np.abs(2 * nu * mag + rate - problem.delta))
    if resid > tol * max(1.0, abs(problem.delta), float(np.max(np.abs(rate)))):
        return None
    return nu


def to_scenario(problem: CoupledModeProblem, nu: float) -> SolvableScenario:
    phi0 = -float(problem.phi_k.value(0.0)) - np.pi / 2
    return SolvableScenario(nu, problem.k_abs, Scaled(-1.0, Derivative(problem.phi_k)), phi0)


def transfer_matrices(problem: CoupledModeProblem, z, nu: float | None = None,
                      cfg: oracle.IntegratorConfig = oracle.DEFAULT) -> np.ndarray:
    """``U(z)`` acting on ``(A~, B~)``; closed form when ``nu`` is given."""
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    if nu is not None:
        swapped = np.array([p.matrix() for p in closed_form.propagators(to_scenario(problem, nu), zs)])
    else:
        swapped = oracle.integrate_U(to_su11(problem), zs, cfg).reshape(-1, 2, 2)
    return SIGMA_X @ swapped @ SIGMA_X


def propagate_modes(problem: CoupledModeProblem, z, use_closed_form: bool | None = None):
    """Amplitudes ``(A(z), B(z))``; arrays when ``z`` is an array."""
    if np.any(np.asarray(z) < 0):
        raise ValueError("z must be non-negative")
    z_max = float(np.max(z))
    nu = detect_nu(problem, z_max) if z_max > 0 else None
    if use_closed_form is False:
        nu = None
    elif use_closed_form and nu is None:
        raise ValueError("problem does not satisfy the solvability condition")
    U = transfer_matrices(problem, z, nu)
    v0 = np.array(to_tilde(problem, 0.0, complex(problem.A0), complex(problem.B0)))
    v = U @ v0
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    A, B = from_tilde(problem, zs, v[:, 0], v[:, 1])
    if np.ndim(z) == 0:
        return complex(A[0]), complex(B[0])
    return A, B


def integrate_modes(problem: CoupledModeProblem, z, rel_tol: float = 1e-12, abs_tol: float = 1e-14):
    """Direct integration of the original coupled equations (reference path)."""
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    d = problem.delta

    def f(zz, y):
        A, B = y[0] + 1j * y[2], y[1] + 1j * y[3]
        k = complex(problem.k(zz))
        dA = k * np.exp(-1j * d * zz) * B
        dB = np.conj(k) * np.exp(1j * d * zz) * A
        return [dA.real, dB.real, dA.imag, dB.imag]

    A0, B0 = complex(problem.A0), complex(problem.B0)
    grid = np.linspace(0, zs.max(), 1001)
    peak = max(float(np.max(problem.k_abs.value(grid))), abs(d), 1e-300)
    sol = solve_ivp(f, (0.0, float(zs.max())), [A0.real, B0.real, A0.imag, B0.imag], method="DOP853",
                    t_eval=zs, rtol=rel_tol, atol=abs_tol, max_step=0.05 / peak)
    if sol.status != 0:
        raise oracle.IntegrationError(sol.message, float(sol.t[-1]) if sol.t.size else 0.0)
    A = sol.y[0] + 1j * sol.y[2]
    B = sol.y[1] + 1j * sol.y[3]
    if np.ndim(z) == 0:
        return complex(A[0]), complex(B[0])
    return A, B


def flux(A, B):
    return np.abs(A) ** 2 - np.abs(B) ** 2
