"""Trace-normalised evolution of density matrices under non-Hermitian Hamiltonians.

``rho(t) = U rho0 U^dagger / Tr(U rho0 U^dagger)``, equivalently the
nonlinear equation ``drho/dt = -i[H0, rho] - {Gamma, rho} + 2 rho Tr(rho Gamma)``
with ``H = H0 - i Gamma``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from . import closed_form, oracle
from .core import Su11Hamiltonian, SolvableScenario, hamiltonian_matrix, scenario_from_hamiltonian, solvable_nu

UNDERFLOW = 1e-300


class InvalidDensityMatrix(ValueError):
    pass


class HermitianSplit(NamedTuple):
    H0: np.ndarray
    Gamma: np.ndarray


def validate_density(rho, tol: float = 1e-12) -> np.ndarray:
    """Return ``rho`` as a complex 2x2 array or raise with the first violated property."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidDensityMatrix(f"expected a 2x2 matrix, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        raise InvalidDensityMatrix(f"not Hermitian: max |rho - rho^dagger| = {herm:.3e} > {tol:g}")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise InvalidDensityMatrix(f"trace is {tr.real:.15g}{tr.imag:+.3g}j, expected 1 within {tol:g}")
    low = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if low < -tol:
        raise InvalidDensityMatrix(f"not positive semidefinite: smallest eigenvalue {low:.3e}")
    return rho


def pure(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


PLUS = pure([1, 0])
MINUS = pure([0, 1])


def purity(rho) -> float:
    return float(np.real(np.trace(rho @ rho)))


def split(H) -> HermitianSplit:
    H = np.asarray(H, dtype=complex)
    return HermitianSplit(0.5 * (H + H.conj().T), 0.5j * (H - H.conj().T))


def nonlinear_rhs(H, rho) -> np.ndarray:
    H0, gamma = split(H)
    rho = np.asarray(rho, dtype=complex)
    return (
        -1j * (H0 @ rho - rho @ H0)
        - (gamma @ rho + rho @ gamma)
        + 2 * rho * np.trace(rho @ gamma)
    )


def normalized_map(U, rho) -> np.ndarray:
    """``U rho U^dagger / Tr(...)``, re-symmetrised."""
    U = np.asarray(U, dtype=complex)
    out = U @ rho @ U.conj().T
    tr = np.real(np.trace(out))
    if tr <= UNDERFLOW:
        raise FloatingPointError(f"Tr(U rho U^dagger) = {tr:.3e} underflowed")
    out = out / tr
    return 0.5 * (out + out.conj().T)


def _propagators(model, t):
    """Evolution matrices at each ``t`` (closed form when the model is solvable)."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if isinstance(model, Su11Hamiltonian):
        grid = np.linspace(0.0, float(ts.max()), 1001)
        nu = solvable_nu(model, grid)
        if nu is None:
            return oracle.integrate_U(model, ts).reshape(-1, 2, 2)
        model = scenario_from_hamiltonian(model, nu)
    if isinstance(model, SolvableScenario):
        return np.array([p.matrix() for p in closed_form.propagators(model, ts)])
    H = np.asarray(model, dtype=complex)
    if H.shape != (2, 2):
        raise TypeError("model must be a Su11Hamiltonian, a SolvableScenario or a constant 2x2 matrix")
    return np.array([expm(-1j * H * tt) for tt in ts])


def evolve_density(model, rho0, t):
    """Normalised density matrix at ``t`` (scalar) or at each entry of ``t``.

    ``model`` is a :class:`SolvableScenario`, a :class:`Su11Hamiltonian`
    (closed form if it satisfies the solvability condition on ``[0, t]``,
    direct integration otherwise) or a constant 2x2 matrix.
    """
    rho0 = validate_density(rho0)
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
    out = np.array([normalized_map(U, rho0) for U in _propagators(model, t)])
    return out[0] if np.ndim(t) == 0 else out


def integrate_nonlinear(H_of_t, rho0, t, rel_tol: float = 1e-11, abs_tol: float = 1e-13, max_step: float = np.inf):
    """Integrate the nonlinear equation directly (test oracle for :func:`evolve_density`)."""
    rho0 = validate_density(rho0)
    if not callable(H_of_t):
        H_const = np.asarray(H_of_t, dtype=complex)
        H_of_t = lambda _t: H_const  # noqa: E731

    def f(tt, y):
        rho = (y[:4] + 1j * y[4:]).reshape(2, 2)
        rho = 0.5 * (rho + rho.conj().T)
        d = nonlinear_rhs(H_of_t(tt), rho).ravel()
        return np.concatenate([d.real, d.imag])

    ts = np.atleast_1d(np.asarray(t, dtype=float))
    y0 = np.concatenate([rho0.ravel().real, rho0.ravel().imag])
    sol = solve_ivp(f, (0.0, float(ts.max())), y0, method="RK45", t_eval=ts, rtol=rel_tol, atol=abs_tol,
                    max_step=max_step)
    if sol.status != 0:
        raise oracle.IntegrationError(sol.message, float(sol.t[-1]) if sol.t.size else 0.0)
    out = np.array([(sol.y[:4, j] + 1j * sol.y[4:, j]).reshape(2, 2) for j in range(ts.size)])
    out = 0.5 * (out + np.conj(np.swapaxes(out, 1, 2)))
    return out[0] if np.ndim(t) == 0 else out


def semigroup_check(H_const, rho0, s: float, t: float) -> float:
    """``max |phi_s(phi_t(rho0)) - phi_{s+t}(rho0)|`` for the normalised map of a constant ``H``."""
    H = np.asarray(H_const, dtype=complex)
    rho0 = validate_density(rho0)
    U = lambda tau: expm(-1j * H * tau)  # noqa: E731
    composed = normalized_map(U(s), normalized_map(U(t), rho0))
    direct = normalized_map(U(s + t), rho0)
    return float(np.max(np.abs(composed - direct)))


def su11_split(h: Su11Hamiltonian, t: float) -> HermitianSplit:
    return split(hamiltonian_matrix(h, t))
