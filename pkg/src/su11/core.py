"""su(1,1) Hamiltonians in the sigma_z basis and their algebraic predicates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coefficients import (
    Antiderivative,
    CoefficientFn,
    Constant,
    Derivative,
    Scaled,
    Sum,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class SingularMetricError(ValueError):
    pass


class UnsupportedSignError(ValueError):
    pass


class SpectrumKind(enum.Enum):
    REAL = "real"
    DEGENERATE = "degenerate"
    COMPLEX_PAIR = "complex-pair"


def _evaluate(fn: CoefficientFn, t, name: str):
    fn.check_domain(t, name)
    return fn.value(t)


def _magnitude(fn: CoefficientFn, t, name: str = "omega_abs"):
    value = _evaluate(fn, t, name)
    if np.any(np.asarray(value) < 0):
        raise ValueError(f"{name} must be non-negative, got min {np.min(value):g}")
    return value


def _check_magnitude_fn(fn: CoefficientFn, name: str) -> None:
    # only the families where negativity is decidable without a domain
    from .coefficients import Sinusoid

    if isinstance(fn, Constant) and fn.c < 0:
        raise ValueError(f"{name} must be non-negative, got constant {fn.c}")
    if isinstance(fn, Sinusoid) and fn.offset + abs(fn.amplitude) < 0:
        raise ValueError(f"{name} is negative everywhere")


@dataclass(frozen=True)
class Su11Hamiltonian:
    """``H(t) = [[Omega, -omega], [omega*, -Omega]]`` with ``omega = |omega| exp(i phi_omega)``."""

    big_omega: CoefficientFn
    omega_abs: CoefficientFn
    phi_omega: CoefficientFn

    def __post_init__(self):
        _check_magnitude_fn(self.omega_abs, "omega_abs")

    def omega(self, t):
        return _magnitude(self.omega_abs, t) * np.exp(1j * _evaluate(self.phi_omega, t, "phi_omega"))

    def matrix(self, t: float) -> np.ndarray:
        return hamiltonian_matrix(self, t)

    def parts(self, t):
        """Return ``(Omega(t), omega(t))``."""
        return _evaluate(self.big_omega, t, "big_omega"), self.omega(t)

    @classmethod
    def constant(cls, big_omega: float, omega_abs: float, phi_omega: float = 0.0) -> "Su11Hamiltonian":
        return cls(Constant(big_omega), Constant(omega_abs), Constant(phi_omega))

    def to_json(self) -> dict:
        return {
            "big_omega": self.big_omega.to_json(),
            "omega_abs": self.omega_abs.to_json(),
            "phi_omega": self.phi_omega.to_json(),
        }


@dataclass(frozen=True)
class SolvableScenario:
    """A Hamiltonian built to satisfy ``2 Omega + dphi_omega/dt = 2 nu |omega|``.

    ``phase_rate`` is ``dphi_omega/dt``; ``Omega`` and ``phi_omega`` are derived
    from it, so the condition holds by construction.
    """

    nu: float
    omega_abs: CoefficientFn
    phase_rate: CoefficientFn
    phi0: float = 0.0

    def __post_init__(self):
        if not (self.nu >= 0 and math.isfinite(self.nu)):
            raise ValueError(f"nu must be a finite non-negative number, got {self.nu}")
        _check_magnitude_fn(self.omega_abs, "omega_abs")

    @property
    def big_omega(self) -> CoefficientFn:
        return Sum((Scaled(self.nu, self.omega_abs), Scaled(-0.5, self.phase_rate)))

    @property
    def phi_omega(self) -> CoefficientFn:
        return Antiderivative(self.phase_rate, self.phi0)

    def hamiltonian(self) -> Su11Hamiltonian:
        return Su11Hamiltonian(self.big_omega, self.omega_abs, self.phi_omega)

    @property
    def is_constant(self) -> bool:
        return self.omega_abs.is_constant and self.phase_rate.is_constant

    def condition_residual(self, t):
        """``2 Omega + dphi/dt - 2 nu |omega|`` evaluated pointwise."""
        h = self.hamiltonian()
        return 2 * h.big_omega.value(t) + h.phi_omega.derivative(t) - 2 * self.nu * h.omega_abs.value(t)

    @classmethod
    def rabi(cls, nu: float, omega_abs: float, phase_rate: float = 0.0, phi0: float = 0.0) -> "SolvableScenario":
        """Constant-coefficient scenario."""
        return cls(nu, Constant(omega_abs), Constant(phase_rate), phi0)

    @classmethod
    def from_detuning(cls, nu: float, big_omega: float, phase_rate: float, phi0: float = 0.0) -> "SolvableScenario":
        """Constant scenario with prescribed ``Omega``; ``|omega| = (2 Omega + c) / (2 nu)``."""
        if nu <= 0:
            raise ValueError("nu must be positive to fix |omega| from Omega")
        omega_abs = (2 * big_omega + phase_rate) / (2 * nu)
        if omega_abs < 0:
            raise ValueError(f"2*Omega + phase_rate must be >= 0, got {2 * big_omega + phase_rate}")
        return cls.rabi(nu, omega_abs, phase_rate, phi0)

    def to_json(self) -> dict:
        return {
            "nu": self.nu,
            "omega_abs": self.omega_abs.to_json(),
            "phase_rate": self.phase_rate.to_json(),
            "phi0": self.phi0,
        }


def hamiltonian_matrix(h: Su11Hamiltonian, t: float) -> np.ndarray:
    big_omega, omega = h.parts(t)
    return np.array([[big_omega, -omega], [np.conj(omega), -big_omega]], dtype=complex)


def is_pseudo_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    """True iff ``M^dagger == sigma_z M sigma_z`` entrywise within ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(m, dtype=complex)
    return bool(np.max(np.abs(m.conj().T - SIGMA_Z @ m @ SIGMA_Z)) <= tol)


def spectrum(h: Su11Hamiltonian, t: float) -> tuple[complex, complex, SpectrumKind]:
    big_omega, omega = h.parts(t)
    disc = big_omega**2 - abs(omega) ** 2
    if disc > 0:
        kind = SpectrumKind.REAL
    elif disc == 0:
        kind = SpectrumKind.DEGENERATE
    else:
        kind = SpectrumKind.COMPLEX_PAIR
    root = complex(np.sqrt(complex(disc)))
    return root, -root, kind


def quasi_hermitian_metric(h: Su11Hamiltonian, t: float, tol: float = 1e-12) -> tuple[np.ndarray, bool]:
    """Return ``(eta_plus, positive)``; ``H^dagger eta = eta H`` is asserted on the way out."""
    big_omega, omega = h.parts(t)
    if big_omega == 0:
        raise SingularMetricError("Omega(t) = 0: the metric eta_+ is undefined")
    eta = np.array([[1, -omega / big_omega], [-np.conj(omega) / big_omega, 1]], dtype=complex)
    m = hamiltonian_matrix(h, t)
    defect = np.max(np.abs(m.conj().T @ eta - eta @ m))
    scale = max(1.0, abs(big_omega), abs(omega))
    if defect > tol * scale:
        raise ArithmeticError(f"metric relation violated by {defect:.3e}")
    return eta, bool(abs(omega) ** 2 < big_omega**2)


def reality_threshold(scenario: SolvableScenario) -> float:
    """Value of ``nu`` above which the constant spectrum is real.

    Holding ``Omega_0`` and the phase rate ``c_0`` fixed, the condition
    gives ``|omega_0| = (2 Omega_0 + c_0) / (2 nu)`` and the spectrum is real
    for ``nu > 1 + c_0 / (2 Omega_0)``.
    """
    if not scenario.is_constant:
        raise ValueError("reality_threshold needs constant coefficients")
    omega0 = float(scenario.omega_abs.value(0.0))
    c0 = float(scenario.phase_rate.value(0.0))
    big_omega0 = scenario.nu * omega0 - 0.5 * c0
    if omega0 <= 0:
        raise ValueError("|omega_0| must be positive")
    if big_omega0 <= 0:
        raise UnsupportedSignError(f"Omega_0 = {big_omega0:g} must be positive")
    return 1.0 + c0 / (2.0 * big_omega0)


def is_closed_system(h: Su11Hamiltonian, grid: Sequence[float], tol: float = 1e-12) -> bool:
    """Whether the metric eta_+ is positive and time independent on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be non-empty")
    big_omega = np.asarray(h.big_omega.value(grid), dtype=float) * np.ones_like(grid)
    mag = np.asarray(_magnitude(h.omega_abs, grid), dtype=float) * np.ones_like(grid)
    phi = np.asarray(h.phi_omega.value(grid), dtype=float) * np.ones_like(grid)
    if np.all(mag == 0):
        return True
    if np.any(mag == 0):
        return False
    if np.ptp(phi) > tol * max(1.0, np.max(np.abs(phi))):
        return False
    ratio = big_omega / mag
    if np.ptp(ratio) > tol * max(1.0, np.max(np.abs(ratio))):
        return False
    return bool(np.all(mag**2 < big_omega**2))


def solvable_nu(h: Su11Hamiltonian, grid: Sequence[float], tol: float = 1e-10) -> float | None:
    """Return ``nu`` if ``2 Omega + dphi/dt = 2 nu |omega|`` holds on ``grid``, else ``None``.

    Points with ``|omega| = 0`` only require ``2 Omega + dphi/dt = 0``.
    """
    grid = np.asarray(grid, dtype=float)
    lhs = 2 * np.asarray(h.big_omega.value(grid)) + np.asarray(h.phi_omega.derivative(grid))
    lhs = lhs * np.ones_like(grid)
    mag = np.asarray(_magnitude(h.omega_abs, grid)) * np.ones_like(grid)
    coupled = mag > 0
    if not np.any(coupled):
        return None
    nu = float(np.median(lhs[coupled] / (2 * mag[coupled])))
    if nu < -tol:
        return None
    nu = max(nu, 0.0)
    if np.max(np.abs(lhs - 2 * nu * mag)) > tol * max(1.0, np.max(np.abs(lhs))):
        return None
    return nu


def scenario_from_hamiltonian(h: Su11Hamiltonian, nu: float) -> SolvableScenario:
    """Re-express a Hamiltonian known to satisfy the condition for ``nu``."""
    return SolvableScenario(nu, h.omega_abs, Derivative(h.phi_omega), float(h.phi_omega.value(0.0)))
