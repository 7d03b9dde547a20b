"""Exact evolution operators for the solvable su(1,1) class.

Everything below is a function of the accumulated coupling
``chi(t) = int_0^t |omega|``; the reduced Riccati problem reads
``dY/dchi = 1 - 2 i nu Y - Y**2`` with ``Y(0) = 0``.

Per regime we evaluate, besides ``Y`` itself,

* ``gap = 1 - |Y|**2`` in a cancellation-free form,
* the continuous phase ``phi_nu`` of ``Y``,
* the signed amplitude ``m = Y exp(-i phi_nu)`` (real; negative on the
  half periods of the oscillatory regime where ``sin(k chi) < 0``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .coefficients import breakpoints, quad, quad_cumulative
from .core import SIGMA_Y, SIGMA_Z, SolvableScenario

RATIONAL_BAND = 1e-6


class Regime(enum.Enum):
    TRIGONOMETRIC = "trigonometric"
    HYPERBOLIC = "hyperbolic"
    RATIONAL = "rational"
    ZERO = "zero"

    @property
    def oscillatory(self) -> bool:
        return self is Regime.TRIGONOMETRIC


def classify(nu: float, band: float = RATIONAL_BAND) -> Regime:
    if nu < 0:
        raise ValueError(f"nu must be non-negative, got {nu}")
    if nu == 0:
        return Regime.ZERO
    if abs(nu - 1.0) <= band:
        return Regime.RATIONAL
    return Regime.TRIGONOMETRIC if nu > 1 else Regime.HYPERBOLIC


def _rate(nu: float) -> float:
    # sqrt(|nu^2 - 1|) without cancellation near nu = 1
    return math.sqrt(abs((nu - 1.0) * (nu + 1.0)))


def y_of_chi(nu: float, chi, regime: Regime | None = None):
    """``Y_nu`` as a function of ``chi`` (pole-free in every regime)."""
    regime = regime or classify(nu)
    chi = np.asarray(chi, dtype=float)
    if regime is Regime.ZERO:
        return np.tanh(chi) + 0j
    if regime is Regime.RATIONAL:
        return (chi - 1j * chi**2) / (chi**2 + 1)
    k = _rate(nu)
    if regime is Regime.TRIGONOMETRIC:
        s, c = np.sin(k * chi), np.cos(k * chi)
        return (k * s * c - 1j * nu * s**2) / (nu**2 - c**2)
    th = np.tanh(k * chi)
    return th * (k - 1j * nu * th) / (k**2 + nu**2 * th**2)


def gap_of_chi(nu: float, chi, regime: Regime | None = None):
    """``1 - |Y_nu|**2``, evaluated without subtracting nearly equal numbers."""
    regime = regime or classify(nu)
    chi = np.asarray(chi, dtype=float)
    if regime is Regime.ZERO:
        return 1.0 / np.cosh(chi) ** 2
    if regime is Regime.RATIONAL:
        return 1.0 / (1.0 + chi**2)
    k = _rate(nu)
    if regime is Regime.TRIGONOMETRIC:
        s = np.sin(k * chi)
        return k**2 / (k**2 + s**2)
    th = np.tanh(k * chi)
    return k**2 / np.cosh(k * chi) ** 2 / (k**2 + nu**2 * th**2)


def phase_of_chi(nu: float, chi, regime: Regime | None = None):
    """Continuous branch of ``-arctan(nu tan(k chi) / k)`` and its limits.

    In the oscillatory regime the branch is fixed by counting how many times
    ``k chi`` has passed ``pi/2 + j pi``; each passage lowers the phase by ``pi``.
    """
    regime = regime or classify(nu)
    chi = np.asarray(chi, dtype=float)
    if regime is Regime.ZERO:
        return np.zeros_like(chi)
    if regime is Regime.RATIONAL:
        return -np.arctan(chi)
    k = _rate(nu)
    if regime is Regime.HYPERBOLIC:
        return -np.arctan(nu * np.tanh(k * chi) / k)
    theta = k * chi
    crossings = np.floor(theta / np.pi + 0.5)
    reduced = theta - crossings * np.pi
    return -np.arctan2(nu * np.sin(reduced), k * np.cos(reduced)) - crossings * np.pi


def signed_modulus_of_chi(nu: float, chi, regime: Regime | None = None):
    """Real ``m`` with ``Y = m exp(i phi_nu)`` and ``m**2 = |Y|**2``."""
    regime = regime or classify(nu)
    chi = np.asarray(chi, dtype=float)
    if regime is Regime.ZERO:
        return np.tanh(chi)
    if regime is Regime.RATIONAL:
        return chi / np.sqrt(1.0 + chi**2)
    k = _rate(nu)
    if regime is Regime.TRIGONOMETRIC:
        s = np.sin(k * chi)
        return s / np.sqrt(k**2 + s**2)
    th = np.tanh(k * chi)
    return th / np.sqrt(k**2 + nu**2 * th**2)


def probability_of_chi(nu: float, chi, regime: Regime | None = None):
    """Transition probability ``|Y|**2 / (1 + |Y|**2)`` as a function of ``chi``."""
    m2 = signed_modulus_of_chi(nu, chi, regime) ** 2
    return m2 / (1.0 + m2)


def chi(scenario: SolvableScenario, t):
    """``int_0^t |omega|`` by adaptive quadrature (scalar or array ``t``)."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
    fn = scenario.omega_abs
    fn.check_domain(t, "omega_abs")
    return quad_cumulative(fn.value, t, points=breakpoints(fn))


@dataclass(frozen=True)
class RegimeSolution:
    nu: float
    regime: Regime
    chi_fn: Callable = field(repr=False, compare=False)

    def y(self, t):
        return y_of_chi(self.nu, self.chi_fn(t), self.regime)


def solve(scenario: SolvableScenario, band: float = RATIONAL_BAND) -> RegimeSolution:
    return RegimeSolution(scenario.nu, classify(scenario.nu, band), lambda t: chi(scenario, t))


def eval_Y(sol: RegimeSolution, t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
    return sol.y(t)


@dataclass(frozen=True)
class PhaseIntegrals:
    r: float
    s: float
    y: float
    phi_nu: float
    chi: float = 0.0
    big_omega_integral: float = 0.0


@dataclass(frozen=True)
class Propagator:
    """Caley-Klein pair; the matrix is ``[[a, b], [conj(b), conj(a)]]``.

    When built from the exact solution, ``log_scale`` (``r``) and ``gap``
    (``1 - |Y|**2``) are kept so the determinant can be evaluated as
    ``exp(2 r) * gap``: forming ``|a|**2 - |b|**2`` from the rounded entries
    loses about ``|a|**2 * 1e-16`` once the entries grow.
    """

    a: complex
    b: complex
    log_scale: float | None = None
    gap: float | None = None

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [np.conj(self.b), np.conj(self.a)]], dtype=complex)

    def det(self) -> float:
        if self.log_scale is not None and self.gap is not None:
            return math.exp(2 * self.log_scale) * self.gap
        return abs(self.a) ** 2 - abs(self.b) ** 2

    @classmethod
    def from_matrix(cls, u: np.ndarray) -> "Propagator":
        return cls(complex(u[0, 0]), complex(u[0, 1]))


def _check_t(t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")


def _integrals(scenario: SolvableScenario, t, band: float):
    """Vectorised core: returns chi, r, s, y, phi_nu arrays of the shape of ``t``."""
    _check_t(t)
    regime = classify(scenario.nu, band)
    nu = scenario.nu
    x = np.asarray(chi(scenario, t), dtype=float)
    re_int = quad_cumulative(lambda c: float(np.real(y_of_chi(nu, c, regime))), x)
    im_int = quad_cumulative(lambda c: float(np.imag(y_of_chi(nu, c, regime))), x)
    big_omega = scenario.big_omega
    omega_int = np.asarray(quad_cumulative(big_omega.value, t, points=breakpoints(big_omega)), dtype=float)
    phi_nu = phase_of_chi(nu, x, regime)
    r = np.asarray(re_int, dtype=float)
    s = omega_int + np.asarray(im_int, dtype=float)
    y = np.pi / 2 + 2 * nu * x - 2 * omega_int + phi_nu
    return regime, x, r, s, y, phi_nu, omega_int


def phase_integrals(scenario: SolvableScenario, t: float, band: float = RATIONAL_BAND) -> PhaseIntegrals:
    """``r``, ``s``, ``y`` and ``phi_nu`` at a single time."""
    _, x, r, s, y, phi_nu, omega_int = _integrals(scenario, float(t), band)
    return PhaseIntegrals(float(r), float(s), float(y), float(phi_nu), float(x), float(omega_int))


def _assemble(scenario, regime, x, r, s, y):
    m = signed_modulus_of_chi(scenario.nu, x, regime)
    gap = gap_of_chi(scenario.nu, x, regime)
    scale = np.exp(r)
    a = scale * np.exp(-1j * s)
    # phi0 enters through phi_omega(t) = phi0 + 2 nu chi - 2 int Omega
    b = m * scale * np.exp(1j * (s + y + scenario.phi0))
    return a, b, gap


def propagator(scenario: SolvableScenario, t: float, band: float = RATIONAL_BAND) -> Propagator:
    regime, x, r, s, y, _, _ = _integrals(scenario, float(t), band)
    a, b, gap = _assemble(scenario, regime, x, r, s, y)
    return Propagator(complex(a), complex(b), float(r), float(gap))


def propagators(scenario: SolvableScenario, t, band: float = RATIONAL_BAND) -> list[Propagator]:
    """Propagators on a whole grid of times (one quadrature sweep)."""
    t = np.asarray(t, dtype=float).ravel()
    regime, x, r, s, y, _, _ = _integrals(scenario, t, band)
    a, b, gap = _assemble(scenario, regime, x, r, s, y)
    return [Propagator(complex(ai), complex(bi), float(ri), float(gi)) for ai, bi, ri, gi in zip(a, b, r, gap)]


def evolution_matrix(scenario: SolvableScenario, t: float) -> np.ndarray:
    return propagator(scenario, t).matrix()


def transition_probability(scenario: SolvableScenario, t, band: float = RATIONAL_BAND):
    """Probability of ``|->`` at ``t`` starting from ``|+>`` under the normalised dynamics."""
    _check_t(t)
    return probability_of_chi(scenario.nu, chi(scenario, t), classify(scenario.nu, band))


def effective_hamiltonian(scenario: SolvableScenario, t: float) -> np.ndarray:
    """Generator in the frame co-rotating with ``phi_omega``.

    ``(Omega + dphi/2) sigma_z - i |omega| sigma_y``, which equals
    ``|omega| (nu sigma_z - i sigma_y)`` on the solvable class.
    """
    mag = float(scenario.omega_abs.value(t))
    detuning = float(scenario.big_omega.value(t)) + 0.5 * float(scenario.phase_rate.value(t))
    return detuning * SIGMA_Z - 1j * mag * SIGMA_Y


def frame_rotation(scenario: SolvableScenario, t: float) -> np.ndarray:
    """``exp(i phi_omega(t) sigma_z / 2)``."""
    phi = float(scenario.phi_omega.value(t))
    return np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)])
