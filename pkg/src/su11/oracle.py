"""Direct numerical integration of ``i dU/dt = H(t) U`` and of the Riccati system.

Used as the independent reference for every closed-form result.  Complex
states are integrated as real vectors of twice the length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.integrate import solve_ivp

from .core import Su11Hamiltonian, hamiltonian_matrix

BLOWUP = 1e6


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t_reached: float):
        super().__init__(f"{message} (reached t = {t_reached:.6g})")
        self.t_reached = t_reached


class RiccatiBlowupError(IntegrationError):
    def __init__(self, escape_time: float):
        super().__init__(f"|u1| exceeded {BLOWUP:g}", escape_time)
        self.escape_time = escape_time


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float | None = None  # None -> 0.01 / (largest rate on [0, t])
    method: Literal["rk4_fixed", "rk45_adaptive"] = "rk45_adaptive"
    max_steps: int = 5_000_000

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_step is not None and self.max_step <= 0:
            raise ValueError("max_step must be positive")
        if self.method not in ("rk4_fixed", "rk45_adaptive"):
            raise ValueError(f"unknown method {self.method!r}")


DEFAULT = IntegratorConfig()


def _to_real(z: np.ndarray) -> np.ndarray:
    z = np.ravel(z)
    return np.concatenate([z.real, z.imag])


def _to_complex(y: np.ndarray) -> np.ndarray:
    n = y.shape[0] // 2
    return y[:n] + 1j * y[n:]


def _default_step(rate_fn: Callable[[np.ndarray], np.ndarray], t_end: float) -> float:
    grid = np.linspace(0.0, t_end, 1001)
    peak = float(np.max(rate_fn(grid))) if t_end > 0 else 0.0
    return 0.01 / peak if peak > 0 else max(t_end, 1.0) / 100


def _h_rate(h: Su11Hamiltonian):
    def rate(grid):
        return np.maximum(np.abs(h.big_omega.value(grid)), np.abs(h.omega_abs.value(grid)))

    return rate


def _rk4(f, y0: np.ndarray, t_end: float, h: float, t_eval: np.ndarray) -> np.ndarray:
    """Classical RK4 with a fixed step, landing exactly on every ``t_eval`` point."""
    out = np.empty((y0.size, t_eval.size))
    y, t = y0.copy(), 0.0
    for j, target in enumerate(t_eval):
        n = max(1, math.ceil((target - t) / h - 1e-12)) if target > t else 0
        dt = (target - t) / n if n else 0.0
        for _ in range(n):
            k1 = f(t, y)
            k2 = f(t + dt / 2, y + dt / 2 * k1)
            k3 = f(t + dt / 2, y + dt / 2 * k2)
            k4 = f(t + dt, y + dt * k3)
            y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += dt
        t = target
        out[:, j] = y
    return out


def integrate_system(f_complex, z0: np.ndarray, t, cfg: IntegratorConfig, rate=None, events=None):
    """Integrate ``dz/dt = f(t, z)`` for complex ``z`` from 0 to each ``t``.

    Returns an array of shape ``z0.shape`` (scalar ``t``) or ``(len(t),) + z0.shape``.
    """
    scalar = np.ndim(t) == 0
    t_eval = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_eval < 0):
        raise ValueError("t must be non-negative")
    order = np.argsort(t_eval, kind="stable")
    t_sorted = t_eval[order]
    t_end = float(t_sorted[-1])
    shape = np.shape(z0)

    def f(tt, y):
        return _to_real(f_complex(tt, _to_complex(y).reshape(shape)))

    y0 = _to_real(np.asarray(z0, dtype=complex))
    step = cfg.max_step or (_default_step(rate, t_end) if rate is not None else np.inf)
    if t_end == 0.0:
        ys = np.repeat(y0[:, None], t_eval.size, axis=1)
    elif cfg.method == "rk4_fixed":
        if not math.isfinite(step):
            raise ValueError("rk4_fixed needs a finite max_step")
        if t_end / step > cfg.max_steps:
            raise IntegrationError("step budget exhausted before integration started", 0.0)
        ys = _rk4(f, y0, t_end, step, t_sorted)
    else:
        sol = solve_ivp(
            f, (0.0, t_end), y0, method="RK45", t_eval=t_sorted, rtol=cfg.rel_tol,
            atol=cfg.abs_tol, max_step=step, events=events,
        )
        if sol.status == 1:
            escape = float(sol.t_events[0][0])
            raise RiccatiBlowupError(escape)
        if sol.status != 0:
            reached = float(sol.t[-1]) if sol.t.size else 0.0
            raise IntegrationError(sol.message, reached)
        ys = sol.y
    out = np.empty((t_eval.size,) + shape, dtype=complex)
    out[order] = np.stack([_to_complex(ys[:, j]).reshape(shape) for j in range(t_eval.size)])
    return out[0] if scalar else out


def integrate_U(h: Su11Hamiltonian | Callable[[float], np.ndarray], t, cfg: IntegratorConfig = DEFAULT,
                rate=None):
    """Solve ``i dU/dt = H(t) U`` with ``U(0) = 1``.

    ``h`` may also be a plain callable returning the 2x2 matrix; then pass a
    ``rate`` callable (vectorised magnitude bound) if the default step cap
    is wanted.
    """
    if isinstance(h, Su11Hamiltonian):
        matrix = lambda tt: hamiltonian_matrix(h, tt)  # noqa: E731
        rate = rate or _h_rate(h)
    else:
        matrix = h
    return integrate_system(lambda tt, u: -1j * matrix(tt) @ u, np.eye(2, dtype=complex), t, cfg, rate)


def factorised_matrix(u1: complex, u2: complex, u3: complex) -> np.ndarray:
    """``exp(u1 s+) exp(-u2 sz) exp(u3 s-)``."""
    e = np.exp(u2)
    return np.array([[np.exp(-u2) + u1 * e * u3, u1 * e], [e * u3, e]], dtype=complex)


def integrate_riccati(h: Su11Hamiltonian, t, cfg: IntegratorConfig = DEFAULT, cross_check: float | None = None):
    """Integrate the ``(u1, u2, u3)`` system from zero initial data.

    ``u2`` is integrated rather than read off as ``log(a*)``, which keeps
    it on a continuous branch.  If ``cross_check`` is given, the matrix
    rebuilt from the ``u``'s must match :func:`integrate_U` within that
    tolerance, else ``ArithmeticError``.
    """

    def rhs(tt, u):
        big_omega, omega = h.parts(tt)
        w_star = np.conj(omega)
        u1, u2, _ = u
        return np.array([
            1j * omega - 2j * big_omega * u1 + 1j * w_star * u1**2,
            1j * big_omega - 1j * w_star * u1,
            -1j * w_star * np.exp(-2 * u2),
        ])

    def escape(tt, y):
        return BLOWUP - math.hypot(y[0], y[3])

    escape.terminal = True
    if cfg.method == "rk4_fixed":
        out = integrate_system(rhs, np.zeros(3, dtype=complex), t, cfg, _h_rate(h))
        us = np.atleast_2d(out)
        bad = np.abs(us[:, 0]) > BLOWUP
        if np.any(bad):
            raise RiccatiBlowupError(float(np.atleast_1d(t)[np.argmax(bad)]))
    else:
        out = integrate_system(rhs, np.zeros(3, dtype=complex), t, cfg, _h_rate(h), events=escape)
    if cross_check is not None:
        ref = integrate_U(h, t, cfg)
        us = np.atleast_2d(out)
        refs = ref.reshape(-1, 2, 2)
        for u, r in zip(us, refs):
            dev = np.max(np.abs(factorised_matrix(*u) - r))
            if dev > cross_check * max(1.0, np.max(np.abs(r))):
                raise ArithmeticError(f"Riccati reconstruction deviates from direct integration by {dev:.3e}")
    return out
