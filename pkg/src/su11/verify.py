"""Closed form versus numerical reference, across a grid of ``nu``."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import closed_form as cf
from . import oracle
from .coefficients import Sinusoid
from .core import SolvableScenario

DEFAULT_NU_GRID = (0.0, 0.5, 1.0, 1.01, 1.2, 2.0, 5.0)

ORACLE_TOL = 1e-8
DET_TOL = 1e-10
GROWTH_IDENTITY_TOL = 1e-9
RICCATI_TOL = 1e-6
CHANGE_OF_VARIABLE_TOL = 1e-7


@dataclass(frozen=True)
class Check:
    name: str
    nu: float
    deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.deviation) and self.deviation <= self.tol)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<28} nu={self.nu:<6g} max_dev={self.deviation:.3e}  tol={self.tol:.1e}"


def oracle_tolerance() -> float:
    """``SU11_TOL`` overrides the closed-form/oracle agreement threshold."""
    raw = os.environ.get("SU11_TOL")
    return float(raw) if raw else ORACLE_TOL


def scenarios_for(nu: float) -> dict[str, SolvableScenario]:
    return {
        "const": SolvableScenario.rabi(nu, 1.0, 0.0),
        "t-dep": SolvableScenario(nu, Sinusoid(1.0, 0.5, 1.0, 0.0), Sinusoid(0.0, 0.3, 1.0, np.pi / 2)),
    }


def oracle_deviation(scenario: SolvableScenario, ts) -> float:
    closed = np.array([p.matrix() for p in cf.propagators(scenario, ts)])
    ref = oracle.integrate_U(scenario.hamiltonian(), ts)
    return float(np.max(np.abs(closed - ref)))


def det_deviation(scenario: SolvableScenario, ts) -> float:
    return float(max(abs(p.det() - 1.0) for p in cf.propagators(scenario, ts)))


def growth_identity_deviation(scenario: SolvableScenario, ts) -> float:
    """Quadrature ``r`` against ``-log(1 - |Y|**2) / 2``."""
    worst = 0.0
    for t in ts:
        pi = cf.phase_integrals(scenario, t)
        gap = cf.gap_of_chi(scenario.nu, pi.chi)
        worst = max(worst, abs(np.exp(2 * pi.r) * gap - 1.0), abs(pi.r + 0.5 * np.log(gap)))
    return worst


def riccati_residual(scenario: SolvableScenario, ts, rel_step: float = 1e-5) -> float:
    """``|dY/dt + |w| Y^2 + 2 i nu |w| Y - |w||`` with a central difference for ``dY/dt``."""
    sol = cf.solve(scenario)
    mag_grid = np.asarray(scenario.omega_abs.value(np.asarray(ts)), dtype=float)
    h = rel_step / max(float(np.max(mag_grid)), 1e-300)
    ts = np.asarray(ts, dtype=float)
    ts = ts[ts >= h]
    y = cf.eval_Y(sol, ts)
    dy = (cf.eval_Y(sol, ts + h) - cf.eval_Y(sol, ts - h)) / (2 * h)
    w = np.asarray(scenario.omega_abs.value(ts), dtype=float)
    return float(np.max(np.abs(dy + w * y**2 + 2j * scenario.nu * w * y - w)))


def change_of_variable_deviation(scenario: SolvableScenario, ts) -> float:
    """Integrated ``u1`` against ``i exp(i phi_omega) Y``."""
    us = oracle.integrate_riccati(scenario.hamiltonian(), ts)
    y = cf.eval_Y(cf.solve(scenario), ts)
    phi = scenario.phi_omega.value(np.asarray(ts))
    return float(np.max(np.abs(us[:, 0] - 1j * np.exp(1j * phi) * y)))


def run_verify(nu_grid: Sequence[float] = DEFAULT_NU_GRID, t_max: float = 10.0, samples: int = 41,
               tol: float | None = None) -> list[Check]:
    if len(nu_grid) == 0:
        raise ValueError("nu grid is empty")
    if samples < 2 or t_max <= 0:
        raise ValueError("need samples >= 2 and t_max > 0")
    tol = oracle_tolerance() if tol is None else tol
    ts = np.linspace(0.0, t_max, samples)
    fine = np.linspace(0.0, t_max, 1000)
    checks = []
    for nu in nu_grid:
        for label, sc in scenarios_for(float(nu)).items():
            checks.append(Check(f"oracle U [{label}]", nu, oracle_deviation(sc, ts), tol))
            checks.append(Check(f"det U = 1 [{label}]", nu, det_deviation(sc, ts), DET_TOL))
            checks.append(Check(f"exp(2r)(1-|Y|^2) [{label}]", nu, growth_identity_deviation(sc, ts[::4]), GROWTH_IDENTITY_TOL))
            checks.append(Check(f"Riccati residual [{label}]", nu, riccati_residual(sc, fine), RICCATI_TOL))
            checks.append(Check(f"u1 = i e^(i phi) Y [{label}]", nu, change_of_variable_deviation(sc, ts),
                                CHANGE_OF_VARIABLE_TOL))
    return checks


def report(checks: Sequence[Check]) -> str:
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    return "\n".join(lines)
