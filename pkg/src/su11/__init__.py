"""Exact and numerical dynamics of time-dependent 2x2 su(1,1) Hamiltonians."""

from .closed_form import (
    PhaseIntegrals,
    Propagator,
    Regime,
    RegimeSolution,
    chi,
    classify,
    effective_hamiltonian,
    eval_Y,
    phase_integrals,
    propagator,
    propagators,
    solve,
    transition_probability,
)
from .coefficients import Constant, Polynomial, Sinusoid, Sum, Table
from .core import (
    SolvableScenario,
    SpectrumKind,
    Su11Hamiltonian,
    hamiltonian_matrix,
    is_closed_system,
    is_pseudo_hermitian,
    quasi_hermitian_metric,
    reality_threshold,
    solvable_nu,
    spectrum,
)
from .guided_wave import CoupledModeProblem, propagate_modes, to_su11
from .open_dynamics import evolve_density, nonlinear_rhs, semigroup_check, split
from .oracle import IntegratorConfig, integrate_riccati, integrate_U

__version__ = "0.1.0"
