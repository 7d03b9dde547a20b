"""``su11`` command line."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import closed_form as cf
from . import guided_wave as gw
from . import io
from .open_dynamics import evolve_density, purity
from .verify import DEFAULT_NU_GRID, report, run_verify


def _positive(kind):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
        return value

    return parse


def _samples(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("samples must be >= 2")
    return value


def _nu_grid(text):
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise argparse.ArgumentTypeError("nu grid is empty")
    if any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("nu values must be non-negative")
    return values


def cmd_rabi_curve(args) -> int:
    sc = io.scenario_from_json(args.scenario)
    for field in ("omega_abs", "phase_rate"):
        if not getattr(sc, field).is_constant:
            raise io.InputError(f"rabi-curve needs constant coefficients; {field} is time dependent")
    omega0 = float(sc.omega_abs.value(0.0))
    ts = np.linspace(0.0, args.t_max, args.samples)
    regime = cf.classify(sc.nu)
    chi = omega0 * ts
    p = cf.probability_of_chi(sc.nu, chi, regime)
    io.write_csv(args.out, ["tau", "chi", "P", "regime"],
                 ((omega0 * t, x, pp, regime.value) for t, x, pp in zip(ts, chi, p)))
    return 0


def cmd_propagator(args) -> int:
    sc = io.scenario_from_json(args.scenario)
    ts = np.linspace(0.0, args.t_max, args.samples)
    props = cf.propagators(sc, ts)
    io.write_csv(args.out, ["t", "re_a", "im_a", "re_b", "im_b", "det_minus_one"],
                 ((t, p.a.real, p.a.imag, p.b.real, p.b.imag, p.det() - 1.0) for t, p in zip(ts, props)))
    return 0


def cmd_guided_wave(args) -> int:
    problem = io.problem_from_json(args.problem)
    zs = np.linspace(0.0, args.z_max, args.samples)
    A, B = gw.propagate_modes(problem, zs)
    f0 = gw.flux(problem.A0, problem.B0)
    err = gw.flux(A, B) - f0
    io.write_csv(args.out, ["z", "re_A", "im_A", "re_B", "im_B", "flux_error"],
                 zip(zs, A.real, A.imag, B.real, B.imag, err))
    return 0


def cmd_open_evolve(args) -> int:
    model = io.model_from_json(args.scenario)
    rho0 = io.density_from_json(args.rho0)
    ts = np.linspace(0.0, args.t_max, args.samples)
    rhos = evolve_density(model, rho0, ts)
    io.write_csv(args.out, ["t", "rho11", "re_rho12", "im_rho12", "rho22", "purity"],
                 ((t, r[0, 0].real, r[0, 1].real, r[0, 1].imag, r[1, 1].real, purity(r)) for t, r in zip(ts, rhos)))
    return 0


def cmd_verify(args) -> int:
    checks = run_verify(args.nu_grid, t_max=args.t_max, samples=args.samples, tol=args.tol)
    print(report(checks))
    return 0 if all(c.passed for c in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="su11", description="Exact dynamics of 2x2 su(1,1) Hamiltonians")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rabi-curve", help="transition probability for a constant scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--t-max", type=_positive(float), default=12.0)
    p.add_argument("--samples", type=_samples, default=2000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rabi_curve)

    p = sub.add_parser("propagator", help="Caley-Klein entries of the exact evolution operator")
    p.add_argument("--scenario", required=True)
    p.add_argument("--t-max", type=_positive(float), default=10.0)
    p.add_argument("--samples", type=_samples, default=201)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_propagator)

    p = sub.add_parser("guided-wave", help="counter-propagating mode amplitudes")
    p.add_argument("--problem", required=True)
    p.add_argument("--z-max", type=_positive(float), default=10.0)
    p.add_argument("--samples", type=_samples, default=201)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_guided_wave)

    p = sub.add_parser("open-evolve", help="normalised density-matrix evolution")
    p.add_argument("--scenario", required=True, help="scenario or general Hamiltonian JSON")
    p.add_argument("--rho0", required=True)
    p.add_argument("--t-max", type=_positive(float), default=10.0)
    p.add_argument("--samples", type=_samples, default=201)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_open_evolve)

    p = sub.add_parser("verify", help="closed form versus numerical integration")
    p.add_argument("--nu-grid", type=_nu_grid, default=list(DEFAULT_NU_GRID))
    p.add_argument("--t-max", type=_positive(float), default=10.0)
    p.add_argument("--samples", type=_samples, default=41)
    p.add_argument("--tol", type=_positive(float), default=None,
                   help="closed-form/oracle threshold (default 1e-8, or $SU11_TOL)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (io.InputError, OSError) as exc:
        print(f"su11 {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
