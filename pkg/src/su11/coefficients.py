"""Real coefficient functions of one real parameter (time or propagation distance).

Every family carries an analytic derivative and an exact running integral
``integral(t) = int_0^t f``, because the phase rate of the off-diagonal
coupling enters the solvability condition and must not be differentiated
numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate


class CoefficientDomainError(ValueError):
    """Raised when a coefficient is evaluated outside the range where it is defined."""


class CoefficientFn:
    """Base class.  Subclasses implement ``value``, ``derivative`` and ``integral``."""

    family: str = "abstract"

    def __call__(self, t):
        return self.value(t)

    def value(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def integral(self, t):
        """Return ``int_0^t f(tau) dtau``."""
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return False

    def domain(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def check_domain(self, t, name: str = "coefficient") -> None:
        lo, hi = self.domain()
        if lo == -math.inf and hi == math.inf:
            return
        arr = np.asarray(t, dtype=float)
        if arr.size and (arr.min() < lo or arr.max() > hi):
            raise CoefficientDomainError(
                f"{name} ({self.family}) evaluated at t outside its domain [{lo}, {hi}]"
            )

    def to_json(self) -> dict:
        raise TypeError(f"{type(self).__name__} coefficients are derived and cannot be serialized")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Constant(float(other))
        return Sum((self, other))

    __radd__ = __add__

    def __neg__(self):
        return Scaled(-1.0, self)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Constant(float(other))
        return Sum((self, -other))

    def __mul__(self, factor):
        return Scaled(float(factor), self)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Constant(CoefficientFn):
    c: float
    family = "constant"

    def value(self, t):
        return np.full(np.shape(t), self.c, dtype=float) if np.ndim(t) else float(self.c)

    def derivative(self, t):
        return np.zeros(np.shape(t)) if np.ndim(t) else 0.0

    def integral(self, t):
        return self.c * np.asarray(t, dtype=float) if np.ndim(t) else self.c * float(t)

    @property
    def is_constant(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"family": "constant", "params": [self.c]}


@dataclass(frozen=True)
class Sinusoid(CoefficientFn):
    """``offset + amplitude * sin(frequency * t + phase)``."""

    offset: float
    amplitude: float
    frequency: float
    phase: float = 0.0
    family = "sinusoid"

    def value(self, t):
        return self.offset + self.amplitude * np.sin(self.frequency * np.asarray(t, dtype=float) + self.phase)

    def derivative(self, t):
        w = self.frequency
        return self.amplitude * w * np.cos(w * np.asarray(t, dtype=float) + self.phase)

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        w = self.frequency
        if w == 0.0:
            return (self.offset + self.amplitude * math.sin(self.phase)) * t
        return self.offset * t - self.amplitude / w * (np.cos(w * t + self.phase) - math.cos(self.phase))

    @property
    def is_constant(self) -> bool:
        return self.amplitude == 0.0 or self.frequency == 0.0

    def to_json(self) -> dict:
        return {"family": "sinusoid", "params": [self.offset, self.amplitude, self.frequency, self.phase]}


@dataclass(frozen=True)
class Polynomial(CoefficientFn):
    """Polynomial with coefficients in ascending order of power."""

    coeffs: tuple[float, ...]
    family = "polynomial"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs) or (0.0,))

    @property
    def _poly(self) -> np.polynomial.Polynomial:
        return np.polynomial.Polynomial(self.coeffs)

    def value(self, t):
        return self._poly(np.asarray(t, dtype=float))

    def derivative(self, t):
        return self._poly.deriv()(np.asarray(t, dtype=float))

    def integral(self, t):
        return self._poly.integ(lbnd=0.0)(np.asarray(t, dtype=float))

    @property
    def is_constant(self) -> bool:
        return all(c == 0.0 for c in self.coeffs[1:])

    def to_json(self) -> dict:
        return {"family": "polynomial", "params": list(self.coeffs)}


@dataclass(frozen=True)
class Table(CoefficientFn):
    """Tabulated samples joined by straight lines.

    The derivative is the slope of the segment to the right of ``t``
    (the last segment at the right end point).
    """

    t: tuple[float, ...]
    v: tuple[float, ...]
    family = "table"

    def __post_init__(self):
        ts = np.asarray(self.t, dtype=float)
        vs = np.asarray(self.v, dtype=float)
        if ts.ndim != 1 or ts.shape != vs.shape or ts.size < 2:
            raise ValueError("table needs matching 1-d grids with at least two samples")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("table grid must be strictly increasing")
        if not (np.all(np.isfinite(ts)) and np.all(np.isfinite(vs))):
            raise ValueError("table entries must be finite")
        object.__setattr__(self, "t", tuple(ts.tolist()))
        object.__setattr__(self, "v", tuple(vs.tolist()))

    def domain(self) -> tuple[float, float]:
        return (self.t[0], self.t[-1])

    def _arrays(self):
        return np.asarray(self.t), np.asarray(self.v)

    def value(self, t):
        self.check_domain(t)
        ts, vs = self._arrays()
        out = np.interp(np.asarray(t, dtype=float), ts, vs)
        return float(out) if np.ndim(t) == 0 else out

    def derivative(self, t):
        self.check_domain(t)
        ts, vs = self._arrays()
        slopes = np.diff(vs) / np.diff(ts)
        idx = np.clip(np.searchsorted(ts, np.asarray(t, dtype=float), side="right") - 1, 0, slopes.size - 1)
        out = slopes[idx]
        return float(out) if np.ndim(t) == 0 else out

    def _antiderivative(self, t):
        # integral from the first knot
        ts, vs = self._arrays()
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (vs[1:] + vs[:-1]) * np.diff(ts))))
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, ts.size - 2)
        v_t = np.interp(t, ts, vs)
        return cum[idx] + 0.5 * (vs[idx] + v_t) * (t - ts[idx])

    def integral(self, t):
        self.check_domain(t)
        self.check_domain(0.0)
        out = self._antiderivative(t) - self._antiderivative(0.0)
        return float(out) if np.ndim(t) == 0 else out

    @property
    def is_constant(self) -> bool:
        return len(set(self.v)) == 1

    def breakpoints(self) -> tuple[float, ...]:
        return self.t

    def to_json(self) -> dict:
        return {"family": "table", "t": list(self.t), "v": list(self.v)}


@dataclass(frozen=True)
class Sum(CoefficientFn):
    terms: tuple[CoefficientFn, ...]
    family = "sum"

    def value(self, t):
        return sum(term.value(t) for term in self.terms)

    def derivative(self, t):
        return sum(term.derivative(t) for term in self.terms)

    def integral(self, t):
        return sum(term.integral(t) for term in self.terms)

    @property
    def is_constant(self) -> bool:
        return all(term.is_constant for term in self.terms)

    def domain(self) -> tuple[float, float]:
        return _intersect(term.domain() for term in self.terms)

    def breakpoints(self) -> tuple[float, ...]:
        return tuple(sorted({p for term in self.terms for p in breakpoints(term)}))

    def to_json(self) -> dict:
        return {"family": "sum", "terms": [term.to_json() for term in self.terms]}


@dataclass(frozen=True)
class Scaled(CoefficientFn):
    factor: float
    fn: CoefficientFn
    family = "scaled"

    def value(self, t):
        return self.factor * self.fn.value(t)

    def derivative(self, t):
        return self.factor * self.fn.derivative(t)

    def integral(self, t):
        return self.factor * self.fn.integral(t)

    @property
    def is_constant(self) -> bool:
        return self.factor == 0.0 or self.fn.is_constant

    def domain(self) -> tuple[float, float]:
        return self.fn.domain()

    def breakpoints(self) -> tuple[float, ...]:
        return breakpoints(self.fn)


@dataclass(frozen=True)
class Derivative(CoefficientFn):
    """The derivative of another coefficient, viewed as a coefficient itself."""

    fn: CoefficientFn
    family = "derivative"

    def value(self, t):
        return self.fn.derivative(t)

    def derivative(self, t):
        raise NotImplementedError("second derivatives are not tracked")

    def integral(self, t):
        return self.fn.value(t) - self.fn.value(0.0)

    @property
    def is_constant(self) -> bool:
        if isinstance(self.fn, Polynomial):
            return all(c == 0.0 for c in self.fn.coeffs[2:])
        return self.fn.is_constant

    def domain(self) -> tuple[float, float]:
        return self.fn.domain()

    def breakpoints(self) -> tuple[float, ...]:
        return breakpoints(self.fn)


@dataclass(frozen=True)
class Antiderivative(CoefficientFn):
    """``start + int_0^t rate``; its derivative is ``rate`` exactly."""

    rate: CoefficientFn
    start: float = 0.0
    family = "antiderivative"

    def value(self, t):
        return self.start + self.rate.integral(t)

    def derivative(self, t):
        return self.rate.value(t)

    def integral(self, t):
        return quad_cumulative(self.value, t, points=breakpoints(self.rate))

    @property
    def is_constant(self) -> bool:
        return isinstance(self.rate, Constant) and self.rate.c == 0.0

    def domain(self) -> tuple[float, float]:
        return self.rate.domain()

    def breakpoints(self) -> tuple[float, ...]:
        return breakpoints(self.rate)


def _intersect(domains) -> tuple[float, float]:
    lo, hi = -math.inf, math.inf
    for a, b in domains:
        lo, hi = max(lo, a), min(hi, b)
    return lo, hi


def breakpoints(fn: CoefficientFn) -> tuple[float, ...]:
    """Points where ``fn`` may have a kink (table knots)."""
    getter = getattr(fn, "breakpoints", None)
    return tuple(getter()) if getter is not None else ()


class QuadratureError(RuntimeError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


def quad(func, a: float, b: float, points: Sequence[float] = (), epsabs: float = 1e-12,
         epsrel: float = 1e-13, limit: int = 10_000) -> float:
    """Adaptive Gauss-Kronrod quadrature of a real scalar function over ``[a, b]``.

    Raises :class:`QuadratureError` if QUADPACK reports non-convergence.
    """
    if a == b:
        return 0.0
    inner = [p for p in points if min(a, b) < p < max(a, b)]
    kwargs = {"points": inner} if inner else {}
    value, err, info, *msg = integrate.quad(
        func, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1, **kwargs
    )
    if msg and err > max(epsabs, epsrel * abs(value)) * 10:
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {msg[0].splitlines()[0]}", err)
    return value


def quad_cumulative(func, t, points: Sequence[float] = (), **kwargs):
    """``int_0^t func`` for a scalar or an array of ``t`` (any order).

    Array inputs are integrated piecewise between consecutive sorted samples
    and accumulated, so a curve costs one pass over ``[0, max t]``.
    """
    if np.ndim(t) == 0:
        return quad(func, 0.0, float(t), points=points, **kwargs)
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    order = np.argsort(flat, kind="stable")
    knots = np.concatenate(([0.0], flat[order]))
    pieces = np.array([quad(func, a, b, points=points, **kwargs) for a, b in zip(knots[:-1], knots[1:])])
    out = np.empty_like(flat)
    out[order] = np.cumsum(pieces)
    return out.reshape(t.shape)


_FAMILIES = ("constant", "sinusoid", "polynomial", "table", "sum")


def from_json(obj: dict) -> CoefficientFn:
    """Build a coefficient from ``{family, params}`` / ``{family: "table", t, v}``."""
    family = obj.get("family")
    if family == "constant":
        (c,) = obj["params"]
        return Constant(float(c))
    if family == "sinusoid":
        params = [float(p) for p in obj["params"]]
        if len(params) == 3:
            params.append(0.0)
        return Sinusoid(*params)
    if family == "polynomial":
        return Polynomial(tuple(obj["params"]))
    if family == "table":
        return Table(tuple(obj["t"]), tuple(obj["v"]))
    if family == "sum":
        return Sum(tuple(from_json(term) for term in obj["terms"]))
    raise ValueError(f"unknown coefficient family {family!r}; expected one of {_FAMILIES}")
