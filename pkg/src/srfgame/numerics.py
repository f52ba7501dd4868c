"""Root finding, extremum search, quadrature and explicit ODE steps.

Callables passed to the scan routines are evaluated on numpy arrays when they
support it; scalar-only callables are mapped element by element.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .errors import NoSignChange

ScalarFn = Callable[[float], float]


@dataclass(frozen=True)
class Tolerances:
    root_abs: float = 1e-10
    payoff_abs: float = 1e-8
    grid_step: float = 1e-4  # fraction of the scanned interval
    ode_step: float = 1e-3  # fraction of the regime length

    def __post_init__(self):
        for name in ("root_abs", "payoff_abs", "grid_step", "ode_step"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"tolerance {name} must be positive, got {value}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise NoSignChange(f"empty bracket [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0 or math.isnan(self.f_lo * self.f_hi):
            raise NoSignChange(
                f"no sign change on [{self.lo}, {self.hi}]: f={self.f_lo}, {self.f_hi}"
            )

    @classmethod
    def of(cls, f: ScalarFn, lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, float(f(lo)), float(f(hi)))


def evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    """Evaluate f on an array, falling back to a scalar loop."""
    x = np.asarray(x, dtype=float)
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(xi)) for xi in x])


def scalar(f: Callable, x: float) -> float:
    """f at a single point as a Python float."""
    return float(np.asarray(f(float(x)), dtype=float).reshape(-1)[0])


def central_difference(f: Callable, scale: float = 1.0) -> Callable:
    """Central finite-difference derivative with step 1e-6 * scale."""
    h = 1e-6 * max(abs(scale), 1.0)

    def df(x):
        return (evaluate(f, np.asarray(x) + h) - evaluate(f, np.asarray(x) - h)) / (2 * h)

    return df


def find_root(f: ScalarFn, bracket: Bracket, tol: Tolerances = DEFAULT_TOL) -> float:
    """Root of f inside a sign-changing bracket (Brent's method)."""
    if bracket.f_lo == 0.0:
        return bracket.lo
    if bracket.f_hi == 0.0:
        return bracket.hi
    return optimize.brentq(f, bracket.lo, bracket.hi, xtol=tol.root_abs, rtol=4 * np.finfo(float).eps)


def _grid(a: float, b: float, tol: Tolerances) -> np.ndarray:
    cells = max(int(math.ceil(1.0 / tol.grid_step)), 2)
    return np.linspace(a, b, cells + 1)


def first_stationary_point(
    f: Callable,
    a: float,
    b: float,
    tol: Tolerances = DEFAULT_TOL,
    df: Optional[Callable] = None,
) -> Optional[float]:
    """Smallest point of [a, b] where f' falls from positive to non-positive.

    Forward grid scan of the derivative followed by bisection in the first
    cell where it changes sign. Returns None when f' stays positive.
    """
    if df is None:
        df = central_difference(f, max(abs(a), abs(b)))
    xs = _grid(a, b, tol)
    ds = evaluate(df, xs)
    hits = np.flatnonzero(ds <= 0)
    if hits.size == 0:
        return None
    i = int(hits[0])
    if i == 0:
        return float(a)
    g = lambda x: scalar(df, x)
    return find_root(g, Bracket(xs[i - 1], xs[i], ds[i - 1], ds[i]), tol)


def first_crossing(
    g: Callable, a: float, b: float, tol: Tolerances = DEFAULT_TOL
) -> Optional[float]:
    """Smallest x in (a, b] where g goes from negative to non-negative.

    The starting point itself is skipped, so a touching zero at a does not count.
    """
    xs = _grid(a, b, tol)
    gs = evaluate(g, xs)
    up = np.flatnonzero((gs[:-1] < 0) & (gs[1:] >= 0))
    if up.size == 0:
        return None
    i = int(up[0])
    h = lambda x: scalar(g, x)
    return find_root(h, Bracket(xs[i], xs[i + 1], gs[i], gs[i + 1]), tol)


def max_on_interval(
    f: Callable, a: float, b: float, tol: Tolerances = DEFAULT_TOL
) -> tuple[float, float]:
    """Global maximum on [a, b]: grid scan plus bounded refinement near the best cell."""
    if a == b:
        return float(a), scalar(f, a)
    xs = _grid(a, b, tol)
    ys = evaluate(f, xs)
    i = int(np.nanargmax(ys))
    best_x, best_y = float(xs[i]), float(ys[i])
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    res = optimize.minimize_scalar(
        lambda x: -scalar(f, x), bounds=(lo, hi), method="bounded", options={"xatol": tol.root_abs}
    )
    if res.success and -res.fun > best_y:
        best_x, best_y = float(res.x), float(-res.fun)
    return best_x, best_y


def quadrature(f: ScalarFn, a: float, b: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Adaptive Gauss-Kronrod integral of f over [a, b]."""
    value, _ = integrate.quad(f, a, b, epsabs=tol.root_abs, epsrel=tol.root_abs, limit=500)
    return float(value)


def euler_step(g: Callable, t: float, y: np.ndarray, h: float) -> np.ndarray:
    return y + h * g(t, y)


def heun_step(g: Callable, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """Explicit trapezoidal (Heun) step for y' = g(t, y)."""
    k1 = g(t, y)
    k2 = g(t + h, y + h * k1)
    return y + 0.5 * h * (k1 + k2)
