"""Request costs, censored demand distributions and assumption checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import OutOfDomain
from .numerics import quadrature

_SLACK = 1e-9


def _check_range(x, lo: float, hi: float, what: str):
    arr = np.asarray(x, dtype=float)
    tol = _SLACK * max(1.0, abs(hi) if math.isfinite(hi) else 1.0)
    if np.any(arr < lo - tol) or np.any(arr > hi + tol) or np.any(np.isnan(arr)):
        raise OutOfDomain(f"{what} outside [{lo}, {hi}]: {x}")
    return arr


def _out(arr: np.ndarray, like):
    return float(arr) if np.ndim(like) == 0 else arr


@dataclass(frozen=True)
class CostFunction:
    """Convex request cost psi on [0, cap].

    kind is "zero", "quadratic" (psi = coef * x**2) or "custom", in which case
    psi_fn, dpsi_fn and d2psi_fn supply the function and its derivatives.
    """

    kind: str = "zero"
    cap: float = math.inf
    coef: float = 0.0
    psi_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    dpsi_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    d2psi_fn: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("zero", "quadratic", "custom"):
            raise ValueError(f"unknown cost kind {self.kind!r}")
        if self.kind == "custom" and None in (self.psi_fn, self.dpsi_fn):
            raise ValueError("custom cost needs psi_fn and dpsi_fn")

    @classmethod
    def zero(cls, cap: float = math.inf) -> "CostFunction":
        return cls("zero", cap)

    @classmethod
    def quadratic(cls, coef: float, cap: float = math.inf) -> "CostFunction":
        return cls("quadratic", cap, coef)

    def with_cap(self, cap: float) -> "CostFunction":
        return CostFunction(self.kind, cap, self.coef, self.psi_fn, self.dpsi_fn, self.d2psi_fn)

    def psi(self, x):
        arr = _check_range(x, 0.0, self.cap, "cost argument")
        if self.kind == "zero":
            out = np.zeros_like(arr)
        elif self.kind == "quadratic":
            out = self.coef * arr**2
        else:
            out = np.asarray(self.psi_fn(arr), dtype=float)
        return _out(out, x)

    def psi_prime(self, x):
        arr = _check_range(x, 0.0, self.cap, "cost argument")
        if self.kind == "zero":
            out = np.zeros_like(arr)
        elif self.kind == "quadratic":
            out = 2 * self.coef * arr
        else:
            out = np.asarray(self.dpsi_fn(arr), dtype=float)
        return _out(out, x)

    def psi_double_prime(self, x):
        arr = _check_range(x, 0.0, self.cap, "cost argument")
        if self.kind == "zero":
            out = np.zeros_like(arr)
        elif self.kind == "quadratic":
            out = np.full_like(arr, 2 * self.coef)
        elif self.d2psi_fn is not None:
            out = np.asarray(self.d2psi_fn(arr), dtype=float)
        else:
            h = 1e-6 * max(1.0, float(np.max(np.abs(arr), initial=0.0)))
            out = (np.asarray(self.dpsi_fn(arr + h)) - np.asarray(self.dpsi_fn(arr - h))) / (2 * h)
        return _out(out, x)

    def to_dict(self) -> dict:
        if self.kind == "custom":
            raise ValueError("custom costs are not serializable")
        return {"kind": self.kind, "coef": self.coef}


@dataclass(frozen=True)
class DemandModel:
    """Demand distribution censored at cap.

    The continuous part lives on [0, cap); the mass above cap is rectified to an
    atom at cap. ``cdf`` and the partial moments describe the continuous part
    only, so cdf(cap) + atom_at_cap == 1.
    """

    family: str
    cap: float = math.inf
    rate: float = 1.0
    scale: float = 1.0
    shape: float = 1.0
    pdf_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    cdf_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    sampler: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.family == "exponential":
            if not self.rate > 0:
                raise ValueError("exponential rate must be positive")
        elif self.family == "lomax":
            if not (self.scale > 0 and self.shape > 0):
                raise ValueError("lomax scale and shape must be positive")
        elif self.family == "custom":
            if self.pdf_fn is None or self.cdf_fn is None:
                raise ValueError("custom demand needs pdf_fn and cdf_fn")
        else:
            raise ValueError(f"unknown demand family {self.family!r}")
        if not self.cap > 0:
            raise ValueError("demand cap must be positive")

    @classmethod
    def exponential(cls, rate: float, cap: float = math.inf) -> "DemandModel":
        return cls("exponential", cap, rate=rate)

    @classmethod
    def lomax(cls, scale: float, shape: float, cap: float = math.inf) -> "DemandModel":
        return cls("lomax", cap, scale=scale, shape=shape)

    def with_cap(self, cap: float) -> "DemandModel":
        return DemandModel(self.family, cap, self.rate, self.scale, self.shape,
                           self.pdf_fn, self.cdf_fn, self.sampler)

    def _arg(self, v):
        arr = _check_range(v, 0.0, math.inf, "demand value")
        return np.minimum(arr, self.cap)

    def _raw_pdf(self, v: np.ndarray) -> np.ndarray:
        if self.family == "exponential":
            return self.rate * np.exp(-self.rate * v)
        if self.family == "lomax":
            return self.shape / self.scale * (1 + v / self.scale) ** (-self.shape - 1)
        return np.asarray(self.pdf_fn(v), dtype=float)

    def _raw_cdf(self, v: np.ndarray) -> np.ndarray:
        if self.family == "exponential":
            return -np.expm1(-self.rate * v)
        if self.family == "lomax":
            return 1 - (1 + v / self.scale) ** (-self.shape)
        return np.asarray(self.cdf_fn(v), dtype=float)

    def pdf(self, v):
        arr = _check_range(v, 0.0, math.inf, "demand value")
        out = np.where(arr <= self.cap, self._raw_pdf(np.minimum(arr, self.cap)), 0.0)
        return _out(out, v)

    def cdf(self, v):
        return _out(self._raw_cdf(self._arg(v)), v)

    @property
    def atom_at_cap(self) -> float:
        if not math.isfinite(self.cap):
            return 0.0
        return float(1 - self._raw_cdf(np.array(self.cap)))

    def partial_moment1(self, v):
        """Integral of t f(t) over [0, v] (continuous part)."""
        arr = self._arg(v)
        if self.family == "exponential":
            x = self.rate * arr
            out = -(np.expm1(-x) + _times_exp(x, 1)) / self.rate
        elif self.family == "lomax":
            out = _lomax_m1(arr, self.scale, self.shape)
        else:
            out = _vectorized(lambda b: quadrature(lambda t: t * float(self.pdf_fn(t)), 0.0, b), arr)
        return _out(out, v)

    def partial_moment2(self, v):
        """Integral of t**2 f(t) over [0, v] (continuous part)."""
        arr = self._arg(v)
        if self.family == "exponential":
            x = self.rate * arr
            out = (2 - _times_exp(x, 2) - 2 * _times_exp(x, 1) - 2 * np.exp(-x)) / self.rate**2
        elif self.family == "lomax":
            out = _lomax_m2(arr, self.scale, self.shape)
        else:
            out = _vectorized(lambda b: quadrature(lambda t: t * t * float(self.pdf_fn(t)), 0.0, b), arr)
        return _out(out, v)

    def mean(self) -> float:
        """Mean of the censored demand, atom included."""
        atom = self.atom_at_cap
        return float(self.partial_moment1(self.cap)) + (self.cap * atom if atom > 0 else 0.0)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.family == "exponential":
            raw = rng.exponential(1 / self.rate, size)
        elif self.family == "lomax":
            raw = self.scale * rng.pareto(self.shape, size)
        elif self.sampler is not None:
            raw = np.asarray(self.sampler(rng, size), dtype=float)
        else:
            raise ValueError("custom demand needs a sampler to be simulated")
        return np.minimum(raw, self.cap)

    def to_dict(self) -> dict:
        if self.family == "exponential":
            return {"family": "exponential", "rate": self.rate}
        if self.family == "lomax":
            return {"family": "lomax", "scale": self.scale, "shape": self.shape}
        raise ValueError("custom demand models are not serializable")


def _times_exp(x: np.ndarray, k: int) -> np.ndarray:
    """x**k exp(-x), with the limit 0 at x = inf."""
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(x), 0.0, x**k * np.exp(-x))


def _vectorized(fn, arr: np.ndarray) -> np.ndarray:
    return np.vectorize(fn, otypes=[float])(arr)


def _lomax_m1(v, sc, al):
    u = 1 + v / sc
    if al == 1:
        return sc * (np.log(u) - (1 - 1 / u))
    return sc * al * ((1 - u ** (1 - al)) / (al - 1) - (1 - u ** (-al)) / al)


def _lomax_m2(v, sc, al):
    u = 1 + v / sc

    def g(k):  # integral of u**(k - al - 1) du from 1 to u, scaled
        e = k - al
        return np.log(u) if e == 0 else (u**e - 1) / e

    return sc**2 * al * (g(2) - 2 * g(1) + g(0))


@dataclass
class ValidationReport:
    results: dict = field(default_factory=dict)  # name -> (passed, first violation or None)

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.results.values())

    def failed(self) -> list[str]:
        return [name for name, (passed, _) in self.results.items() if not passed]


def validate_assumptions(
    cost: CostFunction, demand: DemandModel, points: int = 10_000, marginal_at: Optional[float] = None
) -> ValidationReport:
    """Grid checks of the cost and demand regularity conditions.

    The marginal-cost condition psi'(x) < 1 is checked at ``marginal_at``,
    which defaults to half the capacity (the two-player condition).
    """
    report = ValidationReport()
    cap = min(cost.cap, demand.cap)
    if not math.isfinite(cap):
        cap = 100 * max(demand.mean(), 1.0)
    xs = np.linspace(0.0, cap, points)

    def first_bad(mask):
        idx = np.flatnonzero(mask)
        return None if idx.size == 0 else float(xs[idx[0]])

    psi = cost.psi(xs)
    dpsi = cost.psi_prime(xs)
    eps = 1e-12 * max(1.0, float(np.max(np.abs(psi))))
    bad = np.zeros(points, bool)
    bad[1:] |= np.diff(psi) < -eps
    bad[1:-1] |= np.diff(psi, 2) < -eps
    bad |= dpsi < -1e-12
    first = first_bad(bad)
    if abs(float(cost.psi(0.0))) > 1e-12:
        first = 0.0
    report.results["cost_convex_increasing"] = (first is None, first)
    at = cap / 2 if marginal_at is None else marginal_at
    below = float(cost.psi_prime(at)) < 1
    report.results["cost_marginal_below_one"] = (below, None if below else at)

    pdf = demand.pdf(xs)
    finite = np.isfinite(pdf) & (pdf >= 0)
    top = demand.cap if math.isfinite(demand.cap) else math.inf
    mass = quadrature(lambda t: float(demand.pdf(t)), 0.0, top) if math.isfinite(top) else float(demand.cdf(math.inf))
    mass += demand.atom_at_cap
    report.results["demand_density_regular"] = (
        bool(finite.all()) and abs(mass - 1) < 1e-6,
        first_bad(~finite) if not finite.all() else (None if abs(mass - 1) < 1e-6 else 0.0),
    )
    inc = np.r_[False, np.diff(pdf) > 1e-12 * max(float(np.max(pdf)), 1e-300)]
    report.results["demand_density_nonincreasing"] = (not inc.any(), first_bad(inc))

    m = demand.partial_moment1(math.inf) if not math.isfinite(demand.cap) else demand.mean()
    raw = demand.with_cap(math.inf)
    tails = [t**3 * float(raw.pdf(t)) for t in (10 * m, 100 * m)]
    report.results["demand_tail_decay"] = (tails[1] < tails[0], None if tails[1] < tails[0] else 100 * m)
    return report
