"""First-order mean-field equilibrium: cost cap and congestion threshold."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AssumptionViolation
from .model import CostFunction, DemandModel
from .numerics import DEFAULT_TOL, Bracket, Tolerances, find_root
from .strategy import AifStrategy


@dataclass(frozen=True)
class FluidSolution:
    xi_cost: float  # +inf when psi' never reaches one
    xi_hat: float  # +inf when resources are abundant
    strategy: AifStrategy

    @property
    def effective_cap(self) -> float:
        return min(self.xi_cost, self.xi_hat)

    def to_dict(self) -> dict:
        return {
            "xi_cost": _finite_or_none(self.xi_cost),
            "xi_hat": _finite_or_none(self.xi_hat),
            "effective_cap": _finite_or_none(self.effective_cap),
            "switch_points": list(self.strategy.switch_points),
        }


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def expected_load(demand: DemandModel, xi: float) -> float:
    """E[min(V, xi)] = int_0^xi v f(v) dv + xi (1 - F(xi)), atom included."""
    if math.isinf(xi):
        return demand.mean()
    xi = min(xi, demand.cap)
    tail = 1 - float(demand.cdf(xi)) if xi < demand.cap else demand.atom_at_cap
    return float(demand.partial_moment1(xi)) + xi * tail


def cost_cap(cost: CostFunction, tol: Tolerances = DEFAULT_TOL) -> float:
    """Root of 1 - psi'(xi) = 0, +inf if psi' stays below one."""
    if cost.kind == "zero":
        return math.inf
    if cost.kind == "quadratic":
        return math.inf if cost.coef == 0 else 1 / (2 * cost.coef)
    g = lambda x: 1 - float(cost.psi_prime(x))
    hi = cost.cap if math.isfinite(cost.cap) else 1.0
    while g(hi) > 0:
        if math.isfinite(cost.cap) or hi > 1e12:
            return math.inf
        hi *= 2
    return find_root(g, Bracket.of(g, 0.0, hi), tol)


def solve_fluid(
    per_capita_cap: float, demand: DemandModel, cost: CostFunction, tol: Tolerances = DEFAULT_TOL
) -> FluidSolution:
    c = per_capita_cap
    if not c > 0:
        raise AssumptionViolation("per-capita capacity must be positive")
    unbounded = cost.with_cap(math.inf)
    if float(unbounded.psi_prime(0.0)) >= 1:
        raise AssumptionViolation("psi'(0) must be below one")
    xi_cost = cost_cap(unbounded, tol)
    top = min(xi_cost, demand.cap)
    if expected_load(demand, top) < c:
        xi_hat = math.inf
    else:
        g = lambda xi: expected_load(demand, xi) - c
        hi = top
        if math.isinf(hi):
            hi = max(c, 1.0)
            while g(hi) < 0:
                hi *= 2
        xi_hat = find_root(g, Bracket.of(g, 0.0, hi), tol)
    level = min(xi_cost, xi_hat)
    cap = demand.cap if math.isfinite(demand.cap) else max(2 * level, 1.0) if math.isfinite(level) else 1.0
    strategy = AifStrategy.flat_above(cap, level) if math.isfinite(level) else AifStrategy(cap)
    return FluidSolution(xi_cost, xi_hat, strategy)
