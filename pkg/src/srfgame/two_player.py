"""Exact equilibrium of the two-player game with exponential demands."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import AssumptionViolation, OutOfDomain
from .model import CostFunction
from .numerics import DEFAULT_TOL, Bracket, Tolerances, find_root, first_crossing, max_on_interval
from .strategy import AifStrategy

CLASSIFICATIONS = ("AIF0/AIF0", "AIF1/AIF1", "AIF1/AIF3", "AIF3/AIF1")


def theta_root(cost: CostFunction, rate: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Unique root of exp(-y)(1 - y) - y - psi'(y / rate) on [0, inf)."""
    unbounded = cost.with_cap(math.inf)
    h = lambda y: math.exp(-y) * (1 - y) - y - float(unbounded.psi_prime(y / rate))
    if h(0.0) <= 0:
        raise AssumptionViolation("psi'(0) must be below one")
    hi = 1.0
    while h(hi) > 0:  # h is strictly decreasing
        hi *= 2
    return find_root(h, Bracket.of(h, 0.0, hi), tol)


@dataclass(frozen=True)
class TwoPlayerGame:
    cap: float
    rate_1: float
    rate_2: float
    cost: CostFunction = field(default_factory=CostFunction.zero)

    def __post_init__(self):
        if not (self.cap > 0 and self.rate_1 > 0 and self.rate_2 > 0):
            raise ValueError("capacity and rates must be positive")
        object.__setattr__(self, "cost", self.cost.with_cap(self.cap))
        if float(self.cost.psi_prime(self.cap / 2)) >= 1:
            raise AssumptionViolation("psi'(c/2) must be below one")

    def rate(self, i: int) -> float:
        return {1: self.rate_1, 2: self.rate_2}[i]

    def opponent_rate(self, i: int) -> float:
        return self.rate(3 - i)

    def opponent_cdf(self, i: int, v):
        """F_{-i}(v) = 1 - exp(-lambda v); equals 1 at +inf."""
        return -np.expm1(-self.opponent_rate(i) * np.asarray(v, dtype=float))

    def _check(self, v):
        arr = np.asarray(v, dtype=float)
        if np.any(arr < 0) or np.any(arr > self.cap * (1 + 1e-12)):
            raise OutOfDomain(f"action outside [0, {self.cap}]")
        return arr

    def p_identity(self, i: int, v):
        v = self._check(v)
        lam, c = self.opponent_rate(i), self.cap
        out = v * (1 + np.exp(-lam * v) - np.exp(-lam * (c - v))) - self.cost.psi(v)
        return out if out.ndim else float(out)

    def p_identity_prime(self, i: int, v):
        v = self._check(v)
        lam, c = self.opponent_rate(i), self.cap
        a, b = np.exp(-lam * v), np.exp(-lam * (c - v))
        out = 1 + a - b - lam * v * (a + b) - self.cost.psi_prime(v)
        return out if out.ndim else float(out)

    def p_flat(self, i: int, v, tau: float):
        """Payoff of action v when the opponent is flat on [v, tau]."""
        v = self._check(v)
        if tau > self.cap * (1 + 1e-12) or np.any(v > tau * (1 + 1e-12)):
            raise OutOfDomain("flat payoff requires v <= tau <= c")
        lam, c = self.opponent_rate(i), self.cap
        upper = 0.0 if tau >= c else math.exp(-lam * tau)
        out = v * (1 + upper - np.exp(-lam * (c - v))) - self.cost.psi(v)
        return out if out.ndim else float(out)

    def p_flat_prime(self, i: int, v, tau: float):
        v = self._check(v)
        lam, c = self.opponent_rate(i), self.cap
        upper = 0.0 if tau >= c else math.exp(-lam * tau)
        out = 1 + upper - (1 + lam * v) * np.exp(-lam * (c - v)) - self.cost.psi_prime(v)
        return out if out.ndim else float(out)

    def success_probability(self, i: int, x, opponent: AifStrategy):
        """Probability that player i's request x is granted against opponent."""
        x = self._check(x)
        c = self.cap
        above = 1 - self.opponent_cdf(i, opponent.generalized_inverse(x))
        below = self.opponent_cdf(i, opponent.generalized_inverse(np.maximum(c - x, 0.0)))
        out = np.where(x <= c / 2, 1.0, above + below)
        return out if out.ndim else float(out)

    def payoff(self, i: int, x, opponent: AifStrategy):
        return x * self.success_probability(i, x, opponent) - self.cost.psi(x)

    def best_response_analytic(
        self, i: int, v: float, opponent: AifStrategy, tol: Tolerances = DEFAULT_TOL
    ) -> float:
        """argmax over [0, v] of x P(grant x) - psi(x).

        The payoff jumps at the opponent's switch points and their reflections
        c - tau, so each smooth piece is searched separately and breakpoints
        are evaluated exactly.
        """
        self._check(v)
        c = self.cap
        low = min(v, c / 2)  # x - psi(x) increases on [0, c/2]
        if v <= c / 2:
            return float(v)
        f = lambda x: self.payoff(i, x, opponent)
        knots = {c / 2, float(v)}
        for t in opponent.switch_points:
            knots.update(k for k in (t, c - t) if c / 2 < k < v)
        knots = sorted(knots)
        best_x, best_y = low, float(f(low))
        for a, b in zip(knots, knots[1:]):
            for x, y in [(a, float(f(a))), (b, float(f(b))), max_on_interval(f, a, b, tol)]:
                if y > best_y + tol.payoff_abs:
                    best_x, best_y = x, y
        return float(best_x)


@dataclass
class TwoPlayerSolution:
    theta: tuple  # per player
    v_star: tuple  # per player, None when p_identity has no interior maximum
    strategies: tuple  # (s_1, s_2)
    classification: str
    record_levels: dict

    def to_dict(self) -> dict:
        return {
            "theta": list(self.theta),
            "v_star": list(self.v_star),
            "classification": self.classification,
            "switch_points": [list(s.switch_points) for s in self.strategies],
            "record_levels": self.record_levels,
        }


def solve(game: TwoPlayerGame, tol: Tolerances = DEFAULT_TOL) -> TwoPlayerSolution:
    c = game.cap
    theta = tuple(theta_root(game.cost, game.opponent_rate(i), tol) for i in (1, 2))
    v_star: list[Optional[float]] = [None, None]
    for i in (1, 2):
        if game.opponent_rate(i) * c > theta[i - 1]:
            g = lambda v, i=i: game.p_identity_prime(i, v)
            v_star[i - 1] = find_root(g, Bracket.of(g, c / 2, c), tol)

    if v_star == [None, None]:
        strategies = (AifStrategy(c), AifStrategy(c))
        return TwoPlayerSolution(theta, tuple(v_star), strategies, "AIF0/AIF0", {})

    candidates = [i for i in (1, 2) if v_star[i - 1] is not None]
    i = min(candidates, key=lambda k: (v_star[k - 1], k))
    j = 3 - i
    vi = v_star[i - 1]
    s_i = AifStrategy(c, (vi,))
    record_j = game.p_identity(j, vi)
    levels = {f"player_{i}": [game.p_identity(i, vi)], f"player_{j}": [record_j]}

    flat = lambda v: game.p_flat(j, v, c)
    t3, sup_flat = max_on_interval(flat, vi, c, tol)
    if sup_flat <= record_j + tol.payoff_abs:
        s_j = AifStrategy(c, (vi,))
        label = "AIF1/AIF1"
    else:
        t2 = first_crossing(lambda v: flat(v) - record_j, vi, c, tol)
        dflat = lambda v: game.p_flat_prime(j, v, c)
        t3 = find_root(dflat, Bracket.of(dflat, t2, c), tol)
        s_j = AifStrategy(c, (vi, t2, t3))
        levels[f"player_{j}"].append(float(flat(t3)))
        label = "AIF1/AIF3" if i == 1 else "AIF3/AIF1"
    strategies = (s_i, s_j) if i == 1 else (s_j, s_i)
    return TwoPlayerSolution(theta, tuple(v_star), strategies, label, levels)


def payoff_curves(game: TwoPlayerGame, solution: TwoPlayerSolution, points: int = 401) -> dict:
    """Columns v, p_identity_{1,2}, p_flat_{1,2} (opponent flat to c), s_{1,2}."""
    v = np.linspace(0.0, game.cap, points)
    s1, s2 = solution.strategies
    return {
        "v": v,
        "p_identity_1": game.p_identity(1, v),
        "p_flat_1": game.p_flat(1, v, game.cap),
        "p_identity_2": game.p_identity(2, v),
        "p_flat_2": game.p_flat(2, v, game.cap),
        "s_1": s1.eval(v),
        "s_2": s2.eval(v),
    }
