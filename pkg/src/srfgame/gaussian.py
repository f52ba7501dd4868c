"""Gaussian mean-field equilibrium.

Opponents' total load is approximated by a normal with mean (n-1) mu and
standard deviation sqrt(n-1) sigma, where mu and sigma are the mean and
standard deviation of one opponent's request contributed by demand values up
to v. The equilibrium is built causally from v = 0 upward by an
identity/flat/chatter state machine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .errors import (
    AssumptionViolation,
    MarginalViolated,
    NoProgress,
    NonIncreasing,
    OutOfDomain,
)
from .model import CostFunction, DemandModel, validate_assumptions
from .numerics import (
    DEFAULT_TOL,
    Bracket,
    Tolerances,
    find_root,
    first_crossing,
    first_stationary_point,
    heun_step,
    max_on_interval,
)
from .strategy import AifStrategy, ChatteringStrategy, EquilibriumStrategy

W_CLAMP = 37.0
EPS_MARGINAL = 1e-6
PROBE_STEP = 1e-3
_INV_SQRT_2PI = 1 / math.sqrt(2 * math.pi)

IDENTITY, FLAT, CHATTER = "I", "F", "C"


def normal_pdf(w):
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(w))


@dataclass(frozen=True)
class GaussianGame:
    n: int
    cap_total: float
    demand: DemandModel
    cost: CostFunction = field(default_factory=CostFunction.zero)
    check_assumptions: bool = True

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two players")
        if not self.cap_total > 0:
            raise ValueError("capacity must be positive")
        object.__setattr__(self, "demand", self.demand.with_cap(self.cap_total))
        object.__setattr__(self, "cost", self.cost.with_cap(self.cap_total))
        # any strategy with s(v) <= v loads at most the mean demand, so c >= E[V]
        # guarantees a positive slack c - mu(inf) for every non-identity strategy
        if self.per_capita < self.demand.mean() * (1 - 1e-12):
            raise AssumptionViolation(
                f"per-capita capacity {self.per_capita} is below mean demand {self.demand.mean()}"
            )
        if self.check_assumptions:
            report = validate_assumptions(self.cost, self.demand, marginal_at=0.0)
            if not report.ok:
                raise AssumptionViolation(f"assumption checks failed: {report.failed()}")

    @property
    def per_capita(self) -> float:
        return self.cap_total / self.n

    @property
    def root_n1(self) -> float:
        return math.sqrt(self.n - 1)

    def z_score(self, action, mu, sigma):
        """Standardized slack (c_n - action - (n-1) mu) / (sqrt(n-1) sigma), clamped."""
        num = self.cap_total - np.asarray(action, float) - (self.n - 1) * np.asarray(mu, float)
        den = self.root_n1 * np.asarray(sigma, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.sign(num) * W_CLAMP)
        return np.clip(w, -W_CLAMP, W_CLAMP)

    def payoff(self, action, mu, sigma):
        action = np.asarray(action, float)
        return action * ndtr(self.z_score(action, mu, sigma)) - self.cost.psi(action)


@dataclass(frozen=True)
class Prefix:
    """Frozen integrals of s f and s**2 f over [0, end] for the realized strategy."""

    end: float = 0.0
    m1: float = 0.0
    m2: float = 0.0

    def extend_identity(self, game: GaussianGame, v: float) -> "Prefix":
        d = game.demand
        return Prefix(
            v,
            self.m1 + float(d.partial_moment1(v) - d.partial_moment1(self.end)),
            self.m2 + float(d.partial_moment2(v) - d.partial_moment2(self.end)),
        )

    def extend_flat(self, game: GaussianGame, level: float, v: float, share: float = 1.0) -> "Prefix":
        mass = share * float(game.demand.cdf(v) - game.demand.cdf(self.end))
        return Prefix(v, self.m1 + level * mass, self.m2 + level**2 * mass)

    def sigma(self) -> float:
        return math.sqrt(max(self.m2 - self.m1**2, 0.0))


def _raw_identity(game, prefix, v):
    d = game.demand
    m1 = prefix.m1 + d.partial_moment1(v) - d.partial_moment1(prefix.end)
    m2 = prefix.m2 + d.partial_moment2(v) - d.partial_moment2(prefix.end)
    return np.asarray(m1, float), np.asarray(m2, float)


def _raw_flat(game, prefix, level, v, share):
    mass = share * (game.demand.cdf(v) - game.demand.cdf(prefix.end))
    return prefix.m1 + level * np.asarray(mass, float), prefix.m2 + level**2 * np.asarray(mass, float)


def _sigma(m1, m2):
    return np.sqrt(np.maximum(m2 - m1**2, 0.0))


def _check_v(prefix: Prefix, v, cap: float):
    arr = np.asarray(v, float)
    if np.any(arr < prefix.end - 1e-12 * max(1, cap)) or np.any(arr > cap * (1 + 1e-12)):
        raise OutOfDomain(f"v outside [{prefix.end}, {cap}]")
    return arr


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def moments_identity(game: GaussianGame, prefix: Prefix, v):
    """(mu, sigma) when the strategy is the identity on [prefix.end, v]."""
    arr = _check_v(prefix, v, game.cap_total)
    m1, m2 = _raw_identity(game, prefix, arr)
    return _out(m1, v), _out(_sigma(m1, m2), v)


def moments_flat_contingent(game: GaussianGame, prefix: Prefix, level: float, v, share: float = 0.5):
    """(mu, sigma) while a flat interval at `level` that began at prefix.end is still open.

    Only half of the newly covered mass counts, since the flat interval's
    eventual endpoint is still undetermined.
    """
    arr = _check_v(prefix, v, game.cap_total)
    m1, m2 = _raw_flat(game, prefix, level, arr, share)
    return _out(m1, v), _out(_sigma(m1, m2), v)


def _mode_terms(game, prefix, mode, v, level, share):
    """action, action', m1, m1', m2' for the current mode at v."""
    f = game.demand.pdf(v)
    if mode == IDENTITY:
        m1, m2 = _raw_identity(game, prefix, v)
        return v, 1.0, m1, m2, v * f, v * v * f
    m1, m2 = _raw_flat(game, prefix, level, v, share)
    return np.full_like(v, level), 0.0, m1, m2, share * level * f, share * level**2 * f


def w_and_p(game: GaussianGame, prefix: Prefix, mode: str, v, level: Optional[float] = None, share: float = 0.5):
    """z-score and unconstrained payoff in identity (own action v) or flat (own action level) mode."""
    arr = _check_v(prefix, v, game.cap_total)
    action, _, m1, m2, _, _ = _mode_terms(game, prefix, mode, arr, level, share)
    w = game.z_score(action, m1, _sigma(m1, m2))
    p = action * ndtr(w) - game.cost.psi(action)
    return _out(w, v), _out(p, v)


def payoff_derivative(game: GaussianGame, prefix: Prefix, mode: str, v, level: Optional[float] = None, share: float = 0.5):
    """Analytic dp/dv from closed-form moment derivatives."""
    arr = _check_v(prefix, v, game.cap_total)
    action, da, m1, m2, dm1, dm2 = _mode_terms(game, prefix, mode, arr, level, share)
    sigma = _sigma(m1, m2)
    w = game.z_score(action, m1, sigma)
    num = game.cap_total - action - (game.n - 1) * m1
    den = game.root_n1 * sigma
    dnum = -da - (game.n - 1) * dm1
    with np.errstate(divide="ignore", invalid="ignore"):
        dsigma = np.where(sigma > 0, (dm2 - 2 * m1 * dm1) / (2 * np.where(sigma > 0, sigma, 1.0)), 0.0)
        dw = np.where(den > 0, (dnum * den - num * game.root_n1 * dsigma) / np.where(den > 0, den, 1.0) ** 2, 0.0)
    clamped = np.abs(w) >= W_CLAMP
    dw = np.where(clamped, 0.0, dw)
    dp = da * (ndtr(w) - game.cost.psi_prime(action)) + action * normal_pdf(w) * dw
    return _out(dp, v)


@dataclass(frozen=True)
class ConflictCheck:
    side: str
    tau: float
    next_mode: str
    dp_identity: float  # one-sided derivative of the identity continuation at tau
    dp_flat: float  # one-sided derivative of the flat continuation at tau
    probe_identity: float  # the same derivatives at tau + PROBE_STEP
    probe_flat: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def detect_conflict(
    game: GaussianGame, prefix: Prefix, tau: float, side: str, level: Optional[float] = None
) -> ConflictCheck:
    """Next mode at a switch point from one-sided payoff slopes.

    side="end_of_identity": prefix holds the identity stage (ending before tau);
    the flat continuation starts at level tau. side="end_of_flat": prefix holds
    the flat stage at `level`; the identity continuation resumes at tau.
    """
    probe = min(tau + PROBE_STEP, game.cap_total)
    if side == "end_of_identity":
        closed = prefix.extend_identity(game, tau)
        d_id = lambda v: payoff_derivative(game, prefix, IDENTITY, v)
        d_fl = lambda v: payoff_derivative(game, closed, FLAT, v, tau)
        dp_i, dp_f = d_id(tau), d_fl(tau)
        nxt = FLAT if dp_f < 0 else CHATTER
    elif side == "end_of_flat":
        closed = prefix.extend_flat(game, level, tau)
        d_id = lambda v: payoff_derivative(game, closed, IDENTITY, v)
        d_fl = lambda v: payoff_derivative(game, prefix, FLAT, v, level)
        dp_i, dp_f = d_id(tau), d_fl(tau)
        nxt = IDENTITY if dp_i > 0 else CHATTER
    else:
        raise ValueError(f"unknown side {side!r}")
    return ConflictCheck(side, tau, nxt, dp_i, dp_f, d_id(probe), d_fl(probe))


# ---------------------------------------------------------------- chattering


@dataclass(frozen=True)
class ChatterState:
    v: float
    eta: float
    mu: float
    sigma: float

    @classmethod
    def at_entry(cls, prefix: Prefix) -> "ChatterState":
        return cls(prefix.end, prefix.end, prefix.m1, prefix.sigma())


class _Arc:
    """Right-hand side of the singular-arc system in (eta, m1, m2)."""

    def __init__(self, game: GaussianGame, sigma_form: str = "derived"):
        if sigma_form not in ("derived", "literal"):
            raise ValueError("sigma_form must be 'derived' or 'literal'")
        self.game = game
        self.literal = sigma_form == "literal"

    def terms(self, v: float, eta: float, m1: float, m2: float):
        """(w, slope, margin) with slope = d eta / dv and margin = Phi(w) - psi'(eta)."""
        g = self.game
        sigma = math.sqrt(max(m2 - m1 * m1, 0.0))
        den = g.root_n1 * sigma
        num = g.cap_total - eta - (g.n - 1) * m1
        w = float(g.z_score(eta, m1, sigma))
        phi = float(normal_pdf(w))
        margin = float(ndtr(w)) - float(g.cost.psi_prime(min(eta, g.cap_total)))
        if den <= 0:
            return w, 1.0, margin
        dm1 = eta * float(g.demand.pdf(v))
        own = v if self.literal else eta
        dsigma = (own - 2 * m1) * dm1 / (2 * sigma)
        load = (-(g.n - 1) * dm1 * den - num * g.root_n1 * dsigma) / den**2
        b = margin - eta * phi / den
        if b == 0:
            return w, math.inf, margin
        return w, -eta * phi * load / b, margin

    def rhs(self, v: float, y: np.ndarray) -> np.ndarray:
        eta, m1, m2 = y
        f = float(self.game.demand.pdf(v))
        _, slope, _ = self.terms(v, eta, m1, m2)
        return np.array([slope, eta * f, eta * eta * f])

    def sustained(self, eta: float, m1: float, m2: float) -> float:
        g = self.game
        sigma = math.sqrt(max(m2 - m1 * m1, 0.0))
        return float(g.payoff(eta, m1, sigma))


def _resolve_eta(arc: _Arc, target: float, guess: float, m1: float, m2: float, lo: float, hi: float, tol) -> Optional[float]:
    """Root of the sustaining equation in eta nearest to guess, within [lo, hi]."""
    s = lambda e: arc.sustained(e, m1, m2) - target
    s0 = s(guess)
    if s0 == 0:
        return guess
    d = max(1e-9 * max(abs(guess), 1.0), 1e-12)
    while d < hi - lo + 1:
        a, b = max(guess - d, lo), min(guess + d, hi)
        sa, sb = s(a), s(b)
        if s0 * sb <= 0:
            return find_root(s, Bracket(guess, b, s0, sb), tol) if b > guess else guess
        if s0 * sa <= 0:
            return find_root(s, Bracket(a, guess, sa, s0), tol) if a < guess else guess
        d *= 4
    return None


def chattering_ode(
    game: GaussianGame,
    entry: float,
    p_star: float,
    state0: ChatterState,
    step: Optional[float] = None,
    v_end: Optional[float] = None,
    sigma_form: str = "derived",
    tol: Tolerances = DEFAULT_TOL,
) -> ChatteringStrategy:
    """Integrate the singular arc that holds eta Phi(w) - psi(eta) at p_star.

    The slope follows from differentiating the sustaining equation; moments are
    advanced with Heun steps and eta is re-solved from the sustaining equation
    after every step. The arc exits when its slope is no longer positive, when
    the marginal gain Phi(w) - psi'(eta) reaches EPS_MARGINAL, when eta would
    overtake v, or at v_end.
    """
    v_end = game.cap_total if v_end is None else v_end
    if step is None:
        step = tol.ode_step * (v_end - entry)
    arc = _Arc(game, sigma_form)
    v = entry
    y = np.array([state0.eta, state0.mu, state0.sigma**2 + state0.mu**2])
    _, slope, margin = arc.terms(v, *y)
    if margin <= EPS_MARGINAL:
        raise MarginalViolated(f"Phi(w) - psi'(eta) = {margin} at entry {entry}")
    if not slope > 0:
        raise NonIncreasing(f"entry slope {slope} at {entry}")
    vs, etas, mus, sigmas, res, slopes = [v], [y[0]], [y[1]], [state0.sigma], [arc.sustained(*y) - p_star], [slope]
    reason = "capacity"
    entry_step_slope = math.nan
    while v < v_end - 1e-12 * max(1.0, v_end):
        h = min(step, v_end - v)
        nxt = heun_step(arc.rhs, v, y, h)
        eta = _resolve_eta(arc, p_star, nxt[0], nxt[1], nxt[2], y[0], v + h + step, tol)
        if eta is None:
            reason = "unsustainable"
            break
        if len(vs) == 1:
            entry_step_slope = (eta - y[0]) / h
        nxt[0] = eta
        if eta > v + h:
            reason = "identity_bound"
            break
        if eta <= y[0]:
            reason = "slope_nonpositive"
            break
        v += h
        y = nxt
        _, slope, margin = arc.terms(v, *y)
        vs.append(v)
        etas.append(y[0])
        mus.append(y[1])
        sigmas.append(math.sqrt(max(y[2] - y[1] ** 2, 0.0)))
        res.append(arc.sustained(*y) - p_star)
        slopes.append(slope)
        if not slope > 0:
            reason = "slope_nonpositive"
            break
        if margin <= EPS_MARGINAL:
            reason = "marginal"
            break
    diag = {
        "mu": np.array(mus), "sigma": np.array(sigmas), "residual": np.array(res),
        "slope": np.array(slopes), "p_star": p_star, "step": step,
        "entry_step_slope": entry_step_slope,
    }
    return ChatteringStrategy(entry, vs[-1], np.array(vs), np.array(etas), reason, diag)


def chattering_constructive(
    game: GaussianGame,
    entry: float,
    p_star: float,
    m: int,
    state0: ChatterState,
    v_end: float,
    sigma_form: str = "derived",
) -> ChatteringStrategy:
    """Piecewise-linear approximation eta_m with m cells on [entry, v_end].

    In cell j the function holds flat for a fraction 1 - rho_j of the cell and
    then rises with unit slope, so its mean slope is the target rho_j taken
    from the state at the cell's left edge. Moments advance by forward Euler.
    p_star is recorded for reference; the construction itself only uses the
    slope field.
    """
    if not v_end > entry:
        raise ValueError("v_end must exceed the entry point")
    arc = _Arc(game, sigma_form)
    delta = (v_end - entry) / m
    eta, m1, m2 = state0.eta, state0.mu, state0.sigma**2 + state0.mu**2
    pts = [(entry, eta)]
    reason = "capacity"
    for j in range(m):
        v = entry + j * delta
        _, rho, margin = arc.terms(v, eta, m1, m2)
        if j == 0:
            if margin <= EPS_MARGINAL:
                raise MarginalViolated(f"Phi(w) - psi'(eta) = {margin} at entry {entry}")
            if not rho > 0:
                raise NonIncreasing(f"entry slope {rho} at {entry}")
        elif not rho > 0:
            reason = "slope_nonpositive"
            break
        if rho > 1:
            rho, reason = 1.0, "identity_bound"
        f = float(game.demand.pdf(v))
        m1, m2 = m1 + eta * f * delta, m2 + eta * eta * f * delta
        knee = v + (1 - rho) * delta
        if entry < knee < v + delta and knee > pts[-1][0]:
            pts.append((knee, eta))
        eta = eta + rho * delta
        pts.append((v + delta, eta))
        if reason == "identity_bound":
            break
    arr = np.array(pts)
    return ChatteringStrategy(entry, arr[-1, 0], arr[:, 0], arr[:, 1], reason, {"p_star": p_star, "m": m})


# ---------------------------------------------------------------- solver


@dataclass
class RegimeTrace:
    segments: list = field(default_factory=list)  # {"mode", "start", "end"}
    switch_points: list = field(default_factory=list)
    record_highs: list = field(default_factory=list)
    flat_suprema: list = field(default_factory=list)
    conflicts: list = field(default_factory=list)
    prefixes: list = field(default_factory=list)  # identity-stage prefix per k
    chattering: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "segments": self.segments,
            "switch_points": self.switch_points,
            "record_highs": self.record_highs,
            "flat_suprema": self.flat_suprema,
            "conflicts": [c.to_dict() for c in self.conflicts],
            "chattering": self.chattering,
        }


def solve_gaussian(
    game: GaussianGame,
    tol: Tolerances = DEFAULT_TOL,
    sigma_form: str = "derived",
    max_stages: int = 100,
) -> tuple[EquilibriumStrategy, RegimeTrace]:
    """Causal identity/flat/chatter construction of the equilibrium strategy."""
    cap = game.cap_total
    trace = RegimeTrace()
    prefix = Prefix()
    start = 0.0
    entry: Optional[tuple] = None  # (tau, p_star, prefix at tau)

    for _ in range(max_stages):
        trace.prefixes.append(prefix)
        p_id = lambda v, pre=prefix: w_and_p(game, pre, IDENTITY, v)[1]
        dp_id = lambda v, pre=prefix: payoff_derivative(game, pre, IDENTITY, v)
        tau = first_stationary_point(p_id, start, cap, tol, dp_id)
        if tau is None:
            trace.segments.append({"mode": IDENTITY, "start": start, "end": cap})
            break
        if tau <= start and start > 0:
            raise NoProgress(f"identity stage at {start} does not advance")
        record = float(p_id(tau))
        trace.segments.append({"mode": IDENTITY, "start": start, "end": tau})
        trace.switch_points.append(tau)
        trace.record_highs.append(record)
        check = detect_conflict(game, prefix, tau, "end_of_identity")
        trace.conflicts.append(check)
        closed = prefix.extend_identity(game, tau)
        if check.next_mode == CHATTER:
            entry = (tau, record, closed)
            break

        level = tau
        p_fl = lambda v, pre=closed: w_and_p(game, pre, FLAT, v, level)[1]
        _, sup_flat = max_on_interval(p_fl, tau, cap, tol)
        trace.flat_suprema.append(sup_flat)
        if sup_flat <= record + tol.payoff_abs:
            trace.segments.append({"mode": FLAT, "start": tau, "end": cap})
            break
        end = first_crossing(lambda v: p_fl(v) - record, tau, cap, tol)
        if end is None or end - tau < tol.grid_step * (cap - tau):
            raise NoProgress(f"flat stage at {tau} does not advance")
        trace.segments.append({"mode": FLAT, "start": tau, "end": end})
        trace.switch_points.append(end)
        check = detect_conflict(game, closed, end, "end_of_flat", level)
        trace.conflicts.append(check)
        prefix = closed.extend_flat(game, level, end)
        start = end
        if check.next_mode == CHATTER:
            entry = (end, float(w_and_p(game, prefix, IDENTITY, end)[1]), prefix)
            break
    else:
        raise NoProgress(f"no termination after {max_stages} stages")

    if entry is None:
        points = [t for t in trace.switch_points if t < cap]
        return EquilibriumStrategy(AifStrategy(cap, tuple(points))), trace

    tau, p_star, pre = entry
    arc = chattering_ode(game, tau, p_star, ChatterState.at_entry(pre), sigma_form=sigma_form, tol=tol)
    trace.segments.append({"mode": CHATTER, "start": tau, "end": arc.exit})
    trace.segments.append({"mode": FLAT, "start": arc.exit, "end": cap})
    trace.chattering = {
        "entry": tau, "exit": arc.exit, "exit_reason": arc.exit_reason,
        "p_star": p_star, "terminal_flat": float(arc.eta[-1]),
    }
    prefix_points = tuple(t for t in trace.switch_points if t < tau)
    return EquilibriumStrategy(AifStrategy(cap, prefix_points), arc, float(arc.eta[-1])), trace


# ---------------------------------------------------------------- diagnostics


def strategy_moments(game: GaussianGame, strategy: EquilibriumStrategy, v) -> tuple[np.ndarray, np.ndarray]:
    """Raw integrals of s f and s**2 f over [0, v] for a composite strategy."""
    v = np.atleast_1d(np.asarray(v, float))
    d = game.demand
    m1 = np.zeros_like(v)
    m2 = np.zeros_like(v)
    sp = list(strategy.switch_points)
    ch = strategy.chattering
    limit = ch.entry if ch is not None else game.cap_total
    bounds = [0.0] + [t for t in sp if t < limit] + [limit]
    for j, (a, b) in enumerate(zip(bounds, bounds[1:])):
        hi = np.clip(v, a, b)
        if j % 2 == 0:
            m1 += d.partial_moment1(hi) - d.partial_moment1(a)
            m2 += d.partial_moment2(hi) - d.partial_moment2(a)
        else:
            mass = d.cdf(hi) - d.cdf(a)
            m1 += bounds[j] * mass
            m2 += bounds[j] ** 2 * mass
    if ch is not None:
        grid = ch.v
        f = d.pdf(grid)
        c1 = np.r_[0.0, np.cumsum(0.5 * np.diff(grid) * (ch.eta[1:] * f[1:] + ch.eta[:-1] * f[:-1]))]
        c2 = np.r_[0.0, np.cumsum(0.5 * np.diff(grid) * (ch.eta[1:] ** 2 * f[1:] + ch.eta[:-1] ** 2 * f[:-1]))]
        inside = np.clip(v, ch.entry, ch.exit)
        m1 += np.interp(inside, grid, c1)
        m2 += np.interp(inside, grid, c2)
        level = strategy.terminal_flat
        mass = d.cdf(np.clip(v, ch.exit, game.cap_total)) - d.cdf(ch.exit)
        m1 += level * mass
        m2 += level**2 * mass
    return m1, m2


@dataclass
class ZScoreReport:
    v_tilde: Optional[float]
    w_nonincreasing: bool
    phi_nonincreasing: bool
    first_w_increase: Optional[float]
    sup_strategy: float
    margin_to_capacity: float
    load_slack: float  # c - mu(inf) for the strategy

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def z_score_diagnostics(game: GaussianGame, strategy: EquilibriumStrategy, points: int = 10_000) -> ZScoreReport:
    v = np.linspace(0.0, game.cap_total, points)
    m1, m2 = strategy_moments(game, strategy, v)
    s = strategy.eval(v)
    num = game.cap_total - s - (game.n - 1) * m1
    w = game.z_score(s, m1, _sigma(m1, m2))
    phi = ndtr(w)
    slack = 1e-9
    up = np.flatnonzero(np.diff(w) > slack)
    v_tilde = None
    cross = np.flatnonzero((num[:-1] > 0) & (num[1:] <= 0))
    if cross.size:
        i = int(cross[0])
        def g(x):
            a, b = strategy_moments(game, strategy, x)
            return float(game.cap_total - strategy.eval(x) - (game.n - 1) * a[0])
        v_tilde = find_root(g, Bracket(v[i], v[i + 1], num[i], num[i + 1]))
    sup = float(np.max(s))
    return ZScoreReport(
        v_tilde,
        up.size == 0,
        bool(np.all(np.diff(phi) <= slack)),
        None if up.size == 0 else float(v[up[0]]),
        sup,
        game.cap_total - sup,
        game.per_capita - float(m1[-1]) - float(strategy.eval(game.cap_total)) * game.demand.atom_at_cap,
    )


def curves(game: GaussianGame, strategy: EquilibriumStrategy, trace: RegimeTrace, points: int = 2001) -> dict:
    """Columns v, s, w, Phi(w), p_I, p_F, p_eta for plotting."""
    v = np.linspace(0.0, game.cap_total, points)
    m1, m2 = strategy_moments(game, strategy, v)
    sigma = _sigma(m1, m2)
    s = strategy.eval(v)
    w = game.z_score(s, m1, sigma)
    p_identity = game.payoff(v, m1, sigma)
    p_flat = np.full_like(v, np.nan)
    p_eta = np.full_like(v, np.nan)
    pre_iter = iter(trace.prefixes)
    for seg in trace.segments:
        mask = (v >= seg["start"]) & (v <= seg["end"])
        if seg["mode"] == IDENTITY:
            pre = next(pre_iter, None)
        elif seg["mode"] == FLAT and pre is not None and seg["start"] in trace.switch_points:
            closed = pre.extend_identity(game, seg["start"])
            p_flat[mask] = w_and_p(game, closed, FLAT, v[mask], seg["start"])[1]
        elif seg["mode"] == CHATTER:
            p_eta[mask] = game.payoff(s[mask], m1[mask], sigma[mask])
    return {"v": v, "s": s, "w": w, "Phi": ndtr(w), "p_I": p_identity, "p_F": p_flat, "p_eta": p_eta}
