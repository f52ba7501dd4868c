"""Monte Carlo simulation of smallest-request-first, all-or-nothing granting."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import OutOfDomain
from .gaussian import GaussianGame
from .model import CostFunction, DemandModel
from .strategy import AifStrategy, EquilibriumStrategy, StrategyLike
from .two_player import TwoPlayerGame

BLOCK = 1024  # replications per random stream
TIE_RULES = ("random", "probe_first", "probe_last")


@dataclass(frozen=True)
class AllocationOutcome:
    granted: np.ndarray
    granted_amounts: np.ndarray
    leftover: float


def allocate(requests: Sequence[float], cap_total: float, rng: Optional[np.random.Generator] = None) -> AllocationOutcome:
    """Grant requests smallest first while they fit; ties are broken uniformly at random."""
    req = np.asarray(requests, dtype=float)
    if np.any(req < 0) or np.any(req > cap_total) or np.any(np.isnan(req)):
        raise OutOfDomain("requests must lie in [0, cap_total]")
    rng = np.random.default_rng() if rng is None else rng
    perm = rng.permutation(req.size)
    order = perm[np.argsort(req[perm], kind="stable")]
    fits = np.logical_and.accumulate(np.cumsum(req[order]) <= cap_total)
    granted = np.zeros(req.size, dtype=bool)
    granted[order] = fits
    amounts = np.where(granted, req, 0.0)
    return AllocationOutcome(granted, amounts, float(cap_total - amounts.sum()))


def allocate_batch(requests: np.ndarray, cap_total: float, rng: np.random.Generator) -> np.ndarray:
    """Row-wise allocate for a (runs, players) array; returns the granted mask."""
    req = np.asarray(requests, dtype=float)
    keys = rng.random(req.shape)
    order = np.lexsort((keys, req), axis=-1)
    ranked = np.take_along_axis(req, order, axis=-1)
    fits = np.logical_and.accumulate(np.cumsum(ranked, axis=-1) <= cap_total, axis=-1)
    granted = np.empty_like(fits)
    np.put_along_axis(granted, order, fits, axis=-1)
    return granted


@dataclass(frozen=True)
class SimGame:
    """Player count, capacity, per-player demand models and the request cost."""

    cap_total: float
    demands: tuple
    cost: CostFunction = field(default_factory=CostFunction.zero)

    def __post_init__(self):
        object.__setattr__(self, "demands", tuple(d.with_cap(self.cap_total) for d in self.demands))
        object.__setattr__(self, "cost", self.cost.with_cap(self.cap_total))
        if len(self.demands) < 2:
            raise ValueError("need at least two players")

    @property
    def n(self) -> int:
        return len(self.demands)

    @property
    def symmetric(self) -> bool:
        return all(d == self.demands[0] for d in self.demands)

    @classmethod
    def from_two_player(cls, game: TwoPlayerGame) -> "SimGame":
        return cls(game.cap, (DemandModel.exponential(game.rate_1), DemandModel.exponential(game.rate_2)), game.cost)

    @classmethod
    def from_gaussian(cls, game: GaussianGame) -> "SimGame":
        return cls(game.cap_total, (game.demand,) * game.n, game.cost)


def _streams(seed: int, replications: int):
    """(block index, size, generator) with one counter-based stream per block."""
    root = np.random.SeedSequence(seed)
    for b in range(math.ceil(replications / BLOCK)):
        size = min(BLOCK, replications - b * BLOCK)
        ss = np.random.SeedSequence(root.entropy, spawn_key=(b,))
        yield size, np.random.Generator(np.random.Philox(ss))


def _profile(profile, n: int) -> list[EquilibriumStrategy]:
    if isinstance(profile, (AifStrategy, EquilibriumStrategy)):
        return [EquilibriumStrategy.of(profile)] * n
    strategies = [EquilibriumStrategy.of(s) for s in profile]
    if len(strategies) == 1:
        return strategies * n
    if len(strategies) != n:
        raise ValueError(f"profile has {len(strategies)} strategies for {n} players")
    return strategies


def simulate_grants(
    actions: np.ndarray,
    profile,
    game: SimGame,
    replications: int,
    seed: int,
    probe: int = 0,
    tie_rule: str = "random",
) -> np.ndarray:
    """Boolean (replications, len(actions)) matrix: is the probe's request granted.

    All actions share the same opponent draws (common random numbers).
    """
    if tie_rule not in TIE_RULES:
        raise ValueError(f"tie_rule must be one of {TIE_RULES}")
    actions = np.asarray(actions, dtype=float)
    if np.any(actions < 0) or np.any(actions > game.cap_total * (1 + 1e-12)):
        raise OutOfDomain("actions must lie in [0, cap_total]")
    strategies = _profile(profile, game.n)
    others = [j for j in range(game.n) if j != probe]
    out = []
    for size, rng in _streams(seed, replications):
        if game.symmetric:
            vals = game.demands[others[0]].sample(rng, (size, len(others)))
            req = strategies[others[0]].eval(vals) if len(set(map(id, (strategies[j] for j in others)))) == 1 \
                else np.column_stack([strategies[j].eval(vals[:, k]) for k, j in enumerate(others)])
        else:
            req = np.column_stack([strategies[j].eval(game.demands[j].sample(rng, size)) for j in others])
        req = np.sort(req.reshape(size, len(others)), axis=1)
        load = np.concatenate([np.zeros((size, 1)), np.cumsum(req, axis=1)], axis=1)
        u = rng.random(size)
        rows = np.arange(size)
        block = np.empty((size, actions.size), dtype=bool)
        for a, x in enumerate(actions):
            below = np.count_nonzero(req < x, axis=1)
            if tie_rule == "probe_first":
                ahead = below
            else:
                ties = np.count_nonzero(req == x, axis=1)
                ahead = below + (ties if tie_rule == "probe_last" else np.floor(u * (ties + 1)).astype(int))
            block[:, a] = load[rows, ahead] + x <= game.cap_total
        out.append(block)
    return np.concatenate(out, axis=0)


def empirical_success(
    x: float, others, game: SimGame, replications: int, seed: int, probe: int = 0, tie_rule: str = "random"
) -> tuple[float, float]:
    """Fraction of replications granting request x, with its standard error."""
    g = simulate_grants(np.array([x]), others, game, replications, seed, probe, tie_rule)[:, 0]
    p = float(g.mean())
    return p, float(math.sqrt(p * (1 - p) / replications))


def action_grid(v: float, step: float) -> np.ndarray:
    k = int(math.floor(v / step + 1e-9))
    return np.arange(k + 1) * step


def best_response_oracle(
    v: float,
    others,
    game: SimGame,
    action_grid_step: float,
    replications: int,
    seed: int,
    probe: int = 0,
    tie_rule: str = "random",
) -> tuple[float, float]:
    """Grid argmax over x in [0, v] of x P(grant x) - psi(x)."""
    xs = action_grid(v, action_grid_step)
    g = simulate_grants(xs, others, game, replications, seed, probe, tie_rule)
    payoff = xs * g.mean(axis=0) - game.cost.psi(xs)
    i = int(np.argmax(payoff))
    return float(xs[i]), float(payoff[i])


@dataclass
class GapCertificate:
    value_grid: list
    player: list
    strategy_payoff: list
    oracle_payoff: list
    oracle_argmax: list
    std_error: list
    replications: int
    seed: int
    tie_rule: str = "random"

    @property
    def gaps(self) -> np.ndarray:
        return np.asarray(self.oracle_payoff) - np.asarray(self.strategy_payoff)

    @property
    def worst_index(self) -> int:
        return int(np.argmax(self.gaps))

    @property
    def worst_gap(self) -> float:
        return float(self.gaps[self.worst_index])

    @property
    def worst_std_error(self) -> float:
        return float(self.std_error[self.worst_index])

    def passes(self, epsilon: float = 0.02, k: float = 4.0) -> bool:
        return self.worst_gap <= max(epsilon, k * self.worst_std_error)

    def to_dict(self) -> dict:
        return {
            "worst_gap": self.worst_gap,
            "worst_std_error": self.worst_std_error,
            "worst_value": self.value_grid[self.worst_index],
            "replications": self.replications,
            "seed": self.seed,
            "tie_rule": self.tie_rule,
            "points": self.rows(),
        }

    def rows(self) -> list[dict]:
        return [
            {"player": p, "v": v, "strategy_payoff": s, "oracle_payoff": o, "oracle_argmax": a, "std_error": e}
            for p, v, s, o, a, e in zip(self.player, self.value_grid, self.strategy_payoff,
                                       self.oracle_payoff, self.oracle_argmax, self.std_error)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# srfgame gap-certificate v1\n")
        writer = csv.DictWriter(buf, ["player", "v", "strategy_payoff", "oracle_payoff", "oracle_argmax", "std_error"])
        writer.writeheader()
        writer.writerows(self.rows())
        return buf.getvalue()


def certify_equilibrium(
    profile,
    game: SimGame,
    grid: int = 50,
    replications: int = 100_000,
    seed: int = 0,
    action_step: Optional[float] = None,
    tie_rule: str = "random",
    probes: Optional[Sequence[int]] = None,
) -> GapCertificate:
    """Brute-force best-response gaps over a value grid for each probe player.

    The probe's own payoff at value v is min(x, v) P(grant x) - psi(x); the
    oracle maximizes it over grid actions in [0, v] with the same opponent
    draws used for the strategy's action, and the standard error is that of
    the paired per-replication difference.
    """
    strategies = _profile(profile, game.n)
    if probes is None:
        probes = [0] if game.symmetric and len({id(s) for s in strategies}) == 1 else list(range(game.n))
        if game.n > 2 and not game.symmetric:
            raise ValueError("asymmetric games with more than two players need explicit probes")
    step = 0.01 * game.cap_total if action_step is None else action_step
    values = np.linspace(game.cap_total / grid, game.cap_total, grid)
    xs = action_grid(game.cap_total, step)
    cert = GapCertificate([], [], [], [], [], [], replications, seed, tie_rule)
    for probe in probes:
        own = strategies[probe].eval(values)
        acts = np.concatenate([xs, own])
        g = simulate_grants(acts, strategies, game, replications, seed, probe, tie_rule)
        per_rep = acts * g - game.cost.psi(acts)
        means = per_rep.mean(axis=0)
        for k, v in enumerate(values):
            allowed = np.flatnonzero(xs <= v + 1e-12)
            best = allowed[int(np.argmax(means[allowed]))]
            s_col = xs.size + k
            diff = per_rep[:, best] - per_rep[:, s_col]
            cert.value_grid.append(float(v))
            cert.player.append(probe + 1)
            cert.strategy_payoff.append(float(means[s_col]))
            cert.oracle_payoff.append(float(means[best]))
            cert.oracle_argmax.append(float(xs[best]))
            cert.std_error.append(float(diff.std(ddof=1) / math.sqrt(replications)) if replications > 1 else math.inf)
    return cert


def shift_switch_points(s: StrategyLike, delta: float) -> EquilibriumStrategy:
    """Negative-control profile: every switch point moved by delta (clipped below cap)."""
    s = EquilibriumStrategy.of(s)
    cap = s.cap
    moved = tuple(min(t + delta, cap * (1 - 1e-9)) for t in s.switch_points)
    return EquilibriumStrategy(AifStrategy(cap, moved))


def empirical_load(strategy: StrategyLike, demand: DemandModel, n: int, v_grid: np.ndarray, seed: int) -> np.ndarray:
    """(1/(n-1)) sum_j s(V_j) 1(V_j <= v) for one sample of n-1 demands."""
    rng = np.random.default_rng(seed)
    vals = np.sort(demand.sample(rng, n - 1))
    req = EquilibriumStrategy.of(strategy).eval(np.minimum(vals, EquilibriumStrategy.of(strategy).cap))
    cum = np.r_[0.0, np.cumsum(req)]
    return cum[np.searchsorted(vals, v_grid, side="right")] / (n - 1)
