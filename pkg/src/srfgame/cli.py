"""Command-line front end: solve, simulate, certify and emit curves."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import fluid, gaussian, sim, two_player
from .errors import ConfigError, SrfError
from .model import CostFunction, DemandModel
from .numerics import Tolerances
from .strategy import EquilibriumStrategy, load_profile, save_profile, save_strategy

log = logging.getLogger("srfgame")

CSV_VERSION = "srfgame-curves v1"
MODES = {"solve2p": "two_player", "fluid": "fluid", "gaussian": "gaussian",
         "simulate": "simulate", "certify": "certify", "curves": "curves"}


@dataclasses.dataclass
class GameConfig:
    mode: str
    capacity: float
    game: str = "gaussian"  # two_player or gaussian; used by simulate, certify and curves
    n: Optional[int] = None
    rates: Optional[list] = None
    demand: dict = dataclasses.field(default_factory=lambda: {"family": "exponential", "rate": 1.0})
    cost: dict = dataclasses.field(default_factory=lambda: {"kind": "zero"})
    tolerances: dict = dataclasses.field(default_factory=dict)
    seed: Optional[int] = None
    replications: int = 100_000
    grid: int = 50
    action_step: Optional[float] = None
    tie_rule: str = "random"
    strategy_file: Optional[str] = None
    actions: Optional[list] = None
    points: int = 401
    out: str = "."

    # ---- construction and validation

    @classmethod
    def from_sources(cls, mode: str, doc: dict, args: argparse.Namespace) -> "GameConfig":
        doc = dict(doc)
        if doc.pop("mode", mode) not in (mode, None):
            raise ConfigError(f"config mode does not match subcommand {mode!r}")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if mode == "two_player" or ("rates" in doc and "game" not in doc):
            doc["game"] = "two_player"
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.reps is not None:
            doc["replications"] = args.reps
        if args.grid is not None:
            doc["action_step"] = args.grid
        if args.tol is not None:
            doc.setdefault("tolerances", {})
            doc["tolerances"] = {**doc["tolerances"], "root_abs": args.tol}
        if args.out is not None:
            doc["out"] = args.out
        if "capacity" not in doc:
            raise ConfigError("missing field 'capacity'")
        try:
            cfg = cls(mode=mode, **doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not (isinstance(self.capacity, (int, float)) and self.capacity > 0):
            raise ConfigError("capacity must be a positive number")
        if self.game not in ("two_player", "gaussian"):
            raise ConfigError("game must be 'two_player' or 'gaussian'")
        if self.game == "two_player" and self.mode != "fluid":
            if not (isinstance(self.rates, list) and len(self.rates) == 2 and all(r > 0 for r in self.rates)):
                raise ConfigError("two-player games need 'rates': [lambda_1, lambda_2] with positive entries")
        if self.game == "gaussian" or self.mode == "fluid":
            if not (isinstance(self.n, int) and self.n >= 2):
                raise ConfigError("'n' must be an integer >= 2")
        if self.mode in ("simulate", "certify") and self.seed is None:
            raise ConfigError("--seed is required for simulate and certify")
        if self.tie_rule not in sim.TIE_RULES:
            raise ConfigError(f"tie_rule must be one of {sim.TIE_RULES}")
        if self.replications < 1 or self.grid < 1:
            raise ConfigError("replications and grid must be positive")
        self.tol()
        self.cost_function()
        self.demand_model()

    def tol(self) -> Tolerances:
        try:
            return Tolerances(**self.tolerances)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad tolerances: {exc}") from None

    def cost_function(self) -> CostFunction:
        kind = self.cost.get("kind")
        if kind == "zero":
            return CostFunction.zero()
        if kind == "quadratic" and isinstance(self.cost.get("coef"), (int, float)):
            return CostFunction.quadratic(float(self.cost["coef"]))
        raise ConfigError(f"cost must be {{kind: zero}} or {{kind: quadratic, coef}}: {self.cost}")

    def demand_model(self) -> DemandModel:
        d = self.demand
        try:
            if d.get("family") == "exponential":
                return DemandModel.exponential(float(d.get("rate", 1.0)))
            if d.get("family") == "lomax":
                return DemandModel.lomax(float(d["scale"]), float(d["shape"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad demand spec {d}: {exc}") from None
        raise ConfigError(f"unknown demand family in {d}")

    def resolved(self) -> dict:
        out = dataclasses.asdict(self)
        out["tolerances"] = dataclasses.asdict(self.tol())
        return out

    # ---- game objects

    def two_player_game(self) -> two_player.TwoPlayerGame:
        return two_player.TwoPlayerGame(float(self.capacity), float(self.rates[0]), float(self.rates[1]),
                                        self.cost_function())

    def gaussian_game(self) -> gaussian.GaussianGame:
        return gaussian.GaussianGame(self.n, float(self.capacity), self.demand_model(), self.cost_function())

    def sim_game(self) -> sim.SimGame:
        if self.game == "two_player":
            return sim.SimGame.from_two_player(self.two_player_game())
        return sim.SimGame(float(self.capacity), (self.demand_model(),) * self.n, self.cost_function())


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def write_csv(path: Path, columns: dict, kind: str) -> None:
    names = list(columns)
    rows = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    with open(path, "w", newline="") as fh:
        fh.write(f"# {CSV_VERSION} kind={kind}\n")
        writer = csv.writer(fh)
        writer.writerow(names)
        writer.writerows([[repr(float(x)) for x in row] for row in rows])


def _write_report(cfg: GameConfig, body: dict) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "report.json"
    path.write_text(json.dumps(_jsonable({"config": cfg.resolved(), **body}), indent=2))
    return path


def _profile(cfg: GameConfig) -> list[EquilibriumStrategy]:
    if cfg.strategy_file:
        profile = load_profile(cfg.strategy_file)
        for s in profile:
            if not math.isclose(s.cap, cfg.capacity, rel_tol=1e-12):
                raise ConfigError(f"strategy cap {s.cap} does not match config capacity {cfg.capacity}")
        expected = 2 if cfg.game == "two_player" else 1
        if len(profile) not in (1, expected):
            raise ConfigError(f"strategy file holds {len(profile)} strategies, expected {expected}")
        return profile
    if cfg.game == "two_player":
        return [EquilibriumStrategy.of(s) for s in two_player.solve(cfg.two_player_game(), cfg.tol()).strategies]
    return [gaussian.solve_gaussian(cfg.gaussian_game(), cfg.tol())[0]]


# ---- subcommands


def run_two_player(cfg: GameConfig) -> dict:
    game = cfg.two_player_game()
    sol = two_player.solve(game, cfg.tol())
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    save_profile(list(sol.strategies), out / "strategy.json")
    write_csv(out / "curves.csv", two_player.payoff_curves(game, sol, cfg.points), "two_player")
    return {"solution": sol.to_dict()}


def run_fluid(cfg: GameConfig) -> dict:
    n = cfg.n
    demand = cfg.demand_model().with_cap(float(cfg.capacity))
    sol = fluid.solve_fluid(cfg.capacity / n, demand, cfg.cost_function(), cfg.tol())
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    save_strategy(sol.strategy, out / "strategy.json")
    return {"solution": sol.to_dict(), "per_capita_capacity": cfg.capacity / n}


def run_gaussian(cfg: GameConfig) -> dict:
    game = cfg.gaussian_game()
    strategy, trace = gaussian.solve_gaussian(game, cfg.tol())
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    save_strategy(strategy, out / "strategy.json")
    write_csv(out / "curves.csv", gaussian.curves(game, strategy, trace, cfg.points), "gaussian")
    return {"trace": trace.to_dict(), "diagnostics": gaussian.z_score_diagnostics(game, strategy).to_dict()}


def run_simulate(cfg: GameConfig) -> dict:
    profile = _profile(cfg)
    game = cfg.sim_game()
    step = cfg.action_step or 0.01 * cfg.capacity
    xs = np.asarray(cfg.actions, float) if cfg.actions else sim.action_grid(cfg.capacity, step)
    grants = sim.simulate_grants(xs, profile, game, cfg.replications, cfg.seed, 0, cfg.tie_rule)
    p = grants.mean(axis=0)
    se = np.sqrt(p * (1 - p) / cfg.replications)
    cols = {"x": xs, "success": p, "std_error": se}
    if cfg.game == "two_player":
        tp = cfg.two_player_game()
        opp = profile[-1] if len(profile) > 1 else profile[0]
        cols["analytic"] = tp.success_probability(1, xs, opp.prefix) if opp.chattering is None else np.nan * xs
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "curves.csv", cols, "empirical_success")
    return {"actions": len(xs), "replications": cfg.replications, "seed": cfg.seed, "tie_rule": cfg.tie_rule}


def run_certify(cfg: GameConfig) -> dict:
    profile = _profile(cfg)
    cert = sim.certify_equilibrium(profile, cfg.sim_game(), cfg.grid, cfg.replications, cfg.seed,
                                   cfg.action_step, cfg.tie_rule)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "curves.csv").write_text(cert.to_csv())
    return {"certificate": cert.to_dict(), "passes": cert.passes()}


def run_curves(cfg: GameConfig) -> dict:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.game == "two_player":
        game = cfg.two_player_game()
        write_csv(out / "curves.csv", two_player.payoff_curves(game, two_player.solve(game, cfg.tol()), cfg.points),
                  "two_player")
    else:
        game = cfg.gaussian_game()
        strategy, trace = gaussian.solve_gaussian(game, cfg.tol())
        write_csv(out / "curves.csv", gaussian.curves(game, strategy, trace, cfg.points), "gaussian")
    return {"curves": str(out / "curves.csv")}


RUNNERS = {"two_player": run_two_player, "fluid": run_fluid, "gaussian": run_gaussian,
           "simulate": run_simulate, "certify": run_certify, "curves": run_curves}


def run(cfg: GameConfig) -> dict:
    body = RUNNERS[cfg.mode](cfg)
    _write_report(cfg, body)
    return body


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srfgame", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in MODES:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON game configuration")
        p.add_argument("--out", help="output directory (default: config 'out' or .)")
        p.add_argument("--seed", type=int, help="master seed (required for simulate/certify)")
        p.add_argument("--reps", type=int, help="Monte Carlo replications")
        p.add_argument("--grid", type=float, help="action grid step in resource units")
        p.add_argument("--tol", type=float, help="absolute root tolerance")
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        cfg = GameConfig.from_sources(MODES[args.command], doc, args)
        run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SrfError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    log.info("wrote artifacts to %s", cfg.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
