"""Solve the two-player and Gaussian example games and print their switch points."""
import argparse
import json
import time

from srfgame.gaussian import GaussianGame, solve_gaussian
from srfgame.model import CostFunction, DemandModel
from srfgame.two_player import TwoPlayerGame, solve

TWO_PLAYER = {"case A": (2.0, 1.0, 2.0), "case B": (2.0, 1.0, 3.0), "small capacity": (0.2, 1.0, 1.0)}


def gaussian_cases():
    lomax_cost = CostFunction.quadratic(0.001)
    return {
        "exp(1), n=100, c_n=120": GaussianGame(100, 120.0, DemandModel.exponential(1.0)),
        "exp(1), n=100, c_n=100": GaussianGame(100, 100.0, DemandModel.exponential(1.0)),
        "Lomax(5,3), n=1000, c_n=4000": GaussianGame(1000, 4000.0, DemandModel.lomax(5, 3), lomax_cost),
        "Lomax(5,3), n=1000, c_n=2500": GaussianGame(1000, 2500.0, DemandModel.lomax(5, 3), lomax_cost),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--json", action="store_true", help="print one JSON object instead of a table")
    args = parser.parse_args()
    rows = {}
    for name, (cap, l1, l2) in TWO_PLAYER.items():
        t0 = time.perf_counter()
        sol = solve(TwoPlayerGame(cap, l1, l2))
        rows[name] = {"classification": sol.classification,
                      "switch_points": [list(s.switch_points) for s in sol.strategies],
                      "seconds": time.perf_counter() - t0}
    for name, game in gaussian_cases().items():
        t0 = time.perf_counter()
        s, trace = solve_gaussian(game)
        rows[name] = {"switch_points": list(trace.switch_points), "record_highs": trace.record_highs,
                      "next_modes": [c.next_mode for c in trace.conflicts],
                      "chattering": trace.chattering, "seconds": time.perf_counter() - t0}
    if args.json:
        print(json.dumps(rows, indent=2, default=float))
        return
    for name, row in rows.items():
        print(f"{name:32s} " + ", ".join(f"{k}={v}" for k, v in row.items() if k != "seconds")
              + f"  ({row['seconds']:.3f} s)")


if __name__ == "__main__":
    main()
