"""Monte Carlo best-response gap certificates for the solved example games."""
import argparse
from pathlib import Path

from srfgame.gaussian import GaussianGame, solve_gaussian
from srfgame.model import DemandModel
from srfgame.sim import TIE_RULES, SimGame, certify_equilibrium, shift_switch_points
from srfgame.two_player import TwoPlayerGame, solve


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=100_000)
    parser.add_argument("--grid", type=int, default=50)
    parser.add_argument("--seed", type=int, default=20_240_501)
    parser.add_argument("--tie-rule", choices=TIE_RULES, default="random")
    parser.add_argument("--out", type=Path, help="directory for one certificate CSV per case")
    args = parser.parse_args()

    g_a, g_b = TwoPlayerGame(2.0, 1.0, 2.0), TwoPlayerGame(2.0, 1.0, 3.0)
    gauss = GaussianGame(100, 120.0, DemandModel.exponential(1.0))
    b = list(solve(g_b).strategies)
    cases = {
        "case_a": (list(solve(g_a).strategies), SimGame.from_two_player(g_a)),
        "case_b": (b, SimGame.from_two_player(g_b)),
        "gaussian_120": (solve_gaussian(gauss)[0], SimGame.from_gaussian(gauss)),
        "case_b_shifted": ([shift_switch_points(s, 0.3) for s in b], SimGame.from_two_player(g_b)),
    }
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    for name, (profile, game) in cases.items():
        cert = certify_equilibrium(profile, game, args.grid, args.reps, args.seed, tie_rule=args.tie_rule)
        print(f"{name:16s} worst_gap={cert.worst_gap:.5f} se={cert.worst_std_error:.5f} "
              f"v={cert.value_grid[cert.worst_index]:.4g} passes={cert.passes()}")
        if args.out:
            (args.out / f"{name}.csv").write_text(cert.to_csv())


if __name__ == "__main__":
    main()
