"""Sup-distance between the constructive eta_m and a fine ODE solution as m doubles."""
import argparse

import numpy as np

from srfgame.gaussian import IDENTITY, ChatterState, GaussianGame, Prefix, chattering_constructive, chattering_ode, w_and_p
from srfgame.model import DemandModel


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--cap", type=float, default=11.0)
    parser.add_argument("--entry", type=float, default=8.0)
    parser.add_argument("--cells", type=int, nargs="+", default=[100, 200, 400, 800, 1600])
    parser.add_argument("--fine", type=int, default=20_000, help="ODE steps for the reference solution")
    args = parser.parse_args()

    game = GaussianGame(args.n, args.cap, DemandModel.exponential(1.0))
    state = ChatterState.at_entry(Prefix().extend_identity(game, args.entry))
    p_star = w_and_p(game, Prefix(), IDENTITY, args.entry)[1]
    arc = chattering_ode(game, args.entry, p_star, state)
    ref = chattering_ode(game, args.entry, p_star, state, step=(arc.exit - args.entry) / args.fine, v_end=arc.exit)
    print(f"entry {args.entry}  exit {arc.exit:.6g} ({arc.exit_reason})  entry slope {arc.diagnostics['slope'][0]:.6g}")
    prev = None
    for m in args.cells:
        approx = chattering_constructive(game, args.entry, p_star, m, state, arc.exit)
        gap = float(np.max(np.abs(approx.eval(ref.v) - ref.eta)))
        ratio = "" if prev is None else f"  ratio {gap / prev:.3f}"
        print(f"m={m:5d}  sup gap {gap:.3e}{ratio}")
        prev = gap


if __name__ == "__main__":
    main()
