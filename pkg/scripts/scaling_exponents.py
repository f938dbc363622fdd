"""Log-log slopes of Var(Jz) and xi^2 against the field from LSW sweeps.

Also prints how <Jx>/N drifts across the fit window, which is what bends the
xi^2 slope away from 1/2 when a second soft mode is present.

    python scripts/scaling_exponents.py --window 1e-4:1e-2
"""

import argparse

import numpy as np

from spinsqueeze import spinwave
from spinsqueeze.model import ModelSpec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--window", default="1e-4:1e-2")
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--sizes", default="2:100,3:60", help="d:L pairs")
    args = ap.parse_args(argv)

    lo, hi = (float(x) for x in args.window.split(":"))
    omegas = np.geomspace(lo, hi, args.points)
    print(f"{'d':>2} {'L':>4} {'delta':>5} {'var_jz':>8} {'xi2':>8} {'m(lo)':>7} {'m(hi)':>7}")
    for pair in args.sizes.split(","):
        d, L = (int(x) for x in pair.split(":"))
        for delta in (0.0, 0.5, 1.0):
            rows = spinwave.sweep(ModelSpec.hypercubic(d, L, delta, 1.0), omegas)
            fits = [spinwave.fit_power_law(rows, c, (lo, hi)).slope for c in ("var_jz", "xi2")]
            print(f"{d:>2} {L:>4} {delta:>5} {fits[0]:8.4f} {fits[1]:8.4f} "
                  f"{rows[0]['jx_per_spin']:7.4f} {rows[-1]['jx_per_spin']:7.4f}")


if __name__ == "__main__":
    main()
