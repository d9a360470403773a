"""Lower bound on the switch-protocol fidelity next to the measured value.

    python scripts/switch_diagnostics.py --n 40 --m 100 --backend reduced
"""

import argparse

import numpy as np

from qwalk.experiments import default_vertices
from qwalk.graph import GraphSpec
from qwalk.protocols import switch_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=40)
    ap.add_argument("--m", type=int, default=100)
    ap.add_argument("--T", type=int, default=None)
    ap.add_argument("--backend", choices=("full", "reduced"), default="reduced")
    args = ap.parse_args()
    spec = GraphSpec(args.m, args.n)
    for config in ("same", "diff"):
        d = switch_bound(spec, *default_vertices(config), args.T, args.backend)
        print(f"{config}: T={d.T} |alpha_s|={abs(d.alpha_s):.5f} |beta_s|={abs(d.beta_s):.5f} "
              f"eps_s={d.eps_s:.4f} delta_s={d.delta_s:.4f} "
              f"bound={d.bound:.5f} sqrt(F)={np.sqrt(d.measured_fidelity):.5f}")


if __name__ == "__main__":
    main()
