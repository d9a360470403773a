"""Regenerate the data and plots of figures 1-9.

    python scripts/reproduce_figures.py --out figures
    python scripts/reproduce_figures.py --only 1 4 6 --backend reduced

Single-run figures at N=40, M=100 use the full arc-space simulation by
default (about 25 s per 150 steps on one core); the scaling figures always
use the reduced models.
"""

import argparse
import time

from qwalk.experiments import FIGURES, figure


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--backend", choices=("full", "reduced"), default="full")
    ap.add_argument("--only", type=int, nargs="+", default=sorted(FIGURES))
    args = ap.parse_args()
    for n in args.only:
        start = time.perf_counter()
        res = figure(n, args.out, args.backend)
        summary = ", ".join(f"{k}={v:.4g}" for k, v in res.checks.items())
        print(f"fig {n} ({FIGURES[n]}): {summary}  [{time.perf_counter() - start:.1f}s]")


if __name__ == "__main__":
    main()
