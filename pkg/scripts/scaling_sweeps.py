"""Gap-vs-M scaling for all four scenarios with per-N and pooled slopes.

    python scripts/scaling_sweeps.py
    QWALK_THREADS=4 python scripts/scaling_sweeps.py --n 10 50 100 200 --m 25 50 100 200 400 800
"""

import argparse

from qwalk.experiments import CONFIGS, SCENARIOS, SWITCH, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[10, 50, 100])
    ap.add_argument("--m", type=int, nargs="+", default=[25, 50, 100, 200, 400])
    args = ap.parse_args()
    for scenario in SCENARIOS:
        for config in (CONFIGS if scenario == SWITCH else ("same",)):
            res = sweep(scenario, args.n, args.m, config=config)
            tag = f"{scenario} ({config})" if scenario == SWITCH else scenario
            per_n = "  ".join(f"N={k}: {v:+.3f}" for k, v in res.series_slopes.items())
            print(f"{tag:28s} pooled {res.slope:+.3f} (rms {res.rms:.2f})   {per_n}")
            for N, M, m in res.points:
                print(f"    N={N:4d} M={M:4d} gap={m:.4e}")


if __name__ == "__main__":
    main()
