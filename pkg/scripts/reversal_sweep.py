"""Monte Carlo sweep at sigma = 0.2 over both PRC endpoints, five input
correlations and windows from a quarter period to 50 periods.

Short windows favour the type II PRC, long windows the type I PRC. Prints the
wall-clock time, which should stay under ten minutes on one core.
"""

import argparse
import sys
import time
from pathlib import Path

from corrtransfer.cli import main

T_PERIODS = ("0.25", "0.5", "1", "2", "5", "10", "20", "50")


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=Path("data/reversal"))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=2010)
    p.add_argument("--workers", type=int, default=1)
    return p.parse_args()


if __name__ == "__main__":
    args = parse_args()
    start = time.perf_counter()
    code = main([
        "sweep", "--alpha", "0", "pi/2", "--c", "0.2", "0.4", "0.6", "0.8", "0.99",
        "--sigma", "0.2", "--T-periods", *T_PERIODS,
        "--trials", str(args.trials), "--seed", str(args.seed),
        "--workers", str(args.workers), "--out", str(args.out), "--overwrite",
    ])
    print(f"sweep finished with exit code {code} in {time.perf_counter() - start:.1f}s", file=sys.stderr)
    sys.exit(code)
