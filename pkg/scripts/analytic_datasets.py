"""Write every analytic dataset (PRC curves, densities, long and short window
correlations) into one directory.

    python3 scripts/analytic_datasets.py --out data/analytic
"""

import argparse
import sys
from pathlib import Path

from corrtransfer.cli import main


def run(*argv: str) -> None:
    code = main(list(argv))
    if code != 0:
        sys.exit(code)


def build(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    run("prc", "--alpha", "0", "pi/8", "pi/4", "3*pi/8", "pi/2", "--out", str(out / "prc.csv"))
    for label, alpha in (("type2", "0"), ("type1", "pi/2")):
        run("density", "--alpha", alpha, "--c", "0.4", "0.8", "--out", str(out / f"density_{label}.csv"))
    run("long", "--alpha-points", "65", "--out", str(out / "long_window.csv"))
    run("long", "--alpha-points", "65", "--c", "0.01", "0.05", "0.1", "--out", str(out / "long_window_small_c.csv"))
    for label, alpha in (("type2", "0"), ("type1", "pi/2")):
        run("short", "--alpha", alpha, "--out", str(out / f"short_window_{label}.csv"))


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("data/analytic"))
    build(parser.parse_args().out)
