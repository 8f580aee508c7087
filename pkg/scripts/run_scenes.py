"""Run every shipped scene through the CLI and report exit status and runtime."""

import argparse
import sys
import time
from pathlib import Path

from riccati_holonomy import cli

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("scenes", nargs="*", type=Path, help="scene files (default: scenes/*.json)")
    args = ap.parse_args(argv)
    scenes = args.scenes or sorted((ROOT / "scenes").glob("*.json"))
    worst = 0
    for scene in scenes:
        t0 = time.perf_counter()
        code = cli.run(scene)
        print(f"{scene.stem:20s} exit {code}  {time.perf_counter() - t0:6.2f} s", flush=True)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
