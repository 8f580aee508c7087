"""Radial probes of the inverse developing map against the monodromy orbit cloud.

Prints one line per ray: where the lift stopped, the first crossing of the
orbit cloud along that ray, and their chordal gap.
"""

import argparse
import math

from riccati_holonomy.continuation import natural_boundary_experiment
from riccati_holonomy.integrate import DEFAULT_TOLERANCES


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=complex, default=0j)
    ap.add_argument("--directions", type=int, default=36)
    ap.add_argument("--depth", type=int, default=10, help="word length of the orbit cloud")
    ap.add_argument("--width", type=float, default=0.02)
    ap.add_argument("--pole-margin", type=float, default=DEFAULT_TOLERANCES.pole_margin)
    args = ap.parse_args(argv)
    tol = DEFAULT_TOLERANCES.replace(pole_margin=args.pole_margin)
    exp = natural_boundary_experiment(args.lam, args.directions, cloud_depth=args.depth,
                                      width=args.width, tol=tol)
    print("angle  kind               radius   crossing              gap      pass")
    for r in exp.rays:
        cross = "-" if r.crossing is None else f"{r.crossing.real:+.4f}{r.crossing.imag:+.4f}i"
        gap = "-" if r.gap is None else f"{r.gap:.2e}"
        rad = "-" if r.singular_radius is None else f"{r.singular_radius:.4f}"
        print(f"{math.degrees(r.angle):5.0f}  {r.singular_kind:18s} {rad:8s} {cross:21s} {gap:8s} {r.passes}")
    print(f"fraction {exp.fraction:.3f}  with crossing {exp.fraction_with_crossing:.3f}  "
          f"core complete {exp.core_complete}")


if __name__ == "__main__":
    main()
