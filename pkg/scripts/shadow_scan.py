"""Count expanding and admissible shadowing words over a grid of lambda values.

For each lambda the peripheral monodromy of the explicit family is computed
and all reduced words up to ``--max-len`` letters are searched for the
first greedy step towards ``--target``.
"""

import argparse

import numpy as np

from riccati_holonomy.continuation import admissible_words
from riccati_holonomy.errors import HolonomyError
from riccati_holonomy.moebius import antipode
from riccati_holonomy.projective import explicit_monodromy


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--re", type=float, nargs=3, default=(-2.0, 2.0, 5), metavar=("LO", "HI", "N"))
    ap.add_argument("--im", type=float, nargs=3, default=(0.0, 2.0, 3), metavar=("LO", "HI", "N"))
    ap.add_argument("--target", type=complex, default=2 + 1j)
    ap.add_argument("--z0", type=complex, default=0j)
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--max-len", type=int, default=5)
    args = ap.parse_args(argv)
    u = args.target
    for a in np.linspace(args.re[0], args.re[1], int(args.re[2])):
        for b in np.linspace(args.im[0], args.im[1], int(args.im[2])):
            lam = complex(a, b)
            try:
                gens = explicit_monodromy(lam)
            except HolonomyError as exc:
                print(f"{lam:.3f}  {type(exc).__name__}")
                continue
            loose = admissible_words(gens, u, antipode(u), args.z0, 0.999 * 2 * np.pi, args.max_len)
            found = admissible_words(gens, u, antipode(u), args.z0, args.delta, args.max_len)
            print(f"{lam:.3f}  expanding {len(loose):7d}  admissible {len(found):5d}", flush=True)


if __name__ == "__main__":
    main()
