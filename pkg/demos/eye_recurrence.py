"""Where do orbits of the eye map come back? A recurrence scan on one row.

Run: python3 demos/eye_recurrence.py --y 0.5
"""

import argparse

import numpy as np

from twistlab import EYE_BANDS, make_family, recurrence_scan


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--y", type=float, default=0.5)
    parser.add_argument("--nx", type=int, default=128)
    parser.add_argument("-N", type=int, default=5000)
    parser.add_argument("--ball", type=float, default=1e-3)
    args = parser.parse_args(argv)

    F = make_family("eye_map").lift
    xs = (np.arange(args.nx) + 0.5) / args.nx
    R = recurrence_scan(F, np.column_stack([xs, np.full(args.nx, args.y)]), args.N, args.ball)
    print(f"anchor bands: {EYE_BANDS}")
    print(f"{int(R.returned.sum())} of {args.nx} points return within {args.N} steps")
    for x, k in zip(xs[R.returned], R.first_return[R.returned]):
        print(f"  x={x:.4f} first return at step {k}")


if __name__ == "__main__":
    main()
