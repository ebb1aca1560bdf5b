"""Rotation numbers of circle maps and the width of a mode-locking tongue.

Run: python3 demos/circle_rotation.py --eps 0.25
"""

import argparse

import numpy as np

from twistlab import arnold_circle, locking_interval, rigid, rotation_number_adaptive


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--eps", type=float, default=0.25, help="nonlinearity of the Arnold family")
    parser.add_argument("--tol", type=float, default=1e-7)
    args = parser.parse_args(argv)

    # rigid rotations: the estimate brackets alpha
    for alpha in (0.0, 0.25, (np.sqrt(5) - 1) / 2):
        r = rotation_number_adaptive(rigid(alpha), args.tol)
        print(f"rigid alpha={alpha:.10f}: rho = {r.value:.10f} +- {r.halfwidth:.1e} exact={r.exact is not None}")

    # inside a tongue the rotation number is certified rational
    for omega in (0.1, 0.5, 0.62):
        r = rotation_number_adaptive(arnold_circle(omega, args.eps), args.tol)
        tag = f"locked at {r.exact[0]}/{r.exact[1]}" if r.exact else "not certified rational"
        print(f"arnold omega={omega}: rho = {r.value:.8f} ({tag})")

    for p, q in ((0, 1), (1, 2), (1, 3)):
        li = locking_interval(lambda t: arnold_circle(t, args.eps), p, q, (-0.5, 1.0), 1e-8)
        print(f"tongue {p}/{q}: omega in [{li.t_lo:.8f}, {li.t_hi:.8f}], width {li.width:.3e}")


if __name__ == "__main__":
    main()
