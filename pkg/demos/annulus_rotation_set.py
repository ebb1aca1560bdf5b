"""Sample the rotation set of annulus twist maps and compare it with the boundary twist interval.

Run: python3 demos/annulus_rotation_set.py --family float
"""

import argparse

from twistlab import make_family, rotation_set, twist_interval


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--family", default="float", choices=["shear", "float", "locked_suspension", "eye_map"])
    parser.add_argument("--grid", type=int, default=24)
    parser.add_argument("-n", type=int, default=20000)
    args = parser.parse_args(argv)

    F = make_family(args.family).lift
    ti = twist_interval(F, 1e-7)
    print(f"{F.label}: boundary rotation numbers {ti.rho0.value:.8f} and {ti.rho1.value:.8f}")

    est = rotation_set(F, (args.grid, args.grid), args.n, check_containment=False)
    print(f"hull of {len(est.lower)} samples: [{est.hull[0]:.8f}, {est.hull[1]:.8f}]")
    print(f"mass within 1e-3 of the boundary values: "
          f"{est.mass_near([ti.rho0.value, ti.rho1.value], 1e-3):.3f}")

    # a coarse text histogram of the sample midpoints
    counts, edges = est.counts, est.edges
    for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
        if c:
            print(f"  [{lo:.4f}, {hi:.4f})  {c:5d} {'#' * max(1, int(50 * c / counts.max()))}")


if __name__ == "__main__":
    main()
