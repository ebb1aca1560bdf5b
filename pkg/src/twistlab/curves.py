"""Invariant-curve candidates, Lipschitz-graph checks and recurrence scans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .annulus import check_twist
from .circle import RotationEstimate, rotation_number_adaptive
from .cover import AnnulusLift, CircleLift, advance_reduced
from .errors import InsufficientDensity, NotDisjoint, NotInvariant

MAX_GAP = 0.05
LIPSCHITZ_SAFETY = 4.0
DISJOINT_THRESHOLD = 1e-6
DUPLICATE_TOL = 1e-12


@dataclass(frozen=True)
class CurveCandidate:
    points: np.ndarray  # (m, 2), x in [0, 1) strictly increasing
    source: str
    gap_max: float

    def __call__(self, x):
        """Periodic piecewise-linear interpolation of the curve height."""
        return np.interp(np.mod(x, 1.0), self.points[:, 0], self.points[:, 1], period=1.0)


@dataclass(frozen=True)
class GraphReport:
    is_graph: bool
    single_valued: bool
    lipschitz_estimate: float
    lipschitz_bound_used: float
    invariance_residual: float


@dataclass(frozen=True)
class RecurrenceMap:
    points: np.ndarray
    returned: np.ndarray
    first_return: np.ndarray  # -1 where no return was seen
    eps: float
    N: int

    @property
    def fraction(self) -> float:
        return float(np.mean(self.returned))


def make_candidate(points, source: str) -> CurveCandidate:
    """Reduce x mod 1, sort, merge exact duplicates and measure the largest x-gap."""
    pts = np.atleast_2d(np.asarray(points, dtype=float)).copy()
    pts[:, 0] = np.mod(pts[:, 0], 1.0)
    pts[pts[:, 0] >= 1.0, 0] = 0.0
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = (np.diff(pts[:, 0]) > DUPLICATE_TOL) | (np.abs(np.diff(pts[:, 1])) > DUPLICATE_TOL)
    pts = pts[keep]
    # a point just below 1 may duplicate one at 0
    if len(pts) > 1 and pts[-1, 0] >= 1.0 - DUPLICATE_TOL and pts[0, 0] <= DUPLICATE_TOL \
            and abs(pts[-1, 1] - pts[0, 1]) <= DUPLICATE_TOL:
        pts = pts[:-1]
    gaps = np.diff(np.concatenate([pts[:, 0], [pts[0, 0] + 1.0]]))
    return CurveCandidate(pts, source, float(gaps.max()))


def trace_curve(F: AnnulusLift, seed, n: int) -> CurveCandidate:
    """Orbit closure of ``seed`` projected to the annulus.

    ``seed`` may also be an ``(k, 2)`` array; the candidate is then the union
    of the ``k`` orbits. Several seeds on one circle are needed when its
    rotation number is rational, since a single periodic orbit is too sparse.
    """
    if n < 100:
        raise ValueError("n >= 100 required")
    seeds = np.atleast_2d(np.asarray(seed, dtype=float))
    frac = seeds[:, 0] - np.floor(seeds[:, 0])
    count = np.zeros(len(seeds))
    y = seeds[:, 1].copy()
    out = np.empty((n + 1, len(seeds), 2))
    out[0, :, 0], out[0, :, 1] = frac, y
    for k in range(1, n + 1):
        frac, count, y = advance_reduced(F, frac, count, y, 1)
        out[k, :, 0], out[k, :, 1] = frac, y
    if len(seeds) == 1:
        src = f"orbit of ({seeds[0, 0]:g}, {seeds[0, 1]:g}), n={n}"
    else:
        src = f"union of {len(seeds)} orbits, n={n}"
    return make_candidate(out.reshape(-1, 2), src)


def curve_from_function(fn: Callable, m: int = 1024, source: Optional[str] = None) -> CurveCandidate:
    xs = np.arange(m) / m
    return make_candidate(np.column_stack([xs, np.broadcast_to(fn(xs), xs.shape)]),
                          source or f"graph on {m} points")


def lipschitz_bound(F: AnnulusLift, nx: int = 32, ny: int = 32) -> float:
    """Working value of the uniform Lipschitz bound: safety factor times the twist report hint."""
    return LIPSCHITZ_SAFETY * check_twist(F, nx, ny).lipschitz_hint


def invariance_residual(F: AnnulusLift, c: CurveCandidate) -> float:
    x1, y1 = F.eval(c.points[:, 0], c.points[:, 1])
    return float(np.max(np.abs(np.asarray(y1) - c(np.asarray(x1)))))


def _slopes(c: CurveCandidate) -> np.ndarray:
    x = np.concatenate([c.points[:, 0], [c.points[0, 0] + 1.0]])
    y = np.concatenate([c.points[:, 1], [c.points[0, 1]]])
    dx, dy = np.diff(x), np.abs(np.diff(y))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(dx > 0, dy / dx, np.where(dy > 0, np.inf, 0.0))


def birkhoff_graph_check(
    F: AnnulusLift, c: CurveCandidate, L: Optional[float] = None, tol: float = 1e-9
) -> GraphReport:
    """Is ``c`` the graph of a function with Lipschitz constant at most ``L``?

    Single-valuedness is tested on x-bins a few typical gaps wide: inside each
    bin the spread of y must not exceed what slope ``L`` allows. The
    invariance residual is the largest vertical distance from ``F(p)`` to the
    interpolated curve over the candidate's points.
    """
    if c.gap_max > MAX_GAP:
        raise InsufficientDensity(f"gap_max {c.gap_max:.3g} > {MAX_GAP}")
    L = lipschitz_bound(F) if L is None else float(L)
    slopes = _slopes(c)
    lip = float(slopes.max()) if slopes.size else 0.0
    width = max(4.0 * float(np.median(np.diff(c.points[:, 0]))) if len(c.points) > 1 else 1.0, 1e-9)
    bins = np.floor(c.points[:, 0] / width).astype(np.int64)
    order = np.argsort(bins, kind="stable")
    b, y = bins[order], c.points[order, 1]
    starts = np.flatnonzero(np.r_[True, b[1:] != b[:-1]])
    spread = np.maximum.reduceat(y, starts) - np.minimum.reduceat(y, starts)
    single = bool(np.all(spread <= L * width + tol))
    res = invariance_residual(F, c)
    return GraphReport(single and lip <= L + tol, single, lip, L, res)


def induced_circle_map(F: AnnulusLift, c: CurveCandidate) -> CircleLift:
    """``x -> first coordinate of F(x, c(x))``: the dynamics restricted to the curve."""
    f = F.eval

    def g(x):
        return f(x, c(x))[0]

    return CircleLift(g, f"{F.label}|curve", F.eps_eq)


def curve_rotation_number(
    F: AnnulusLift, c: CurveCandidate, tol: float, invariance_tol: Optional[float] = None
) -> RotationEstimate:
    """Rotation number of the dynamics on an invariant graph."""
    limit = tol if invariance_tol is None else invariance_tol
    res = invariance_residual(F, c)
    if res > limit:
        raise NotInvariant(f"invariance residual {res:.3g} > {limit:.3g}")
    return rotation_number_adaptive(induced_circle_map(F, c), tol)


def vertical_separation(c1: CurveCandidate, c2: CurveCandidate) -> np.ndarray:
    """Signed ``c2 - c1`` on the union of both x-grids."""
    xs = np.union1d(c1.points[:, 0], c2.points[:, 0])
    return c2(xs) - c1(xs)


def distinct_rotation_check(
    F: AnnulusLift,
    c1: CurveCandidate,
    c2: CurveCandidate,
    tol: float,
    *,
    L: Optional[float] = None,
    invariance_tol: Optional[float] = None,
    threshold: float = DISJOINT_THRESHOLD,
) -> str:
    """"distinct" when the two rotation intervals separate, otherwise "undecided"."""
    L = lipschitz_bound(F) if L is None else L
    for c in (c1, c2):
        rep = birkhoff_graph_check(F, c, L)
        if not rep.is_graph:
            raise NotInvariant(f"{c.source} is not a Lipschitz graph (slope {rep.lipschitz_estimate:.3g})")
    sep = vertical_separation(c1, c2)
    if np.min(np.abs(sep)) <= threshold or (sep.min() < 0 < sep.max()):
        raise NotDisjoint(f"curves come within {np.min(np.abs(sep)):.3g} of each other")
    r1 = curve_rotation_number(F, c1, tol, invariance_tol)
    r2 = curve_rotation_number(F, c2, tol, invariance_tol)
    return "undecided" if r1.overlaps(r2) else "distinct"


def recurrence_scan(F: AnnulusLift, grid, N: int, eps: float) -> RecurrenceMap:
    """Flag points whose orbit re-enters their ``eps``-ball within ``N`` steps.

    Distance is Euclidean on the annulus with x measured mod 1. A heuristic
    witness for non-wandering behaviour, not a certificate.
    """
    if N < 1 or eps <= 0:
        raise ValueError("N >= 1 and eps > 0 required")
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    x0 = np.mod(pts[:, 0], 1.0)
    y0 = pts[:, 1].copy()
    frac, count, y = x0.copy(), np.zeros(len(pts)), y0.copy()
    first = np.full(len(pts), -1, dtype=np.int64)
    for k in range(1, N + 1):
        frac, count, y = advance_reduced(F, frac, count, y, 1)
        dx = np.abs(frac - x0)
        dx = np.minimum(dx, 1.0 - dx)
        hit = (first < 0) & (np.hypot(dx, y - y0) < eps)
        first[hit] = k
    return RecurrenceMap(pts, first >= 0, first, eps, N)
