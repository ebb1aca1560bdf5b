"""Twist condition, twist interval and sampled rotation sets of annulus lifts."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circle import RotationEstimate, rotation_number_adaptive
from .cover import AnnulusLift, advance_reduced, boundary_restriction, iterate

CHECKPOINT_RATIO = 1.5


@dataclass(frozen=True)
class TwistReport:
    xs: np.ndarray
    ys: np.ndarray
    min_increment: float
    is_twist: bool
    lipschitz_hint: float


@dataclass(frozen=True)
class TwistInterval:
    rho0: RotationEstimate
    rho1: RotationEstimate

    @property
    def bounds(self) -> tuple:
        return self.rho0.value, self.rho1.value


@dataclass(frozen=True)
class RotationSample:
    point: tuple
    upper: float
    lower: float
    n: int
    window: int


@dataclass
class RotationSetEstimate:
    points: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    n: int
    window: int
    hull: tuple
    counts: np.ndarray
    edges: np.ndarray
    twist: Optional[TwistInterval] = None
    slack: float = 0.0
    contained: Optional[bool] = None

    @property
    def values(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def samples(self) -> list:
        return [
            RotationSample((float(x), float(y)), float(u), float(lo), self.n, self.window)
            for (x, y), lo, u in zip(self.points, self.lower, self.upper)
        ]

    def mass_near(self, targets, radius: float) -> float:
        """Fraction of samples whose value lies within ``radius`` of some target."""
        v = self.values[:, None]
        t = np.asarray(targets, dtype=float)[None, :]
        return float(np.mean(np.any(np.abs(v - t) <= radius, axis=1)))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("TWISTLAB_THREADS", "1")))
    except ValueError:
        return 1


def check_twist(F: AnnulusLift, nx: int, ny: int, tol: float = 0.0, collar: float = 0.0) -> TwistReport:
    """Smallest increment of ``x1(x, .)`` between adjacent rows of an ``nx`` x ``ny`` grid."""
    if nx < 2 or ny < 2:
        raise ValueError("nx, ny >= 2 required")
    xs = np.arange(nx) / nx
    ys = np.linspace(collar, 1.0 - collar, ny)
    X, Y = np.meshgrid(xs, ys)
    x1, _ = F.eval(X, Y)
    dx1 = np.diff(x1, axis=0)
    dy = np.diff(ys)[:, None]
    min_inc = float(dx1.min())
    return TwistReport(xs, ys, min_inc, min_inc > tol, float(np.max(np.abs(dx1 / dy))))


def twist_interval(F: AnnulusLift, tol: float, **kwargs) -> TwistInterval:
    """Rotation numbers of the two boundary restrictions, each to halfwidth ``tol``."""
    return TwistInterval(
        rotation_number_adaptive(boundary_restriction(F, 0), tol, **kwargs),
        rotation_number_adaptive(boundary_restriction(F, 1), tol, **kwargs),
    )


def boundary_twist_condition(F: AnnulusLift, tol: float, **kwargs) -> Optional[bool]:
    """True if rho0 < rho1 is certified, None if the intervals overlap.

    False only for a certified rho0 > rho1, which no twist map can produce.
    """
    ti = twist_interval(F, tol, **kwargs)
    if ti.rho0.hi < ti.rho1.lo:
        return True
    if ti.rho0.lo > ti.rho1.hi:
        return False
    return None


def checkpoints(n: int, window: int) -> np.ndarray:
    """The last ``window`` checkpoints of a geometric ladder (ratio 1.5) ending at ``n``."""
    if not n >= window >= 1:
        raise ValueError("need n >= window >= 1")
    ks = {max(1, int(round(n / CHECKPOINT_RATIO**j))) for j in range(window)}
    return np.array(sorted(ks))


def _sample_chunk(F: AnnulusLift, pts: np.ndarray, ks: np.ndarray):
    x0, y = pts[:, 0].copy(), pts[:, 1].copy()
    base = np.floor(x0)
    frac0 = x0 - base
    frac, count = frac0.copy(), np.zeros_like(frac0)
    lower = np.full(len(pts), np.inf)
    upper = np.full(len(pts), -np.inf)
    done = 0
    for k in ks:
        frac, count, y = advance_reduced(F, frac, count, y, int(k) - done)
        done = int(k)
        avg = (count + (frac - frac0)) / k
        lower = np.minimum(lower, avg)
        upper = np.maximum(upper, avg)
    return lower, upper


def rotation_samples(F: AnnulusLift, points, n: int, window: int = 3, threads: Optional[int] = None):
    """Vectorised lower/upper displacement averages for many starting points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    ks = checkpoints(n, window)
    threads = default_threads() if threads is None else max(1, threads)
    if threads == 1 or len(pts) < 2 * threads:
        return _sample_chunk(F, pts, ks)
    chunks = np.array_split(pts, threads)
    with ThreadPoolExecutor(threads) as pool:
        parts = list(pool.map(lambda c: _sample_chunk(F, c, ks), chunks))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def rotation_sample(F: AnnulusLift, p, n: int, window: int = 3) -> RotationSample:
    """Approximate the liminf/limsup of displacement averages at one point."""
    lo, up = rotation_samples(F, [p], n, window, threads=1)
    return RotationSample((float(p[0]), float(p[1])), float(up[0]), float(lo[0]), n, window)


def grid_points(nx: int, ny: int) -> np.ndarray:
    X, Y = np.meshgrid(np.arange(nx) / nx, np.linspace(0.0, 1.0, ny))
    return np.column_stack([X.ravel(), Y.ravel()])


def rotation_set(
    F: AnnulusLift,
    grid=(64, 64),
    n: int = 10**5,
    bins: int = 64,
    *,
    window: int = 3,
    twist_tol: float = 1e-7,
    slack: Optional[float] = None,
    threads: Optional[int] = None,
    check_containment: bool = True,
) -> RotationSetEstimate:
    """Sampled rotation set: per-point estimates, hull, histogram and a containment check.

    The containment check compares every sample against the twist interval.
    The default ``slack`` is ``1/k_min`` for the earliest checkpoint ``k_min``,
    which bounds how far a finite-time average can sit outside.
    """
    pts = grid_points(*grid) if np.ndim(grid) == 1 and len(grid) == 2 and np.isscalar(grid[0]) \
        else np.atleast_2d(np.asarray(grid, dtype=float))
    if pts.size == 0:
        raise ValueError("grid must be nonempty")
    lower, upper = rotation_samples(F, pts, n, window, threads)
    hull = (float(lower.min()), float(upper.max()))
    values = 0.5 * (lower + upper)
    span = (hull[0], hull[1]) if hull[1] > hull[0] else (hull[0] - 0.5, hull[1] + 0.5)
    counts, edges = np.histogram(values, bins=bins, range=span)
    est = RotationSetEstimate(pts, lower, upper, n, window, hull, counts, edges)
    if check_containment:
        ti = twist_interval(F, twist_tol)
        est.twist = ti
        est.slack = 1.0 / checkpoints(n, window)[0] if slack is None else slack
        est.contained = bool(
            np.all(lower >= ti.rho0.lo - est.slack) and np.all(upper <= ti.rho1.hi + est.slack)
        )
    return est


def comparison_gap(F: AnnulusLift, p, n: int) -> float:
    """``min_k (x_k - x'_k)`` where ``x'`` is the orbit launched from the same ``x`` at ``y = 0``.

    Nonnegative for twist maps: interior orbits dominate the lower boundary orbit.
    """
    a = iterate(F, p, n).x
    b = iterate(F, (p[0], 0.0), n).x
    return float(np.min(a[1:] - b[1:]))
