"""Lifts of circle and annulus homeomorphisms to the universal cover.

Maps are represented by their lifts: a :class:`CircleLift` is a strictly
increasing real function with ``g(x + 1) = g(x) + 1``, and an
:class:`AnnulusLift` is a map of the strip ``R x [0, 1]`` commuting with
the unit horizontal translation and preserving both boundary lines.

All ``eval`` callables are expected to accept numpy arrays and broadcast
elementwise; scalars must work too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import AmbiguousNormalization, DomainEscape

EPS_EQ = 1e-12


@dataclass(frozen=True)
class CircleLift:
    """Lift ``R -> R`` of an orientation-preserving circle homeomorphism."""

    eval: Callable
    label: str = "circle"
    eps_eq: float = EPS_EQ

    def __call__(self, x):
        return self.eval(x)

    def shifted(self, k: float) -> "CircleLift":
        """Return the lift ``x -> g(x) + k``."""
        g = self.eval
        return CircleLift(lambda x: g(x) + k, f"{self.label}{k:+g}", self.eps_eq)


@dataclass(frozen=True)
class AnnulusLift:
    """Lift ``(x, y) -> (x1, y1)`` of a boundary-preserving annulus map."""

    eval: Callable
    label: str = "annulus"
    eps_eq: float = EPS_EQ
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, x, y):
        return self.eval(x, y)

    def translated(self, k: int) -> "AnnulusLift":
        """Compose with the deck translation ``T_k``."""
        if k == 0:
            return self
        f = self.eval

        def shifted(x, y):
            x1, y1 = f(x, y)
            return x1 + k, y1

        return AnnulusLift(shifted, f"{self.label}{k:+d}", self.eps_eq, dict(self.meta))


@dataclass(frozen=True)
class OrbitSegment:
    points: np.ndarray  # shape (length + 1, 2)
    origin: tuple
    length: int

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]


@dataclass(frozen=True)
class EquivarianceReport:
    equivariance_residual: float
    boundary_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.equivariance_residual <= self.tol and self.boundary_residual <= self.tol


def boundary_restriction(F: AnnulusLift, i: int) -> CircleLift:
    """The circle lift ``x -> first coordinate of F(x, i)`` for ``i`` in {0, 1}."""
    if i not in (0, 1):
        raise ValueError(f"boundary index must be 0 or 1, got {i!r}")
    f = F.eval
    level = float(i)

    def g(x):
        if np.ndim(x) == 0:
            return f(x, level)[0]
        return f(x, np.full(np.shape(x), level))[0]

    return CircleLift(g, f"{F.label}|y={i}", F.eps_eq)


def normalize_lift(F: AnnulusLift, rotation_oracle=None) -> AnnulusLift:
    """Shift ``F`` by an integer so that its lower boundary rotation lies in [0, 1).

    ``rotation_oracle`` maps a :class:`CircleLift` to a ``RotationEstimate``;
    by default an adaptive estimate to halfwidth 0.05 is used.
    """
    if rotation_oracle is None:
        from .circle import rotation_number_adaptive

        def rotation_oracle(g):
            return rotation_number_adaptive(g, tol=0.05)

    est = rotation_oracle(boundary_restriction(F, 0))
    lo = math.floor(est.value - est.halfwidth)
    hi = math.floor(est.value + est.halfwidth)
    if lo != hi:
        raise AmbiguousNormalization(
            f"rho0 = {est.value:.17g} +/- {est.halfwidth:.3g} straddles an integer; "
            "raise the iteration count"
        )
    return F.translated(-lo)


def _check_domain(y, eps: float) -> None:
    y = np.asarray(y)
    if np.any(~np.isfinite(y)) or np.any(y < -eps) or np.any(y > 1.0 + eps):
        bad = y[(~np.isfinite(y)) | (y < -eps) | (y > 1.0 + eps)]
        raise DomainEscape(f"y left [0, 1]: {bad.ravel()[:4]}")


def iterate(F: AnnulusLift, p0, n: int) -> OrbitSegment:
    """Orbit ``p0, F(p0), ..., F^n(p0)`` in lifted coordinates."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x, y = float(p0[0]), float(p0[1])
    _check_domain(y, F.eps_eq)
    pts = np.empty((n + 1, 2))
    pts[0] = x, y
    for k in range(1, n + 1):
        x, y = F.eval(x, y)
        _check_domain(y, F.eps_eq)
        pts[k] = x, y
    return OrbitSegment(pts, (float(p0[0]), float(p0[1])), n)


def advance_reduced(F: AnnulusLift, frac, count, y, steps: int):
    """Advance many points ``steps`` times keeping the lifted x as ``count + frac``.

    ``frac`` stays in [0, 1) and ``count`` collects the integer part exactly,
    which keeps the fractional precision independent of how far an orbit has
    travelled. Arrays are updated in place-compatible fashion and returned.
    """
    f = F.eval
    eps = F.eps_eq
    for _ in range(steps):
        x1, y = f(frac, y)
        k = np.floor(x1)
        frac = x1 - k
        count = count + k
        if np.any(y < -eps) or np.any(y > 1.0 + eps) or not np.all(np.isfinite(x1)):
            _check_domain(y, eps)
            raise DomainEscape("non-finite x encountered")
    return frac, count, y


def check_equivariance(F: AnnulusLift, samples, tol: float) -> EquivarianceReport:
    """Max residuals of ``F(x+1, y) = F(x, y) + (1, 0)`` and of boundary preservation."""
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    if pts.size == 0:
        raise ValueError("samples must be nonempty")
    x, y = pts[:, 0], pts[:, 1]
    x1, y1 = F.eval(x, y)
    x2, y2 = F.eval(x + 1.0, y)
    eq = max(np.max(np.abs(x2 - x1 - 1.0)), np.max(np.abs(y2 - y1)))
    _, b0 = F.eval(x, np.zeros_like(x))
    _, b1 = F.eval(x, np.ones_like(x))
    bd = max(np.max(np.abs(b0)), np.max(np.abs(b1 - 1.0)))
    return EquivarianceReport(float(eq), float(bd), tol)


def circle_equivariance_residual(g: CircleLift, xs) -> float:
    xs = np.asarray(xs, dtype=float)
    return float(np.max(np.abs(g.eval(xs + 1.0) - g.eval(xs) - 1.0)))


def is_strictly_monotone(g: CircleLift, xs=None, sep: float = 1e-9) -> bool:
    """Sampled strict monotonicity: ``g(x) < g(x + sep)`` and increasing on a grid."""
    if xs is None:
        xs = np.linspace(0.0, 1.0, 257)
    xs = np.unique(np.asarray(xs, dtype=float))
    # pairs closer than sep are below the resolution of the check
    xs = xs[np.concatenate([[True], np.diff(xs) >= sep])]
    gx = g.eval(xs)
    if np.any(np.diff(gx) <= 0.0):
        return False
    return bool(np.all(g.eval(xs + sep) > gx))


def sample_points(nx: int, ny: int, *, rng=None, collar: float = 0.0) -> np.ndarray:
    """Grid (or random, if ``rng`` is given) sample of the fundamental domain."""
    if rng is not None:
        x = rng.uniform(0.0, 1.0, nx * ny)
        y = rng.uniform(collar, 1.0 - collar, nx * ny)
        return np.column_stack([x, y])
    X, Y = np.meshgrid(np.arange(nx) / nx, np.linspace(collar, 1.0 - collar, ny))
    return np.column_stack([X.ravel(), Y.ravel()])
