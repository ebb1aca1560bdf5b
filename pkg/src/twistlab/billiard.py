"""Billiard map inside an ellipse in arclength-angle coordinates.

A state ``(x, theta)`` is an impact point at arclength ``x`` (counted
counterclockwise from the vertex ``(a, 0)``) and the angle ``theta`` in
``(0, pi)`` from the unit tangent to the outgoing velocity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BPoly, PPoly

from .cover import AnnulusLift
from .errors import GrazingInput

TWO_PI = 2.0 * np.pi
GRAZING = 1e-9
BILLIARD_EPS_EQ = 1e-8

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class BilliardState:
    x: float
    theta: float


class Ellipse:
    """The table ``x^2/a^2 + y^2/b^2 = 1`` with an arclength lookup table.

    The parametrisation is ``Gamma(t) = (a cos t, b sin t)``. Arclength at the
    table nodes comes from composite 16-point Gauss-Legendre quadrature of the
    speed. Between nodes both ``s(t)`` and its inverse are quintic Hermite
    interpolants built from exact first and second derivatives, and the
    inverse is polished with one Newton step.
    """

    def __init__(self, a: float, b: float, nodes: int = 4096):
        if not (a > 0 and b > 0 and a >= b):
            raise ValueError(f"need a >= b > 0, got a={a}, b={b}")
        self.a = float(a)
        self.b = float(b)
        self._t = np.linspace(0.0, TWO_PI, nodes + 1)
        panels = self._panel_integrals(self._t[:-1], self._t[1:])
        self._s = np.concatenate([[0.0], np.cumsum(panels)])
        self.perimeter = float(self._s[-1])
        v = self.speed(self._t)
        dv = self.speed_derivative(self._t)
        fwd = BPoly.from_derivatives(self._t, np.column_stack([self._s, v, dv]))
        inv = BPoly.from_derivatives(self._s, np.column_stack([self._t, 1.0 / v, -dv / v**3]))
        # power basis evaluates several times faster than Bernstein
        self._forward = PPoly.from_bernstein_basis(fwd)
        self._inverse = PPoly.from_bernstein_basis(inv)

    def __repr__(self):
        return f"Ellipse(a={self.a}, b={self.b})"

    def speed(self, t):
        return np.hypot(self.a * np.sin(t), self.b * np.cos(t))

    def speed_derivative(self, t):
        return (self.a**2 - self.b**2) * np.sin(t) * np.cos(t) / self.speed(t)

    def _panel_integrals(self, lo, hi):
        lo = np.asarray(lo, dtype=float)[..., None]
        hi = np.asarray(hi, dtype=float)[..., None]
        half = 0.5 * (hi - lo)
        ts = lo + half * (_GL_NODES + 1.0)
        return (half * (_GL_WEIGHTS * self.speed(ts))).sum(axis=-1)

    def arclength(self, t):
        """Arclength from ``t = 0`` to ``t`` for any real ``t`` (lifted)."""
        t = np.asarray(t, dtype=float)
        turns = np.floor(t / TWO_PI)
        r = t - turns * TWO_PI
        return turns * self.perimeter + self._forward(r)

    def parameter(self, s):
        """Inverse of :meth:`arclength` (lifted)."""
        s = np.asarray(s, dtype=float)
        turns = np.floor(s / self.perimeter)
        r = s - turns * self.perimeter
        t = self._inverse(r)
        t = t - (self._forward(t) - r) / self.speed(t)
        return t + turns * TWO_PI

    def point(self, t):
        return np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)

    def frame(self, t):
        """Unit tangent (counterclockwise) and inward unit normal at parameter ``t``."""
        tx, ty = -self.a * np.sin(t), self.b * np.cos(t)
        nrm = np.hypot(tx, ty)
        T = np.stack([tx / nrm, ty / nrm], axis=-1)
        N = np.stack([-T[..., 1], T[..., 0]], axis=-1)
        return T, N

    def implicit_residual(self, pts):
        pts = np.asarray(pts, dtype=float)
        return (pts[..., 0] / self.a) ** 2 + (pts[..., 1] / self.b) ** 2 - 1.0


def point_and_tangent(e: Ellipse, s: float):
    """Position on the table and unit counterclockwise tangent at arclength ``s``."""
    t = e.parameter(s)
    T, _ = e.frame(t)
    return e.point(t), T


def _collide(e: Ellipse, t0, theta):
    """Vectorised collision in the parameter ``t``.

    Returns the lifted parameter ``t1`` in ``(t0, t0 + 2 pi]``, the outgoing
    angle ``theta1`` at the new impact and the chord length ``tau``.
    """
    a, b = e.a, e.b
    t0 = np.asarray(t0, dtype=float)
    theta = np.asarray(theta, dtype=float)
    c0, s0 = np.cos(t0), np.sin(t0)
    px, py = a * c0, b * s0
    tx, ty = -a * s0, b * c0
    nrm = np.hypot(tx, ty)
    tx, ty = tx / nrm, ty / nrm
    ct, st = np.cos(theta), np.sin(theta)
    # inward normal is the tangent rotated by +90 degrees
    vx = ct * tx - st * ty
    vy = ct * ty + st * tx
    ia2, ib2 = 1.0 / (a * a), 1.0 / (b * b)
    A = vx * vx * ia2 + vy * vy * ib2
    B = 2.0 * (px * vx * ia2 + py * vy * ib2)
    # P is on the conic, so lambda = 0 is a root; the other is -B/A
    lam = -B / A
    t1 = np.arctan2((py + lam * vy) / b, (px + lam * vx) / a)
    dt = np.mod(t1 - t0, TWO_PI)
    dt = np.where(dt == 0.0, TWO_PI, dt)
    t1 = t0 + dt
    c1, s1 = np.cos(t1), np.sin(t1)
    ux, uy = -a * s1, b * c1
    nrm1 = np.hypot(ux, uy)
    ux, uy = ux / nrm1, uy / nrm1
    # theta1 = angle from T1 to the reflected velocity: tangential part kept, normal part flipped
    theta1 = np.arctan2(-(vy * ux - vx * uy), vx * ux + vy * uy)
    tau = np.hypot(a * c1 - px, b * s1 - py)
    return t1, theta1, tau


def _check_grazing(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < GRAZING) or np.any(theta > np.pi - GRAZING):
        raise GrazingInput("theta within 1e-9 of 0 or pi; the collision map is defined there only by limit")


def next_collision(e: Ellipse, st: BilliardState) -> BilliardState:
    _check_grazing(st.theta)
    t0 = e.parameter(st.x)
    t1, theta1, _ = _collide(e, t0, st.theta)
    x1 = float(np.mod(e.arclength(t1), e.perimeter))
    return BilliardState(x1, float(theta1))


def billiard_orbit(e: Ellipse, st: BilliardState, n: int) -> np.ndarray:
    """``n`` collisions as rows ``(x, theta)``; ``x`` is lifted (continuous)."""
    _check_grazing(st.theta)
    out = np.empty((n + 1, 2))
    t = float(e.parameter(st.x))
    th = st.theta
    out[0] = st.x, th
    s_offset = st.x - float(e.arclength(t))
    turns = 0
    for k in range(1, n + 1):
        t, th, _ = _collide(e, t, th)
        t, th = float(t), float(th)
        # keep t small so cos/sin stay accurate over long orbits
        if t >= TWO_PI:
            t -= TWO_PI
            turns += 1
        out[k] = float(e.arclength(t)) + turns * e.perimeter + s_offset, th
    return out


def involution(st: BilliardState) -> BilliardState:
    return BilliardState(st.x, np.pi - st.theta)


def as_annulus_lift(e: Ellipse) -> AnnulusLift:
    """The billiard map as a lift of ``T x [0, 1]`` with ``x/|Gamma|`` and ``theta/pi``.

    The grazing boundaries are completed by continuity: ``y = 0`` is the
    identity and ``y = 1`` is the full turn ``x -> x + 1``. Interior images
    are lifted into ``(x, x + 1]``.
    """
    P = e.perimeter

    def F(X, Y):
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        X, Y = np.broadcast_arrays(X, Y)
        X1 = np.where(Y >= 1.0, X + 1.0, X)
        Y1 = Y.copy()
        inner = (Y > 0.0) & (Y < 1.0)
        if np.any(inner):
            xi, yi = X[inner], Y[inner]
            theta = np.pi * yi
            _check_grazing(theta)
            base = np.floor(xi)
            s = (xi - base) * P
            t0 = e.parameter(s)
            t1, theta1, _ = _collide(e, t0, theta)
            s1 = e.arclength(t1)
            X1[inner] = base + s1 / P
            Y1[inner] = theta1 / np.pi
        if X1.ndim == 0:
            return float(X1), float(Y1)
        return X1, Y1

    return AnnulusLift(F, f"billiard(a={e.a:g},b={e.b:g})", BILLIARD_EPS_EQ, {"kind": "billiard"})


@dataclass(frozen=True)
class TwistDerivativeReport:
    finite_difference: float
    tau: float
    theta: float
    theta1: float
    formula: float  # tau / sin(theta1): landing-angle form of the identity
    formula_initial: float  # tau / sin(theta): literal initial-angle form
    abs_residual: float
    rel_residual: float


def twist_derivative_check(e: Ellipse, st: BilliardState, h: float = 1e-6) -> TwistDerivativeReport:
    """Central difference of ``x1`` in ``theta`` against the chord identity.

    Rotating the outgoing direction by ``d theta`` moves the far end of the
    chord by ``tau d theta`` perpendicular to it; the chord meets the table at
    the landing angle ``theta1``, so ``dx1/dtheta = tau / sin(theta1)``.
    """
    if not (2 * h < st.theta < np.pi - 2 * h):
        raise GrazingInput("need theta in (2h, pi - 2h)")
    t0 = e.parameter(st.x)
    s0 = e.arclength(t0)
    ts, ths, taus = _collide(e, np.full(3, t0), np.array([st.theta - h, st.theta, st.theta + h]))
    s1 = e.arclength(ts) - s0
    fd = float((s1[2] - s1[0]) / (2.0 * h))
    tau, th1 = float(taus[1]), float(ths[1])
    formula = tau / np.sin(th1)
    return TwistDerivativeReport(
        fd, tau, float(st.theta), th1, float(formula), float(tau / np.sin(st.theta)),
        abs(fd - formula), abs(fd - formula) / abs(formula),
    )
