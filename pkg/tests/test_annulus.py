import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistlab.annulus import (
    boundary_twist_condition,
    check_twist,
    checkpoints,
    comparison_gap,
    rotation_sample,
    rotation_samples,
    rotation_set,
    twist_interval,
)
from twistlab.cover import AnnulusLift
from twistlab.families import shear

from conftest import family


def brute_force_averages(phi, psi, x, y, ks):
    """Displacement averages of (x + phi(y), psi(y)) by direct summation."""
    out, disp, k = [], 0.0, 0
    for target in ks:
        while k < target:
            disp += phi(y)
            y = psi(y)
            k += 1
        out.append(disp / k)
    return out


def test_check_twist_identity_shear():
    rep = check_twist(shear("identity"), 32, 32)
    assert rep.is_twist
    assert rep.min_increment == pytest.approx(1 / 31, abs=1e-15)


def test_check_twist_float_family():
    assert check_twist(family("float").lift, 16, 16).is_twist


def test_check_twist_degenerate():
    rep = check_twist(AnnulusLift(lambda x, y: (x + 0.3, y)), 8, 8)
    assert not rep.is_twist and rep.min_increment == 0.0


def test_check_twist_needs_two_points():
    with pytest.raises(ValueError):
        check_twist(shear("identity"), 1, 4)


def test_twist_interval_examples(billiard_spec):
    assert twist_interval(shear("identity"), 1e-6).bounds == (0.0, 1.0)
    lo, hi = twist_interval(family("locked_suspension").lift, 1e-6).bounds
    assert lo == pytest.approx(0.5, abs=1e-6) and hi == pytest.approx(0.5, abs=1e-6)
    ti = twist_interval(billiard_spec.lift, 1e-6)
    assert ti.rho0.contains(0.0) and ti.rho1.contains(1.0)


@given(st.floats(0, 1))
def test_shear_sample_is_phi(y):
    s = rotation_sample(shear("square"), (0.0, y), 500)
    assert s.lower == pytest.approx(y * y, abs=1e-12)
    assert s.upper == pytest.approx(y * y, abs=1e-12)


def test_float_sample_against_brute_force():
    n = 3000
    ks = checkpoints(n, 3)
    want = brute_force_averages(lambda y: y, lambda y: y * y, 0.0, 0.5, ks)
    s = rotation_sample(family("float").lift, (0.0, 0.5), n)
    assert s.lower == pytest.approx(min(want), abs=1e-12)
    assert s.upper == pytest.approx(max(want), abs=1e-12)
    assert s.upper < 1e-3


def test_fixed_point_sample():
    s = rotation_sample(shear("identity"), (0.37, 0.0), 100)
    assert s.lower == s.upper == 0.0


def test_checkpoints_geometric():
    ks = checkpoints(10**4, 3)
    assert ks.tolist() == [4444, 6667, 10000]
    with pytest.raises(ValueError):
        checkpoints(2, 3)


def test_rotation_set_shear_support():
    est = rotation_set(shear("identity"), (16, 16), 200, bins=256)
    assert est.hull == (0.0, 1.0)
    assert np.allclose(np.unique(np.round(est.values, 12)), np.arange(16) / 15)
    assert est.contained


def test_rotation_set_float_concentrates():
    est = rotation_set(family("float").lift, (16, 16), 10**4)
    assert est.mass_near([0.0, 1.0], 1e-3) >= 0.95
    assert est.contained


def test_rotation_set_locked_narrow():
    est = rotation_set(family("locked_suspension").lift, (16, 16), 10**4)
    assert est.hull[1] - est.hull[0] <= 2e-4
    assert est.mass_near([0.5], 1e-4) == 1.0


def test_boundary_twist_condition_verdicts(billiard_spec):
    assert boundary_twist_condition(shear("identity"), 1e-5) is True
    assert boundary_twist_condition(billiard_spec.lift, 1e-5) is True
    locked = family("locked_suspension").lift
    for tol in (1e-3, 1e-5, 1e-7):
        assert boundary_twist_condition(locked, tol) is None


def test_threads_do_not_change_results():
    F = family("eye_map").lift
    pts = np.random.default_rng(3).uniform(0, 1, (40, 2))
    a = rotation_samples(F, pts, 300, threads=1)
    b = rotation_samples(F, pts, 300, threads=3)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


TWIST_ZOO = [("shear", {}), ("shear", {"phi": "half_sine"}), ("float", {}), ("float", {"psi": "sqrt"}),
             ("locked_suspension", {}), ("eye_map", {})]


@pytest.mark.parametrize("kind,params", TWIST_ZOO)
@given(x=st.floats(0, 1), y=st.floats(0, 1))
def test_containment_in_twist_interval(kind, params, x, y):
    F = family(kind, **params).lift
    ti = twist_interval(F, 1e-7)
    n = 2000
    s = rotation_sample(F, (x, y), n)
    slack = 1.0 / checkpoints(n, 3)[0]
    assert s.lower <= s.upper
    assert s.lower >= ti.rho0.lo - slack
    assert s.upper <= ti.rho1.hi + slack


@given(a=st.floats(-2, 2), b=st.floats(1e-3, 3), c=st.floats(0.3, 3))
def test_separation_for_any_increasing_shear(a, b, c):
    F = shear(lambda y: a + b * np.power(y, c))
    assert boundary_twist_condition(F, min(1e-5, b / 4)) is True


@pytest.mark.parametrize("kind,params", TWIST_ZOO)
@given(x=st.floats(-1, 1), y=st.floats(0, 1))
def test_orbits_dominate_lower_boundary_orbit(kind, params, x, y):
    F = family(kind, **params).lift
    assert comparison_gap(F, (x, y), 300) >= -1e-9


def test_locked_hull_shrinks_with_budget():
    F = family("locked_suspension").lift
    widths = []
    for n in (100, 1000, 10000):
        est = rotation_set(F, (8, 8), n, check_containment=False)
        widths.append(est.hull[1] - est.hull[0])
    assert widths[0] > widths[1] > widths[2]
