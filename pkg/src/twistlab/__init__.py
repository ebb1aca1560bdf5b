"""Rotation numbers, rotation sets and twist intervals of annulus twist maps."""

from .annulus import (
    TwistInterval,
    TwistReport,
    RotationSetEstimate,
    boundary_twist_condition,
    check_twist,
    rotation_sample,
    rotation_set,
    twist_interval,
)
from .billiard import (
    BilliardState,
    Ellipse,
    as_annulus_lift,
    billiard_orbit,
    next_collision,
    twist_derivative_check,
)
from .circle import (
    LockingInterval,
    RotationEstimate,
    detect_rational,
    find_periodic_point,
    locking_interval,
    rotation_number,
    rotation_number_adaptive,
)
from .cover import AnnulusLift, CircleLift, boundary_restriction, iterate, normalize_lift
from .curves import (
    CurveCandidate,
    GraphReport,
    RecurrenceMap,
    birkhoff_graph_check,
    curve_rotation_number,
    distinct_rotation_check,
    recurrence_scan,
    trace_curve,
)
from .errors import TwistlabError
from .families import EYE_BANDS, FamilySpec, arnold_circle, make_family, rigid

__version__ = "0.1.0"
