"""Exception types raised across twistlab."""


class TwistlabError(Exception):
    """Base class for all twistlab errors."""


class AmbiguousNormalization(TwistlabError):
    """The rotation estimate of the lower boundary straddles an integer."""


class DomainEscape(TwistlabError):
    """A map evaluation left the strip R x [0, 1]."""


class NonMonotoneDetected(TwistlabError):
    """A circle lift failed the strict monotonicity sampling."""


class BudgetExceeded(TwistlabError):
    """The iteration cap was reached before the requested tolerance."""


class TongueMissed(TwistlabError):
    """No parameter in the scanned range produces the requested p/q."""


class InvalidFamily(TwistlabError):
    """A family constructor received parameters violating its preconditions."""


class NotLocked(TwistlabError):
    """A suspension was requested over a parameter range that is not mode-locked."""


class GrazingInput(TwistlabError):
    """A billiard state too close to tangential incidence."""


class InsufficientDensity(TwistlabError):
    """A curve candidate has gaps too wide for slope estimates."""


class NotInvariant(TwistlabError):
    """A curve candidate is not mapped onto itself within tolerance."""


class NotDisjoint(TwistlabError):
    """Two curve candidates intersect at the sampled resolution."""


class ConfigError(TwistlabError):
    """A run configuration is malformed or names unknown keys."""
