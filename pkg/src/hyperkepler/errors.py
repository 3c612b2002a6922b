"""Exception hierarchy shared by all hyperkepler modules."""


class HyperKeplerError(Exception):
    """Base class for every error raised by this package."""


class ConstraintViolation(HyperKeplerError, ValueError):
    """An ambient point does not lie on the hyperboloid."""


class DegeneratePoint(HyperKeplerError, ValueError):
    """Spatial part of an ambient point vanishes; angles are undefined."""


class SingularConfiguration(HyperKeplerError, ValueError):
    """sin(theta) = 0 with nonzero azimuthal momentum."""


class NoRealMotion(HyperKeplerError, ValueError):
    """Energy lies below the bottom of the effective potential."""


class DegenerateLatus(HyperKeplerError, ValueError):
    """L^2 = alpha R, where the orbit parameter p is undefined."""


class NotACircle(HyperKeplerError, ValueError):
    pass


class NotBounded(HyperKeplerError, ValueError):
    pass


class NotUnbound(HyperKeplerError, ValueError):
    pass


class OutOfRange(HyperKeplerError, ValueError):
    """Argument outside the domain where a closed form is valid."""


class DegenerateAngularMomentum(HyperKeplerError, ValueError):
    pass


class NotPlanar(HyperKeplerError, ValueError):
    pass


class StepFailure(HyperKeplerError, RuntimeError):
    """Adaptive step control could not meet the requested tolerance."""
