"""Exception types shared across the package.

Every failure raised by the library is a :class:`TiltMapError` subclass whose
class name doubles as the stable machine-readable error name printed by the
command line front end.  ``category`` selects the process exit code there:
``input`` -> 2, ``search`` -> 3, ``io`` -> 4.
"""


class TiltMapError(Exception):
    category = "input"

    @property
    def name(self) -> str:
        return type(self).__name__


# --- boundary ingestion -----------------------------------------------------

class MalformedDocument(TiltMapError):
    pass


class MissingProperty(TiltMapError):
    pass


class DegenerateRing(TiltMapError):
    pass


class SelfIntersectingRing(TiltMapError):
    pass


class AntipodalPoint(TiltMapError):
    pass


class ComponentTooSmall(TiltMapError):
    pass


class UnknownArea(TiltMapError):
    pass


# --- thematic / morph -------------------------------------------------------

class OutOfRange(TiltMapError):
    pass


class NegativeValue(TiltMapError):
    pass


class ConstantField(TiltMapError):
    pass


class TooManyBars(TiltMapError):
    pass


class InvalidSchedule(TiltMapError):
    pass


class InvalidTiltState(TiltMapError):
    pass


# --- spatial statistics / generation ----------------------------------------

class ZeroVariance(TiltMapError):
    pass


class NoNeighbors(TiltMapError):
    pass


class NonPositiveMean(TiltMapError):
    pass


class TargetUnreachable(TiltMapError):
    category = "search"

    def __init__(self, message: str, best_delta: float | None = None):
        super().__init__(message)
        self.best_delta = best_delta


class GenerationExhausted(TiltMapError):
    category = "search"


# --- sessions / serving -----------------------------------------------------

class NotHeld(TiltMapError):
    pass


class EmptyLog(TiltMapError):
    pass


class PortInUse(TiltMapError):
    category = "io"
