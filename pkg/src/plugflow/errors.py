"""Exception types shared across the package."""


class PlugError(Exception):
    """Base class for all package errors."""


class ConfigError(PlugError):
    """Bad configuration file or parameter combination."""


class DomainError(PlugError):
    """Input outside an operation's stated precondition."""


class GeometryError(PlugError):
    """A geometric query hit an inconsistent state (point not on a face, ...)."""


class ConstructionInvalid(PlugError):
    """A constructed object failed one of its defining checks."""


class NotInDomain(PlugError):
    """A partial map was evaluated outside its domain.

    `stage` names the failing factor for composed maps.
    """

    def __init__(self, msg: str = "", stage: int | None = None):
        super().__init__(msg or "point not in the map's domain")
        self.stage = stage


class InvariantViolation(PlugError):
    """Recorded data contradicts a structural invariant of the dynamics."""


class ResolutionError(PlugError):
    """Adaptive refinement exceeded its sample budget."""


class RealizationError(PlugError):
    """A section-map iterate could not be matched by an actual flow arc."""
