"""Exception hierarchy for the package."""


class TrajWarehouseError(Exception):
    """Base class for every error raised by trajwarehouse."""


# core model
class InvariantViolation(TrajWarehouseError, ValueError):
    pass


class AlternationViolation(InvariantViolation):
    """Stops and moves do not alternate, or their timestamps overlap."""


class EmptyTrajectory(InvariantViolation):
    """A trajectory needs at least one move."""


# segmentation
class SegmentationError(TrajWarehouseError, ValueError):
    pass


class InvalidParams(SegmentationError):
    pass


class EmptyInput(SegmentationError):
    pass


class UnsortedInput(SegmentationError):
    pass


class MixedMicIds(SegmentationError):
    pass


class NoStopsDetected(SegmentationError):
    pass


# itinerary
class ItineraryError(TrajWarehouseError):
    pass


class EmptyPlan(ItineraryError, ValueError):
    pass


class OverlappingWindows(ItineraryError, ValueError):
    pass


class DuplicateDestination(ItineraryError, ValueError):
    pass


class PlanExhausted(ItineraryError):
    pass


class NoEquivalentAvailable(ItineraryError):
    """The active destination is blocked and has no usable equivalent.

    The destination has already been skipped when this is raised; the
    resulting itinerary state is available as ``state``.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


# warehouse
class WarehouseError(TrajWarehouseError):
    pass


class DuplicateNaturalId(WarehouseError, ValueError):
    pass


class DanglingReference(WarehouseError, ValueError):
    pass


class IoFailure(WarehouseError, OSError):
    pass


class ManifestMismatch(WarehouseError):
    pass


class SchemaVersionMismatch(WarehouseError):
    pass


# queries
class QueryError(TrajWarehouseError, ValueError):
    pass


class NegativeThreshold(QueryError):
    pass


class UnknownKind(QueryError):
    pass


class QueryWarning(UserWarning):
    """Emitted when a query names a trajectory, delegation or country that is absent."""


# generator
class InvalidSpec(TrajWarehouseError, ValueError):
    pass


class InfeasibleParams(TrajWarehouseError, ValueError):
    pass
