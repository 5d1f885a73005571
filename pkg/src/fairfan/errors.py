"""Exception hierarchy shared by the fairfan modules."""


class FairFanError(ValueError):
    """Base class for all fairfan input/validation errors."""


class TooFewVertices(FairFanError):
    pass


class NotConvex(FairFanError):
    def __init__(self, message: str, triple: tuple[int, int, int] | None = None):
        super().__init__(message)
        self.triple = triple


class DegenerateEdge(FairFanError):
    pass


class PointNotInRegion(FairFanError):
    pass


class ApexOnVertex(FairFanError):
    pass


class PointInside(FairFanError):
    pass


class PointNotInterior(FairFanError):
    pass


class BadFractions(FairFanError):
    pass


class MalformedFan(FairFanError):
    pass


class EmptyPartition(FairFanError):
    pass


class BadWindow(FairFanError):
    pass


class AllInfinite(FairFanError):
    pass
