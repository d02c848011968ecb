"""Exception hierarchy shared by every ruledsurf module."""


class GeometryError(ValueError):
    """Base class for all geometric precondition failures."""


class NotOnManifold(GeometryError):
    pass


class NotTangent(GeometryError):
    pass


class NotUnit(GeometryError):
    pass


class UnsupportedModel(GeometryError):
    pass


class DegenerateCurve(GeometryError):
    pass


class OutOfDomain(GeometryError):
    pass


class SingularPoint(GeometryError):
    pass


class NotStriction(GeometryError):
    pass


class CylindricalSurface(GeometryError):
    pass


class ArctanhDomain(GeometryError):
    pass


class NotFlat(GeometryError):
    pass


class NotNormal(GeometryError):
    pass


class NotPositiveDefinite(GeometryError):
    pass


class FrameNotOrthonormal(GeometryError):
    pass


class DegeneratePlane(GeometryError):
    pass


class PreconditionViolated(GeometryError):
    pass


class InvalidAngle(GeometryError):
    pass


class BoundaryNode(GeometryError):
    pass


class StepFailure(GeometryError):
    pass


class ProjectionPole(GeometryError):
    def __init__(self, message, nodes=()):
        super().__init__(message)
        self.nodes = list(nodes)


class ConfigError(ValueError):
    """Invalid CLI configuration; the message names the offending field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
