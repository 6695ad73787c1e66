"""Exception hierarchy shared across the package."""


class GeometryError(Exception):
    """Base class for all geometric / combinatorial failures."""


class EmptyPolyhedronError(GeometryError):
    """The halfspace system is infeasible."""


class UnsupportedGeometryError(GeometryError):
    """Valid input outside the supported fragment (e.g. lineality space)."""


class PartitionError(GeometryError):
    """A candidate partition violates a structural requirement.

    ``witness`` carries the offending point, piece index or face, depending
    on which check failed.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class LiftingError(GeometryError):
    """Lifting-function or lifted-polytope construction failed."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InputError(Exception):
    """Malformed job description (CLI layer); maps to exit code 2."""
