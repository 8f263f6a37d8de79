"""Exception hierarchy.

Every error raised on purpose by the package derives from ``PayneLabError``.
The CLI maps the two families below onto exit codes: ``InputError`` -> 2,
``SolverError`` -> 3.
"""


class PayneLabError(Exception):
    pass


class InputError(PayneLabError, ValueError):
    """Malformed or out-of-contract input."""


class SolverError(PayneLabError, RuntimeError):
    """A numerical procedure failed to produce a trustworthy answer."""


# strip_mode
class NoRootInBracket(SolverError):
    pass


class DegenerateNormalization(SolverError):
    pass


class SingularPencil(SolverError):
    pass


# convex_geometry
class PolygonError(InputError):
    pass


class NotConvex(PolygonError):
    def __init__(self, message, vertex_index=None, vertex=None):
        super().__init__(message)
        self.vertex_index = vertex_index
        self.vertex = vertex


class PolygonParseError(PolygonError):
    def __init__(self, message, lineno=None):
        super().__init__(message if lineno is None else f"line {lineno}: {message}")
        self.lineno = lineno


class NotUnit(InputError):
    pass


class DegenerateWidth(PolygonError):
    pass


# eigensolver
class TooCoarse(InputError):
    pass


class NoConvergence(SolverError):
    pass


class IndefinitePencil(SolverError):
    pass


class NonPositiveU(InputError):
    pass


# inequality_lab
class MismatchedDomain(InputError):
    pass


class NoCrossing(SolverError):
    pass
