"""Exception taxonomy shared by all fraclab modules."""


class FracLabError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(FracLabError, ValueError):
    """A scalar parameter violates its admissible range (names the bound)."""


class GridError(FracLabError, ValueError):
    """Degenerate or inconsistent grid construction."""


class GeometryError(FracLabError, ValueError):
    """A set touches or exceeds the domain boundary."""


class ResolutionError(FracLabError, ValueError):
    """An interval covers no grid node: the mesh is too coarse for it."""


class NumericalError(FracLabError, RuntimeError):
    """A solver failed to converge or a factorization broke down."""


class InsufficientDataError(FracLabError, ValueError):
    """Too few samples inside a fit window."""


class ConsistencyError(FracLabError, RuntimeError):
    """An internal invariant (monotonicity, symmetry) was violated."""


class ConfigError(FracLabError, ValueError):
    """Invalid run configuration: unknown key, bad type, or violated constraint."""
