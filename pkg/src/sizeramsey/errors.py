"""Exception hierarchy shared across the package."""


class SizeRamseyError(Exception):
    """Base class for all package-specific errors."""


# -- graph construction / generators -----------------------------------------

class OddOrder(SizeRamseyError):
    """A 3-regular graph needs an even number of vertices."""


class GenerationTimeout(SizeRamseyError):
    """Rejection-sampling budget exhausted."""


class TooSmall(SizeRamseyError):
    """Input graph below the minimum size the operation supports."""


class OverlappingFamily(SizeRamseyError):
    """A family of vertex sets that must be disjoint is not."""


# -- decomposition ------------------------------------------------------------

class IsK4(SizeRamseyError):
    """K4 admits no path/cycle block decomposition."""


class NotConnected(SizeRamseyError):
    pass


class DegreeTooHigh(SizeRamseyError):
    pass


class HasTriangle(SizeRamseyError):
    pass


class NotBipartite(SizeRamseyError):
    pass


class TooLargeForExact(SizeRamseyError):
    """Instance exceeds the bound up to which the exact algorithm is run."""


# -- regularity ---------------------------------------------------------------

class EmptySide(SizeRamseyError):
    pass


class Overlap(SizeRamseyError):
    pass


class Exhausted(SizeRamseyError):
    """Iterative cleanup emptied one of the sets."""


class SliceTooLarge(SizeRamseyError):
    """Requested slice exceeds a sampled neighbourhood."""


# -- embedding ----------------------------------------------------------------

class EmbeddingFailure(SizeRamseyError):
    """Base for all embedding-run failures; carries a machine-readable kind."""

    kind = "embedding-failure"


class Terminated(EmbeddingFailure):
    """All bucketed candidate sets were empty for some pattern vertex."""

    kind = "terminated"

    def __init__(self, vertex, occupancy=None):
        super().__init__(f"no free candidate for pattern vertex {vertex}")
        self.vertex = vertex
        self.occupancy = list(occupancy) if occupancy is not None else None


class ClosureFailed(EmbeddingFailure):
    """Long-cycle closure search exhausted without finding a closing edge."""

    kind = "closure-failed"


class BucketExhausted(EmbeddingFailure):
    """Both host cells failed the free-candidate threshold for a vertex."""

    kind = "bucket-exhausted"

    def __init__(self, vertex):
        super().__init__(f"no cell with enough free candidates for vertex {vertex}")
        self.vertex = vertex


class BudgetExceeded(EmbeddingFailure):
    """Backtracking node budget hit before the search space was exhausted."""

    kind = "budget-exceeded"


class ColoringInvalid(SizeRamseyError):
    """Vertex colouring violates the distance-2 requirement."""


class PartitionDegenerate(EmbeddingFailure):
    """Cleanup emptied a host cell."""

    kind = "partition-degenerate"


# -- arrowing / experiments ----------------------------------------------------

class TooManyEdges(SizeRamseyError):
    """Exhaustive arrowing is limited to hosts with few edges."""


class MalformedCSV(SizeRamseyError):
    pass


class ConfigError(SizeRamseyError):
    pass
