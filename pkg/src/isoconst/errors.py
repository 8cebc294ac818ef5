"""Exception types shared across the package."""


class IsoconstError(Exception):
    """Base class for all package-specific errors."""


class SizeError(IsoconstError):
    """Requested sample or matrix size is out of the supported range."""


class DegenerateInput(IsoconstError):
    """Point set whose hull is not full-dimensional, or whose facet
    structure is ambiguous at the configured tolerance."""


class FacetBudgetExceeded(IsoconstError):
    """Hull construction produced more facets than the configured cap."""


class CenterOutside(IsoconstError):
    """Inradius center does not lie inside the polytope."""


class DegenerateSimplex(IsoconstError):
    """Simplex vertices are affinely dependent at tolerance."""


class ApexOnBoundary(IsoconstError):
    """Cone decomposition apex is not strictly interior."""


class NumericallySingular(IsoconstError):
    """Covariance (or another matrix) is singular at working precision."""


class NotVolumePreserving(IsoconstError):
    """Affine map's linear part does not have |det| = 1 at tolerance."""


class TooFewAccepted(IsoconstError):
    """Rejection sampler accepted too few points for reliable estimates."""


class MissingSamples(IsoconstError):
    """Trial records do not carry the retained point matrices."""
