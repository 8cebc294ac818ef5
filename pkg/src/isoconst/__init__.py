"""Exact computation and simulation toolkit for random polytopes:
convex hulls with simplicial facet structure, closed-form volumes and
second moments, isotropic constants via covariance whitening, Monte
Carlo cross-checks, and seeded batch concentration experiments."""

from .bodies import cross_polytope, cube, reference_body, regular_simplex
from .distributions import (
    ConditionReport,
    DistributionSpec,
    SampleMatrix,
    sample_matrix,
    validate_star_conditions,
)
from .errors import (
    ApexOnBoundary,
    CenterOutside,
    DegenerateInput,
    DegenerateSimplex,
    FacetBudgetExceeded,
    IsoconstError,
    MissingSamples,
    NotVolumePreserving,
    NumericallySingular,
    SizeError,
    TooFewAccepted,
)
from .experiments import (
    ExperimentConfig,
    SummaryStats,
    TrialRecord,
    bernstein_tail_check,
    lemma_ratio_report,
    run_experiment,
    run_trial,
)
from .hull import (
    Facet,
    Polytope,
    chebyshev_center,
    contains,
    convex_hull,
    inradius,
    symmetric_hull,
    transform,
    validate_polytope,
)
from .isotropic import IsotropicResult, functional_value, isotropic_constant
from .oracle import MomentEstimate, cone_mc, rejection_mc, sample_uniform
from .polytope_moments import (
    MomentSummary,
    barycenter,
    cone_decomposition,
    covariance,
    moment_matrix,
    second_moment_scalar,
    summarize,
    volume,
)
from .simplex_geometry import (
    SimplexFacetMoment,
    facet_volume,
    regular_simplex_covariance,
    simplex_moment_matrix,
)

__version__ = "0.1.0"
