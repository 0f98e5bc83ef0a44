"""Bures metrics, distances, curvatures and priors for families of density matrices."""

from .bures import (
    bures_distance,
    bures_distance_commuting,
    fidelity,
    hs_on_roots_metric,
    metric_at,
    metric_from_distance,
    root_fidelity,
)
from .ensemble import EnsembleSpec, averaged_matrix, eigen_branches, multiplicity
from .errors import (
    AccuracyError,
    BoundaryError,
    BuresError,
    ConvergenceError,
    DomainError,
    IntegrabilityError,
    InvariantViolation,
    NotHermitianError,
    NotPSDError,
    PreconditionError,
    RankDeficiencyError,
    ShapeError,
    SizeError,
)
from .families import COMPLEX_QUBIT, REAL_QUBIT, ParamFamily, family_by_name, product_family
from .geometry import (
    BALL,
    DISK,
    HALF_LINE,
    MetricField,
    gaussian_curvature_2d,
    integrated_length,
    length_normalizer,
    normalize_prior,
    scalar_curvature,
    scalar_curvature_diag3,
    volume_element,
)
from .linalg import Spectrum, eigh, kron, tensor_power

__version__ = "0.1.0"
