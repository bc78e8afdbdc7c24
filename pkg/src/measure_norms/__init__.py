"""Norms of signed measures on finite metric spaces, with LP certificates."""

from .errors import (
    AxiomViolation,
    DuplicatePoint,
    IndexOutOfRange,
    Infeasible,
    InvalidInput,
    MeasureNormError,
    NotZeroCharge,
    NumericalFailure,
    PrimalDualGap,
    SpaceMismatch,
    UnknownDensity,
)
from .func import DiscreteFunction, integrate, lip_seminorm, max_norm, sum_norm, sup_norm
from .measure import SignedMeasure, add, charge, dirac, jordan, scale, sub, tv_norm, zero
from .metric import FiniteMetricSpace, from_matrix, from_points, random_space
from .norms import (
    NormCertificate,
    PrimalWitness,
    hanin_norm_dual,
    hanin_norm_primal,
    kr_norm_dual,
    kr_norm_primal,
    mk_norm_dual,
    mk_norm_primal,
    norm,
)

__version__ = "0.1.0"
