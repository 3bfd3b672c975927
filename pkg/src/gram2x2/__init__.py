"""Exact finite-size statistics of 2x2 Gram matrices with a variance profile."""

from .core import (
    ChannelMatrix,
    EigenPair,
    GramMatrix2,
    PartialProfile,
    ProfileClass,
    VarianceProfile,
    classify,
    eigenvalues,
    gram_from_channel,
    profile_from_distances,
    profile_new,
    profile_normalize_total,
    profile_transpose,
)
from .dist import (
    QuadratureConfig,
    a_factor,
    cdf_max,
    cdf_max_small_x,
    cdf_min,
    cdf_min_small_x,
    eig_pdf_general,
    eig_pdf_normalization,
    eig_pdf_partial,
    inv_cdf_min,
    matrix_pdf,
    matrix_pdf_partial,
    perturb_distinct,
)
from .errors import (
    DegenerateParameters,
    DomainError,
    EmptySample,
    Gram2x2Error,
    InvalidEigenOrder,
    NoConvergence,
    NonPositiveVariance,
    NotPSD,
    QuadratureNoConvergence,
    SingularChannel,
)
from .specfun import exp_scaled_sinhc_sqrt, expint_ei, g_func, sinhc_sqrt

__version__ = "0.1.0"
