"""Ready-made pipelines for two worked families of coefficients."""

from .airy import airy_ai, airy_ai_prime, map_airy_density
from .planar import (
    PlanarCoreQuery,
    coalescence_diagnostic,
    p_nk,
    planar_core_estimate,
    planar_core_exact,
    read_sequence,
)
from .trivariate import TrivariateQuery, inclusion_exclusion, trivariate_estimate, trivariate_exact
