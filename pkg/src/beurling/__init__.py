"""Numerical laboratory for a designer Beurling generalized prime system.

The construction starts from the generator function G(z) = 1 - (e^-z - e^-2z)/z,
whose rescaled translates plant zeta zeros on the curve sigma = 1 - 1/(log t)^(1/beta).
From the induced prime density f_C we build actual generalized primes, their
counting functions, the associated zeta functions, and the oscillation
experiments for psi(x) - x.
"""

from .gfun import eval_G, log_G, find_zeros, check_G_bounds, GZero
from .gdensity import (
    LogPiecewisePolynomial,
    convolution_power,
    g_poly,
    eval_g,
    eval_g_w,
    eval_g_derivative,
    mellin_log_G,
)
from .system import (
    SystemParams,
    DensitySpec,
    make_params,
    li,
    f_C,
    Pi_C,
    chebyshev_delta,
    mellin_f_C,
)
from .discretize import PrimeSequence, generate, exp_sum_discrepancy, pi_count
from .counting import (
    MixedMeasure,
    count_N,
    count_N_grid,
    psi,
    Pi_riemann,
    pi_from_psi,
    build_Pi_K,
    exp_star,
)
from .zeta import (
    zeta_from_measure,
    zeta_C_product,
    zeta_CK,
    log_zeta_gap,
    bound_survey,
    residue_aK,
    density_a,
    density_a_continuous,
)
from .analysis import (
    OscillationRecord,
    I_k,
    psi_C,
    envelope,
    dominant_terms,
    oscillation_search,
    N_error_profile,
    perron_check,
)

__version__ = "0.1.0"
