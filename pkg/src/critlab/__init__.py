"""critlab: a numerical laboratory for critical-line L-function statistics.

Layers:
    primes, characters, satake, coeffs   arithmetic and coefficient tables
    lfunc, rs, grid, cache               strip/critical-line evaluation
    moments, meanvalues                  quadrature and mean-value checks
    harper                               prime-block upper-bound apparatus
    deviations                           value-distribution statistics
    cli                                  command-line front door
"""

__version__ = "0.1.0"

from .characters import DirichletCharacter, character_group, euler_phi
from .coeffs import (
    MultiplicativeSeries,
    bigh_series,
    divisor_coeff,
    exp_integral_E1,
    h_coeff,
    partial_sum_sq,
    selberg_sum,
)
from .deviations import (
    TailGrid,
    empirical_phi,
    fubini_check,
    joint_tail_ratio,
    large_deviation_profile,
    mass_concentration_check,
    selberg_clt_test,
)
from .grid import CriticalLineGrid, log_abs_grid
from .cache import GridCache
from .harper import (
    HarperSchedule,
    PolyBank,
    build_schedule,
    chandee_audit,
    classify_sets,
    smoothed_lambda,
    truncation_ratio,
    truncation_remainder,
)
from .lfunc import (
    LFunctionId,
    dedekind_abelian,
    dedekind_id,
    dirichlet_id,
    dirichlet_l,
    hurwitz_from_characters,
    hurwitz_id,
    hurwitz_zeta,
    parse_selector,
    zeta,
    zeta_id,
)
from .meanvalues import (
    coprime_factorization_check,
    dirichlet_poly_SN,
    g_N_tail,
    gabriel_check,
    high_moment_check,
    mv_check,
    windowed_integrals,
)
from .moments import (
    FitResult,
    MomentSpec,
    joint_moment,
    moment_series,
    scaling_fit,
    twisted_hurwitz_moment,
)
from .primes import PrimeTable, sieve_primes
from .satake import SatakeSpec, lambda_pi, satake_from_character, satake_from_csv, zeta_spec
