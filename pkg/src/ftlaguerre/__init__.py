"""ftlaguerre: exact spectral statistics for fixed-trace Laguerre ensembles.

Exact (rational-arithmetic) moments, cumulants, spectral densities and
correlation functions for the Laguerre unitary ensemble, its fixed-trace
variant, the general-beta Laguerre family, and Haar SU(N) — together with a
seeded Monte Carlo sampler used to cross-validate every closed form.
"""

__version__ = "0.1.0"

from .exact import (  # noqa: F401
    Composition,
    LaurentSeries,
    Rational,
    RationalPolynomial,
    compositions,
    cumulants_from_moments,
    hyp3f2_terminating,
    linear_solve_exact,
    moments_from_cumulants,
    pochhammer,
)
from .moments import (  # noqa: F401
    EnsembleParams,
    MomentTable,
    flue_moment_recurrence,
    flue_Tq_mean_3f2,
    flue_Tq_mean_narayana,
    flue_Tq_moment_schur,
    flue_Tq_moment_sum,
    flue_Tq_moment_table,
    lue_moment_recurrence,
    mp_limit_moment,
    narayana,
    purity_cdf_n2,
    purity_pdf_n2,
    tsallis_moment,
)
from .painleve import flue_purity_cumulants, piv_lue_cumulants  # noqa: F401
from .betarec import (  # noqa: F401
    beta_purity_moments,
    dimension_polynomial,
    duality_gap,
    flue_beta_kappa2,
)
from .density import (  # noqa: F401
    Certificate,
    FlueDensity,
    LueDensity,
    certify_matrix_ode_flue,
    certify_matrix_ode_lue,
    certify_ode_flue,
    certify_ode_mp,
    certify_ode_u2,
    density_csv,
    flue_density_from_lue,
    lue_density,
    mp_density,
    mp_support,
)
from .sampling import (  # noqa: F401
    RngSpec,
    SampleBatch,
    estimate_covariance,
    estimate_linear_statistic,
    sample_beta_laguerre,
    sample_flue,
    sample_lue,
    sample_sun,
)
from .suncorr import (  # noqa: F401
    bulk_residual,
    covariance_linear_stats,
    rho1_mode,
    rho1_sun,
    rho2_sun,
    rho2T_sun,
    trace_power_mean,
    truncated_pair_mode,
)
from .verification import available_checks, run_check, run_suite  # noqa: F401
