"""Partial-copula statistical computing: pair-copula models, the z-mixture
partial copula, C-vine simulation, empirical dependence measures, and a CLI.
"""

from .errors import (
    BracketError,
    DomainError,
    EvaluationError,
    InputError,
    InversionError,
    ParcopError,
    UndefinedStatisticError,
)
from .measures import (
    DependenceSummary,
    kdd_emp,
    kendall_emp,
    partial_correlation,
    pearson,
    spearman_emp,
)
from .pair_copulas import (
    CLAYTON,
    FAMILIES,
    FGM,
    FRANK,
    GAUSSIAN,
    GUMBEL,
    INDEPENDENCE,
    PairCopulaSpec,
    cdf,
    h1,
    h1_inv,
    h2,
    h2_inv,
    kdd_analytic,
    qpd_check,
    rho_s_analytic,
    tau_analytic,
)
from .partial import (
    BoundCertificate,
    ConditionalFamily,
    PseudoPairs,
    ThetaFunction,
    certify_bounds,
    conditional_kdd_sup,
    partial_cdf,
    partial_rho,
    partial_tau,
    pseudo_observations,
)
from .sampler import (
    PitfallSample,
    SampleTriples,
    ScenarioConfig,
    VineModel,
    sample_cvine,
    sample_pitfall,
    scenario_table,
)

__version__ = "0.1.0"
