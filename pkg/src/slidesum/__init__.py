"""Sliding-sum bounds for short exponential sums, checked numerically on trace-function families."""

__version__ = "0.1.0"

from .ring import (  # noqa: E402
    POLE, CharacterSpec, DegenerateReduction, DomainError, FieldContext, LEGENDRE,
    RationalFunction, TRIVIAL, eval_rational, field_context, find_primitive_root, is_prime,
    mod_inverse, mod_pow,
)
from .tabulated import TabulatedFunction  # noqa: E402
from .spectral import (  # noqa: E402
    ConsistencyError, CorrelationProfile, SpectrumTable, completion_bound, correlations,
    correlations_direct, correlations_plancherel, dft,
)
from .families import (  # noqa: E402
    WeilBoundViolation, build_fourier_family, build_kloosterman, build_korobov, build_mixed_char,
    build_quadratic_phase, build_residue_indicator, build_sym_power, chebyshev_U,
    kloosterman_angles, legendre_family,
)
from .regions import (  # noqa: E402
    GapSpec, IntervalZm, NonProperGAP, SigmaReport, SubsetZm, enumerate_gap,
    geometric_progression_sum, sigma_statistic, sum_region, t_s_set, t_s_subgroup,
)
from .bounds import (  # noqa: E402
    BoundCheck, HReport, check_H, concrete_bound, gap_bound_ratio, mult_interval_bound,
    sigma_lower_bounds, sliding_bound_general, special_bounds, trace_interval_bound,
)
from .equidist import (  # noqa: E402
    ResidueReport, SampleStats, kloosterman_equidist, residue_count, sato_tate_cdf, weyl_uniform,
)

__all__ = [
    "__version__", "POLE", "CharacterSpec", "DegenerateReduction", "DomainError",
    "FieldContext", "LEGENDRE", "RationalFunction", "TRIVIAL", "eval_rational",
    "field_context", "find_primitive_root", "is_prime", "mod_inverse", "mod_pow",
    "TabulatedFunction", "ConsistencyError", "CorrelationProfile", "SpectrumTable",
    "completion_bound", "correlations", "correlations_direct", "correlations_plancherel",
    "dft", "WeilBoundViolation", "build_fourier_family", "build_kloosterman", "build_korobov",
    "build_mixed_char", "build_quadratic_phase", "build_residue_indicator", "build_sym_power",
    "chebyshev_U", "kloosterman_angles", "legendre_family", "GapSpec", "IntervalZm",
    "NonProperGAP", "SigmaReport", "SubsetZm", "enumerate_gap", "geometric_progression_sum",
    "sigma_statistic", "sum_region", "t_s_set", "t_s_subgroup", "BoundCheck", "HReport",
    "check_H", "concrete_bound", "gap_bound_ratio", "mult_interval_bound",
    "sigma_lower_bounds", "sliding_bound_general", "special_bounds", "trace_interval_bound",
    "ResidueReport", "SampleStats", "kloosterman_equidist", "residue_count", "sato_tate_cdf",
    "weyl_uniform",
]
