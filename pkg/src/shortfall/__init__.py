"""Adjusted expected-shortfall risk toolkit.

Loss models with exact quantile/shortfall math, risk profiles and their
classification, the adjusted shortfall sup_p {ES_p(X) - g(p)} with dual
certificates and risk-sharing bounds, second-order dominance checks, the
complete-market optimizers, rolling CSV reports, and an HTTP/CLI surface.
"""

from .adjusted import (
    DEFAULT_ATOMS,
    AdjustedESResult,
    Allocation,
    DualCertificate,
    HomogeneityResult,
    InfConvolutionResult,
    adjusted_es,
    comparability_decomposition,
    default_allocations,
    dual_certificate,
    equal_split,
    has_p_tail_property,
    homogeneity_analysis,
    inf_convolution_value,
    is_acceptable,
    random_split,
    regulatory_arbitrage,
    residual_split,
)
from .dominance import (
    MinimumCheckResult,
    RampUtility,
    UtilityRequirement,
    acceptance_minimum_check,
    ssd_based_risk,
    ssd_dominates,
    utility_requirement,
)
from .errors import (
    ArgmaxAtOne,
    BadAllocation,
    BadInput,
    BadWeights,
    EmptySample,
    GridTooLarge,
    IncompatibleAtoms,
    InvalidProfile,
    NonMonotoneDates,
    NotESClass,
    NotVaRClass,
    OutOfRangeLevel,
    ParseError,
    ProfileNotFlatBelowP,
    ProfileNotNormalized,
    ShortfallError,
    TargetUnreachable,
    UnboundedQuantile,
    WindowTooLong,
)
from .market import (
    MarketModel,
    Position,
    SpectralFunctional,
    UtilityFn,
    brute_force_oracle,
    comonotone_rearrangement,
    construct_optimal_Z,
    solve_problem_a,
    solve_problem_b,
    solve_problem_c,
    solve_problem_d,
    solve_problem_e,
    spectral_from_dict,
    utility_from_dict,
)
from .profiles import (
    BenchmarkESProfile,
    HFunction,
    HyperbolicProfile,
    PiecewiseConstantProfile,
    ProfileClass,
    SumProfile,
    TruncatedProfile,
    VaRBenchmark,
    benchmark_from_es_profile,
    classify,
    h_function,
    profile_from_dict,
    scale_profile,
    sum_profiles,
    truncate_profile,
    var_benchmark_from_profile,
)
from .quantiles import (
    ESCurve,
    GaussianLoss,
    StepQuantile,
    comonotone_mix,
    empirical_from_samples,
    es,
    es_curve,
    gaussian_es,
    var,
)
from .reports import (
    MODES,
    LossSeries,
    ReportRow,
    format_number,
    ingest,
    ingest_text,
    reference_level,
    render_report,
    rolling_report,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustedESResult",
    "Allocation",
    "ArgmaxAtOne",
    "BadAllocation",
    "BadInput",
    "BadWeights",
    "BenchmarkESProfile",
    "DEFAULT_ATOMS",
    "DualCertificate",
    "ESCurve",
    "EmptySample",
    "GaussianLoss",
    "GridTooLarge",
    "HFunction",
    "HomogeneityResult",
    "HyperbolicProfile",
    "IncompatibleAtoms",
    "InfConvolutionResult",
    "InvalidProfile",
    "LossSeries",
    "MODES",
    "MarketModel",
    "MinimumCheckResult",
    "NonMonotoneDates",
    "NotESClass",
    "NotVaRClass",
    "OutOfRangeLevel",
    "ParseError",
    "PiecewiseConstantProfile",
    "Position",
    "ProfileClass",
    "ProfileNotFlatBelowP",
    "ProfileNotNormalized",
    "RampUtility",
    "ReportRow",
    "ShortfallError",
    "SpectralFunctional",
    "StepQuantile",
    "SumProfile",
    "TargetUnreachable",
    "TruncatedProfile",
    "UnboundedQuantile",
    "UtilityFn",
    "UtilityRequirement",
    "VaRBenchmark",
    "WindowTooLong",
    "acceptance_minimum_check",
    "adjusted_es",
    "benchmark_from_es_profile",
    "brute_force_oracle",
    "classify",
    "comonotone_mix",
    "comonotone_rearrangement",
    "comparability_decomposition",
    "construct_optimal_Z",
    "default_allocations",
    "dual_certificate",
    "empirical_from_samples",
    "equal_split",
    "es",
    "es_curve",
    "format_number",
    "gaussian_es",
    "h_function",
    "has_p_tail_property",
    "homogeneity_analysis",
    "inf_convolution_value",
    "ingest",
    "ingest_text",
    "is_acceptable",
    "profile_from_dict",
    "random_split",
    "reference_level",
    "regulatory_arbitrage",
    "render_report",
    "residual_split",
    "rolling_report",
    "scale_profile",
    "solve_problem_a",
    "solve_problem_b",
    "solve_problem_c",
    "solve_problem_d",
    "solve_problem_e",
    "spectral_from_dict",
    "ssd_based_risk",
    "ssd_dominates",
    "sum_profiles",
    "truncate_profile",
    "utility_from_dict",
    "utility_requirement",
    "var",
    "var_benchmark_from_profile",
]
