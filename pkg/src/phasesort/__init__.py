"""Sign-invariant and permutation-invariant frame encoders with exact
decoders, injectivity certificates, and optimal bi-Lipschitz constants."""

from .encoders import (
    BetaEmbedding,
    alpha,
    beta,
    beta_tilde,
    dist_hat_H,
    dist_hat_V,
    hadamard_split,
    sort_desc_columns,
)
from .errors import (
    AchievementFailure,
    AmbiguityDetected,
    DimensionError,
    InternalInconsistency,
    LipschitzViolation,
    NotAFrame,
    NotInRange,
    NotPhaseRetrievable,
    NumericalFailure,
    PhasesortError,
    SearchTooLarge,
    UnsupportedN,
)
from .frame_keys import (
    CertificateReport,
    Key,
    Partition,
    analysis,
    generate_key,
    has_complement_property,
    is_full_spark,
    is_phase_retrievable,
    is_universal_key,
    synthesis_left_inverse,
)
from .inversion import RecoveryResult, invert_beta, invert_beta_tilde, omega
from .lipschitz import (
    AchievementResult,
    LipschitzReport,
    RatioScanReport,
    Witnesses,
    build_report,
    check_achievement,
    lower_constant,
    ratio_scan,
    upper_constant,
)
from .numerics import (
    DEFAULT_TOL,
    SvdResult,
    ToleranceConfig,
    least_squares,
    rank,
    sigma_k,
    svd,
)

__version__ = "0.1.0"

__all__ = [
    "AchievementFailure",
    "AchievementResult",
    "AmbiguityDetected",
    "BetaEmbedding",
    "CertificateReport",
    "DEFAULT_TOL",
    "DimensionError",
    "InternalInconsistency",
    "Key",
    "LipschitzReport",
    "LipschitzViolation",
    "NotAFrame",
    "NotInRange",
    "NotPhaseRetrievable",
    "NumericalFailure",
    "Partition",
    "PhasesortError",
    "RatioScanReport",
    "RecoveryResult",
    "SearchTooLarge",
    "SvdResult",
    "ToleranceConfig",
    "UnsupportedN",
    "Witnesses",
    "alpha",
    "analysis",
    "beta",
    "beta_tilde",
    "build_report",
    "check_achievement",
    "dist_hat_H",
    "dist_hat_V",
    "generate_key",
    "hadamard_split",
    "has_complement_property",
    "invert_beta",
    "invert_beta_tilde",
    "is_full_spark",
    "is_phase_retrievable",
    "is_universal_key",
    "least_squares",
    "lower_constant",
    "omega",
    "rank",
    "ratio_scan",
    "sigma_k",
    "sort_desc_columns",
    "svd",
    "synthesis_left_inverse",
    "upper_constant",
]
