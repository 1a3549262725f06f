"""Exception types shared across the package."""


class PhasesortError(Exception):
    """Base class for all package errors."""


class DimensionError(PhasesortError, ValueError):
    """Operand shapes are incompatible."""


class NumericalFailure(PhasesortError, RuntimeError):
    """A numerical kernel (SVD) failed to converge."""


class NotAFrame(PhasesortError, ValueError):
    """Key matrix does not have full row rank, so its columns do not span."""


class NotPhaseRetrievable(PhasesortError, ValueError):
    """Operation requires an injectivity certificate the key does not pass."""


class SearchTooLarge(PhasesortError, ValueError):
    """Exhaustive search would exceed the desk-scale cap; refusing."""


class InternalInconsistency(PhasesortError, RuntimeError):
    """Two certificates that must agree disagreed; implementation bug."""


class UnsupportedN(PhasesortError, ValueError):
    """Operation is defined only for two-row configurations."""


class NotInRange(PhasesortError, ValueError):
    """Input vector/matrix is not in the range of the encoder being inverted."""


class AmbiguityDetected(PhasesortError, RuntimeError):
    """Sign search found consistent candidates on distinct orbits; the key
    cannot actually be injective despite its certificate."""


class AchievementFailure(PhasesortError, RuntimeError):
    """An extremal witness failed to achieve its Lipschitz constant."""


class LipschitzViolation(PhasesortError, RuntimeError):
    """A sampled ratio fell outside the certified [A0, B0] sandwich."""
