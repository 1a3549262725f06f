"""Exact decoders: a left inverse for the magnitude encoder at desk scale,
and the closed-form decoders for the sorted and compressed two-row encoders.

The magnitude decoder ``omega`` works by sign enumeration on a well
conditioned pivot subset of d columns: solving the d x d system for each of
the 2^(d-1) sign patterns and keeping the candidate whose full measurement
residual vanishes. Injectivity of the encoder (checked up front) guarantees
the accepted orbit is unique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoders import beta, beta_tilde, dist_hat_H
from .errors import (
    AmbiguityDetected,
    DimensionError,
    NotAFrame,
    NotInRange,
    NotPhaseRetrievable,
)
from .frame_keys import Key, is_phase_retrievable, synthesis_left_inverse
from .numerics import as_matrix, as_vector


@dataclass(frozen=True)
class RecoveryResult:
    """Recovered signal with diagnostics.

    ``x`` is the canonical orbit representative: its first coordinate above
    the rank tolerance (relative to the largest magnitude) is positive.
    ``sign_pattern`` holds the accepted signs on ``pivot_columns`` (0-based,
    in pivot selection order); both are empty for the trivial zero recovery.
    """

    x: np.ndarray
    residual: float
    sign_pattern: np.ndarray
    pivot_columns: tuple[int, ...]


def _greedy_pivot_columns(a: np.ndarray, d: int, tol_scale: float) -> list[int]:
    """Pick d well conditioned columns by greedy orthogonal elimination.

    At each step the column with the largest residual norm (first index on
    ties) is chosen and projected out of the rest. Deterministic given the
    matrix bits.
    """
    work = a.copy()
    chosen: list[int] = []
    for _ in range(d):
        norms = np.linalg.norm(work, axis=0)
        if chosen:
            norms[chosen] = -1.0
        j = int(np.argmax(norms))
        if norms[j] <= tol_scale:
            raise NotAFrame("could not find d independent pivot columns")
        chosen.append(j)
        q = work[:, j] / norms[j]
        work -= np.outer(q, q @ work)
    return chosen


def _gray_sign_patterns(d: int) -> np.ndarray:
    """All sign patterns with the first pivot fixed positive, in Gray order."""
    n_pat = 1 << (d - 1)
    codes = np.arange(n_pat, dtype=np.int64)
    gray = codes ^ (codes >> 1)
    eps = np.ones((n_pat, d))
    for t in range(d - 1):
        eps[:, t + 1] = np.where((gray >> t) & 1, -1.0, 1.0)
    return eps


def _canonicalize_sign(x: np.ndarray, rank_tol_factor: float) -> float:
    """Return +1/-1 so that flip * x has its leading significant entry > 0."""
    scale = float(np.max(np.abs(x))) if x.size else 0.0
    if scale == 0.0:
        return 1.0
    lead = int(np.argmax(np.abs(x) > rank_tol_factor * scale))
    return -1.0 if x[lead] < 0.0 else 1.0

# Consistent candidates further apart than this (relative) cannot share an
# orbit and prove the certificate wrong.
_ORBIT_GAP = 1e-6


def omega(key: Key, y) -> RecoveryResult:
    """Recover x (up to sign) from its magnitude measurements y = |A^T x|.

    The key must pass the phase-retrievability certificate. All 2^(d-1)
    sign patterns on the pivot subset are evaluated; the candidate with the
    smallest enumeration index whose residual against the full measurement
    vector is within consistency_tol is accepted. Finding consistent
    candidates on two distinct orbits raises AmbiguityDetected, since it
    contradicts the certificate.
    """
    yv = as_vector(y)
    if yv.shape[0] != key.D:
        raise DimensionError(f"measurements have length {yv.shape[0]}, key expects {key.D}")
    cert = is_phase_retrievable(key)
    if not cert.verdict:
        raise NotPhaseRetrievable("key fails the phase-retrievability certificate")

    tol = key.tol
    y_norm = float(np.linalg.norm(yv))
    accept_tol = tol.consistency_tol * max(1.0, y_norm)
    if float(np.min(yv)) < -accept_tol:
        raise NotInRange("measurements have significantly negative entries")
    if y_norm <= tol.consistency_tol:
        return RecoveryResult(
            x=np.zeros(key.d),
            residual=y_norm,
            sign_pattern=np.ones(0),
            pivot_columns=(),
        )

    a = key.matrix
    d = key.d
    pivot_scale = tol.rank_tol_factor * max(a.shape) * float(np.linalg.norm(a))
    pivots = _greedy_pivot_columns(a, d, pivot_scale)
    a_piv = a[:, pivots]
    eps = _gray_sign_patterns(d)

    rhs = (eps * yv[pivots]).T                       # (d, patterns)
    candidates = np.linalg.solve(a_piv.T, rhs)       # (d, patterns)
    residuals = np.linalg.norm(np.abs(a.T @ candidates) - yv[:, None], axis=0)
    consistent = residuals <= accept_tol
    if not consistent.any():
        raise NotInRange(
            f"no sign pattern is consistent (best residual {residuals.min():.3e}, "
            f"tolerance {accept_tol:.3e})"
        )

    first = int(np.argmax(consistent))
    x = candidates[:, first]
    x_scale = max(1.0, float(np.linalg.norm(x)))
    for j in np.nonzero(consistent)[0]:
        if j == first:
            continue
        if dist_hat_H(candidates[:, j], x) > _ORBIT_GAP * x_scale:
            raise AmbiguityDetected(
                "two consistent candidates on distinct orbits; key cannot be injective"
            )

    flip = _canonicalize_sign(x, tol.rank_tol_factor)
    return RecoveryResult(
        x=flip * x,
        residual=float(residuals[first]),
        sign_pattern=flip * eps[first],
        pivot_columns=tuple(pivots),
    )


def invert_beta(key: Key, embedding) -> np.ndarray:
    """Decode a sorted two-row embedding back to a 2 x d configuration.

    The row difference of the embedding is the encoded magnitude vector of
    x1 - x2 and the row sum is the analysis of x1 + x2, so the configuration
    is rebuilt from one magnitude recovery and one pseudoinverse apply. The
    result is re-encoded and checked against the input; a mismatch means the
    input was not in the encoder's range.
    """
    yq = as_matrix(embedding)
    if yq.shape != (2, key.D):
        raise DimensionError(f"expected a 2 x {key.D} embedding, got {yq.shape}")
    if not np.all(yq[0] >= yq[1]):
        raise NotInRange("embedding columns are not sorted nonincreasing")

    diff = yq[0] - yq[1]
    total = yq[0] + yq[1]
    mean_part = synthesis_left_inverse(key, total)
    diff_part = omega(key, diff).x
    decoded = np.vstack([0.5 * (mean_part + diff_part), 0.5 * (mean_part - diff_part)])

    reencoded = beta(key, decoded).matrix
    err = float(np.linalg.norm(reencoded - yq))
    bound = key.tol.consistency_tol * max(1.0, float(np.linalg.norm(yq)))
    if err > bound:
        raise NotInRange(f"re-encoding residual {err:.3e} exceeds tolerance {bound:.3e}")
    return decoded


def invert_beta_tilde(key: Key, y) -> np.ndarray:
    """Decode the compressed (d + D)-vector back to a 2 x d configuration."""
    yv = as_vector(y)
    if yv.shape[0] != key.d + key.D:
        raise DimensionError(
            f"expected a vector of length {key.d + key.D}, got {yv.shape[0]}"
        )
    mean_part = yv[: key.d]
    magnitudes = yv[key.d:]
    diff_part = omega(key, magnitudes).x
    decoded = np.vstack([mean_part + 0.5 * diff_part, mean_part - 0.5 * diff_part])

    reencoded = beta_tilde(key, decoded)
    err = float(np.linalg.norm(reencoded - yv))
    bound = key.tol.consistency_tol * max(1.0, float(np.linalg.norm(yv)))
    if err > bound:
        raise NotInRange(f"re-encoding residual {err:.3e} exceeds tolerance {bound:.3e}")
    return decoded
