"""Keys (frames given by the columns of a d x D matrix), their analysis and
synthesis operators, and the injectivity certificates.

Three certificates are exposed: full spark (every d-subset of columns is
independent), the complement property (every column split leaves one spanning
side), and the derived phase-retrievable / universal-key verdicts. When
D = 2d - 1 the first two are equivalent and the code cross-checks them
against each other, refusing to return silently inconsistent answers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from . import numerics
from .errors import (
    DimensionError,
    InternalInconsistency,
    NotAFrame,
    SearchTooLarge,
)
from .numerics import DEFAULT_TOL, ToleranceConfig, as_matrix, as_vector

# Exhaustive-search refusal caps. Beyond these the operations raise
# SearchTooLarge instead of degrading to sampling.
COMPLEMENT_MAX_COLS = 24
FULL_SPARK_MAX_SUBSETS = 5_000_000

# Above this many stacked d x d Grams the partition scan streams instead of
# batching (memory, not correctness).
_BATCH_ENTRY_CAP = 1 << 26


@dataclass(eq=False, frozen=True)
class Key:
    """A d x D key matrix whose columns are the frame vectors.

    The matrix is copied and frozen on construction; certificate results are
    memoized per instance, which is safe because the instance is immutable.
    """

    matrix: np.ndarray
    tol: ToleranceConfig = DEFAULT_TOL

    def __post_init__(self):
        m = as_matrix(self.matrix).copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "_cache", {})

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def D(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class Partition:
    """A subset I of the column indices {1..D}, stored as a bitmask.

    Bit k-1 of ``mask`` is set iff column k belongs to I.
    """

    mask: int
    size: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.size):
            raise ValueError("mask out of range for partition size")

    def indices(self) -> tuple[int, ...]:
        """Members of I as sorted 1-based column indices."""
        return tuple(k + 1 for k in range(self.size) if self.mask >> k & 1)

    def complement(self) -> "Partition":
        return Partition(((1 << self.size) - 1) ^ self.mask, self.size)

    def canonical(self) -> "Partition":
        """Of {I, I^c} return the one with the smaller mask."""
        comp = self.complement()
        return self if self.mask <= comp.mask else comp

    def column_indices0(self) -> list[int]:
        """Members of I as 0-based column positions."""
        return [k for k in range(self.size) if self.mask >> k & 1]


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of a certificate check.

    ``witness`` is the violating object (a Partition or a tuple of 1-based
    column indices) and is present exactly when the verdict is false.
    """

    verdict: bool
    witness: object
    method: str

    def __post_init__(self):
        if self.verdict and self.witness is not None:
            raise ValueError("a true verdict must not carry a witness")
        if not self.verdict and self.witness is None:
            raise ValueError("a false verdict must carry a witness")


def generate_key(d: int, D: int, seed: int, tol: ToleranceConfig = DEFAULT_TOL) -> Key:
    """Random key with i.i.d. standard normal entries.

    PRNG: numpy PCG64 seeded with ``seed``; the d x D block is drawn in a
    single row-major standard_normal call, so identical (d, D, seed) always
    reproduce the identical key bit for bit.
    """
    if d < 1 or D < 1:
        raise ValueError("d and D must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return Key(rng.standard_normal((d, D)), tol)


def analysis(key: Key, x) -> np.ndarray:
    """Apply the analysis operator: the vector of inner products A^T x."""
    v = as_vector(x)
    if v.shape[0] != key.d:
        raise DimensionError(f"signal has length {v.shape[0]}, key expects {key.d}")
    return key.matrix.T @ v


def synthesis_left_inverse(key: Key, y) -> np.ndarray:
    """Left inverse of the analysis operator (pseudoinverse application).

    Returns the minimum-norm least-squares solution of A^T x = y, which
    recovers x exactly from analysis(key, x) whenever the key has rank d.
    """
    v = as_vector(y)
    if v.shape[0] != key.D:
        raise DimensionError(f"coefficients have length {v.shape[0]}, key expects {key.D}")
    if numerics.rank(key.matrix, key.tol) < key.d:
        raise NotAFrame("key matrix is rank deficient; columns do not span")
    return numerics.least_squares(key.matrix.T, v)


def _cached(key: Key, name: str, compute):
    cache = getattr(key, "_cache")
    if name not in cache:
        cache[name] = compute()
    return cache[name]


def is_full_spark(key: Key) -> CertificateReport:
    """Check that every d-subset of columns has rank d (exhaustive).

    The witness is the first rank-deficient subset in lexicographic column
    order, reported as 1-based indices.
    """
    return _cached(key, "full_spark", lambda: _full_spark(key))


def _full_spark(key: Key) -> CertificateReport:
    d, D = key.d, key.D
    method = "exhaustive-d-subsets"
    if D < d:
        # fewer than d columns can never span
        return CertificateReport(False, tuple(range(1, D + 1)), method)
    if comb(D, d) > FULL_SPARK_MAX_SUBSETS:
        raise SearchTooLarge(
            f"C({D},{d}) = {comb(D, d)} exceeds the cap of {FULL_SPARK_MAX_SUBSETS}"
        )
    a = key.matrix
    for cols in itertools.combinations(range(D), d):
        if numerics.rank(a[:, cols], key.tol) < d:
            return CertificateReport(False, tuple(c + 1 for c in cols), method)
    return CertificateReport(True, None, method)


def _popcounts(n_masks: int) -> np.ndarray:
    masks = np.arange(n_masks, dtype=np.int64)
    counts = np.zeros(n_masks, dtype=np.int64)
    while masks.any():
        counts += masks & 1
        masks >>= 1
    return counts


def _partition_grams(a: np.ndarray) -> np.ndarray:
    """Gram matrices A[I] A[I]^T for every subset I avoiding the last column.

    Subsets are encoded as masks in [0, 2^(D-1)); entry ``mask`` is filled by
    adding one column outer product to the Gram of ``mask`` without its
    lowest set bit.
    """
    d, D = a.shape
    n_masks = 1 << (D - 1)
    outers = np.einsum("ik,jk->kij", a, a)
    grams = np.zeros((n_masks, d, d))
    for b in range(D - 2, -1, -1):
        prefix = np.arange(1 << (D - 2 - b), dtype=np.int64)
        idx = (prefix << (b + 1)) | (1 << b)
        grams[idx] = grams[idx - (1 << b)] + outers[b]
    return grams


# A Gram eigenvalue ratio above this is trusted as full rank outright;
# squaring into the Gram costs half the precision, so ratios below it are
# re-decided on the submatrix itself with the exact rank criterion.
_GRAM_TRUST_RATIO = 1e-12


def _rank_d_sides(key: Key) -> tuple[np.ndarray, np.ndarray]:
    """For every canonical partition mask, whether each side has rank d.

    Masks run over subsets I of {1..D-1} (column D always on the complement
    side), so each unordered partition {I, I^c} appears exactly once and the
    enumerated mask is the canonical (smaller) one. A clearly positive
    smallest Gram eigenvalue settles a side immediately; borderline sides
    (exactly singular ones land here) fall back to numerics.rank, which is
    the defining criterion.
    """
    a = key.matrix
    d, D = key.d, key.D
    n_masks = 1 << (D - 1)
    counts = _popcounts(n_masks)

    if n_masks * d * d <= _BATCH_ENTRY_CAP:
        grams = _partition_grams(a)
        eig_i = np.linalg.eigvalsh(grams)
        eig_c = np.linalg.eigvalsh((a @ a.T)[None, :, :] - grams)
        lam_min_i, lam_max_i = eig_i[:, 0], eig_i[:, -1]
        lam_min_c, lam_max_c = eig_c[:, 0], eig_c[:, -1]
    else:
        lam_min_i = np.empty(n_masks)
        lam_max_i = np.empty(n_masks)
        lam_min_c = np.empty(n_masks)
        lam_max_c = np.empty(n_masks)
        for mask in range(n_masks):
            cols = [k for k in range(D) if mask >> k & 1]
            gram = a[:, cols] @ a[:, cols].T if cols else np.zeros((d, d))
            ev = np.linalg.eigvalsh(gram)
            evc = np.linalg.eigvalsh(a @ a.T - gram)
            lam_min_i[mask], lam_max_i[mask] = ev[0], ev[-1]
            lam_min_c[mask], lam_max_c[mask] = evc[0], evc[-1]

    def trusted_ok(lam_min, lam_max, m):
        return (m >= d) & (lam_min > _GRAM_TRUST_RATIO * lam_max) & (lam_min > 0.0)

    ok_i = trusted_ok(lam_min_i, lam_max_i, counts)
    ok_c = trusted_ok(lam_min_c, lam_max_c, D - counts)
    ambiguous_i = (counts >= d) & ~ok_i
    ambiguous_c = (D - counts >= d) & ~ok_c

    # only partitions still undecided on both sides matter for the verdict
    for mask in np.nonzero(~(ok_i | ok_c) & (ambiguous_i | ambiguous_c))[0]:
        mask = int(mask)
        if ambiguous_i[mask]:
            cols = [k for k in range(D) if mask >> k & 1]
            ok_i[mask] = numerics.rank(a[:, cols], key.tol) == d
        if not ok_i[mask] and ambiguous_c[mask]:
            cols = [k for k in range(D) if not mask >> k & 1]
            ok_c[mask] = numerics.rank(a[:, cols], key.tol) == d
    return ok_i, ok_c


def has_complement_property(key: Key) -> CertificateReport:
    """Check that every column split leaves at least one rank-d side.

    All 2^(D-1) unordered partitions are examined; the witness is the
    violating partition with the smallest canonical mask.
    """
    return _cached(key, "complement", lambda: _complement_property(key))


def _complement_property(key: Key) -> CertificateReport:
    method = "exhaustive-partitions"
    if key.D > COMPLEMENT_MAX_COLS:
        raise SearchTooLarge(
            f"complement-property search is capped at D <= {COMPLEMENT_MAX_COLS}, got {key.D}"
        )
    ok_i, ok_c = _rank_d_sides(key)
    bad = ~(ok_i | ok_c)
    if not bad.any():
        return CertificateReport(True, None, method)
    witness = Partition(int(np.argmax(bad)), key.D)
    return CertificateReport(False, witness, method)


def is_phase_retrievable(key: Key) -> CertificateReport:
    """Certify injectivity of the magnitude encoder on the sign quotient.

    The verdict is the complement property. At the minimal size D = 2d - 1
    the verdict is additionally cross-checked against full spark, to which it
    must be equivalent; a mismatch is an internal error, never a report.
    """
    return _cached(key, "phase_retrievable", lambda: _phase_retrievable(key))


def _phase_retrievable(key: Key) -> CertificateReport:
    cp = has_complement_property(key)
    if key.D == 2 * key.d - 1:
        fs = is_full_spark(key)
        if fs.verdict != cp.verdict:
            raise InternalInconsistency(
                "complement property and full spark disagree at D = 2d-1: "
                f"complement={cp.verdict}, full_spark={fs.verdict}"
            )
    return CertificateReport(cp.verdict, cp.witness, "complement-property")


def is_universal_key(key: Key) -> CertificateReport:
    """Certify injectivity of the two-row sorting encoder.

    For two-row configurations this is the same condition as phase
    retrievability, so the verdict (and witness) are shared.
    """
    pr = is_phase_retrievable(key)
    return CertificateReport(pr.verdict, pr.witness, "theorem1-equivalence")
