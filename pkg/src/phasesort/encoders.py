"""The three encoders and the quotient metrics they are measured in.

``alpha`` maps a signal to the absolute values of its frame coefficients and
is invariant under sign flips. ``beta`` maps an n x d configuration to the
column-sorted coefficient matrix and is invariant under row permutations.
``beta_tilde`` is the compressed two-row variant that stores the row mean
plus the encoded row difference. ``hadamard_split`` is the 2x2 transform
that connects the sorted two-row embedding back to the magnitude encoder and
the raw analysis operator.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SearchTooLarge, UnsupportedN
from .frame_keys import Key, analysis
from .numerics import as_matrix, as_vector

# n! permutations are enumerated explicitly; refuse beyond this row count.
MAX_ROWS_FOR_METRIC = 8


def alpha(key: Key, x) -> np.ndarray:
    """Entrywise absolute value of the frame coefficients |A^T x|."""
    return np.abs(analysis(key, x))


def sort_desc_columns(m) -> tuple[np.ndarray, list[np.ndarray]]:
    """Sort each column in nonincreasing order, tracking the permutations.

    Sorting is stable, so rows holding equal values keep their original
    relative order. The k-th returned permutation ``p`` maps input positions
    to output positions: output row p[i] of column k is input row i.
    """
    a = as_matrix(m)
    n = a.shape[0]
    sorted_cols = np.empty_like(a)
    perms = []
    for k in range(a.shape[1]):
        order = np.argsort(-a[:, k], kind="stable")
        sorted_cols[:, k] = a[order, k]
        p = np.empty(n, dtype=np.int64)
        p[order] = np.arange(n)
        perms.append(p)
    return sorted_cols, perms


@dataclass(frozen=True)
class BetaEmbedding:
    """Column-sorted coefficient matrix plus the sorting permutations.

    Every column of ``matrix`` is nonincreasing top to bottom. ``perms[k]``
    maps input row positions to output row positions for column k.
    """

    matrix: np.ndarray
    perms: list[np.ndarray]


def beta(key: Key, config) -> BetaEmbedding:
    """Sorting encoder: sort every column of X A in decreasing order.

    Defined for any number of rows n >= 1; permuting the rows of X leaves
    the output matrix unchanged.
    """
    x = as_matrix(config)
    if x.shape[1] != key.d:
        raise DimensionError(f"configuration has {x.shape[1]} columns, key expects {key.d}")
    sorted_cols, perms = sort_desc_columns(x @ key.matrix)
    return BetaEmbedding(sorted_cols, perms)


def beta_tilde(key: Key, config) -> np.ndarray:
    """Compressed two-row encoder: row mean prepended to |A^T (x1 - x2)|.

    Output length is d + D, with a nonnegative tail.
    """
    x = as_matrix(config)
    if x.shape[0] != 2:
        raise UnsupportedN(f"modified encoder needs exactly 2 rows, got {x.shape[0]}")
    if x.shape[1] != key.d:
        raise DimensionError(f"configuration has {x.shape[1]} columns, key expects {key.d}")
    return np.concatenate([0.5 * (x[0] + x[1]), alpha(key, x[0] - x[1])])


def hadamard_split(embedding) -> tuple[np.ndarray, np.ndarray]:
    """Difference and sum of the two rows of a sorted embedding.

    For B = beta(key, X) with rows x1, x2 in X, the difference row equals
    alpha(key, x1 - x2) and the sum row equals analysis(key, x1 + x2):
    sorting each column put max(u, v) on top of min(u, v), and
    max - min = |u - v| while max + min = u + v, exactly, in floats too.
    """
    b = embedding.matrix if isinstance(embedding, BetaEmbedding) else as_matrix(embedding)
    if b.shape[0] != 2:
        raise UnsupportedN(f"hadamard split needs exactly 2 rows, got {b.shape[0]}")
    return b[0] - b[1], b[0] + b[1]


def dist_hat_H(x, y) -> float:
    """Quotient metric modulo sign: min(|x - y|, |x + y|) in Euclidean norm."""
    a, b = as_vector(x), as_vector(y)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def dist_hat_V(x, y) -> tuple[float, tuple[int, ...]]:
    """Quotient metric modulo row permutation, with the minimizing permutation.

    Brute force over all n! row orders of the second argument, enumerated
    lexicographically starting from the identity; ties keep the first
    minimizer found. The returned permutation ``p`` means the aligned second
    argument is Y[p, :].
    """
    a, b = as_matrix(x), as_matrix(y)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    n = a.shape[0]
    if n > MAX_ROWS_FOR_METRIC:
        raise SearchTooLarge(
            f"row-permutation metric is capped at n <= {MAX_ROWS_FOR_METRIC}, got {n}"
        )
    best = math.inf
    best_perm = tuple(range(n))
    for perm in itertools.permutations(range(n)):
        dist = float(np.linalg.norm(a - b[perm, :]))
        if dist < best:
            best = dist
            best_perm = perm
    return best, best_perm
