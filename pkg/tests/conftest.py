import math

import numpy as np
import pytest

from phasesort import Key

# Reference key used throughout: columns (1,0), (0,1), (1,1).
A_REF = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])


@pytest.fixture
def a_ref_key():
    return Key(A_REF)


@pytest.fixture
def identity_key():
    return Key(np.eye(2))


def sym2x2_eigenvalues(m) -> tuple[float, float]:
    """Eigenvalues of a symmetric 2x2 matrix by the characteristic polynomial.

    Independent oracle for singular values of 2 x n matrices via their Gram.
    Returned in nonincreasing order.
    """
    a, b, c = float(m[0][0]), float(m[0][1]), float(m[1][1])
    tr = a + c
    det = a * c - b * b
    disc = math.sqrt(max(tr * tr - 4.0 * det, 0.0))
    return (tr + disc) / 2.0, (tr - disc) / 2.0


def brute_force_magnitude_recovery(a: np.ndarray, y: np.ndarray, tol: float = 1e-9):
    """All-pattern reference solver: try every sign assignment on all D
    measurements with a full least-squares fit, return the first consistent
    signal or None."""
    d, D = a.shape
    y = np.asarray(y, dtype=float)
    bound = tol * max(1.0, float(np.linalg.norm(y)))
    for bits in range(1 << D):
        eps = np.array([-1.0 if bits >> k & 1 else 1.0 for k in range(D)])
        x, *_ = np.linalg.lstsq(a.T, eps * y, rcond=None)
        if np.linalg.norm(np.abs(a.T @ x) - y) <= bound:
            return x
    return None
