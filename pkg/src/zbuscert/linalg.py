"""Dense complex linear algebra: pivoted LU solves and infinity norms."""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import SingularMatrixError

# Relative pivot tolerance; below this the factorization is treated as singular.
PIVOT_RTOL = 1e-13


def lu_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a @ x = b by LU factorization with partial pivoting.

    Raises SingularMatrixError when any pivot falls below PIVOT_RTOL times
    the largest initial magnitude in its column.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(
            f"right-hand side has {b.shape[0]} rows, matrix has {a.shape[0]}"
        )
    if a.shape[0] == 0:
        return np.zeros_like(b)
    column_scale = np.abs(a).max(axis=0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
        pivots = np.abs(np.diagonal(lu))
        if np.any(pivots < PIVOT_RTOL * column_scale) or np.any(pivots == 0.0):
            raise SingularMatrixError("matrix is singular to working precision")
        return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def invert(a: np.ndarray) -> np.ndarray:
    """Explicit inverse: one factorization, n solves."""
    a = np.asarray(a, dtype=complex)
    return lu_solve(a, np.eye(a.shape[0], dtype=complex))


def inf_norm_matrix(a: np.ndarray) -> float:
    """Maximum over rows of the sum of entry magnitudes; 0 for empty input."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.abs(a).sum(axis=1).max())


def inf_norm_vector(u: np.ndarray) -> float:
    """Maximum entry magnitude; 0 for the empty vector."""
    u = np.asarray(u)
    if u.size == 0:
        return 0.0
    return float(np.abs(u).max())
