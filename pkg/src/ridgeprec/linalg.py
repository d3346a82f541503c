"""Symmetric-matrix primitives used by every estimator.

All public functions validate their inputs and return exactly symmetric
arrays: results are passed through :func:`symmetrize`, which guarantees the
(i, j) and (j, i) entries are the same float, not merely close.
"""

from typing import NamedTuple

import numpy as np

from .errors import InvalidMatrixError, NotPositiveDefiniteError

# Relative asymmetry allowed before an input is rejected outright.
_ASYM_RTOL = 1e-8


class EigenDecomposition(NamedTuple):
    """Eigenvalues (descending) and matching orthonormal eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (a + a.T)/2, which is exactly symmetric in IEEE arithmetic."""
    return 0.5 * (a + a.T)


def check_symmetric(a, name: str = "matrix") -> np.ndarray:
    """Validate that ``a`` is a finite, square, symmetric 2-D array.

    Returns the exactly-symmetrized copy. Raises
    :class:`~ridgeprec.errors.InvalidMatrixError` otherwise.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidMatrixError(f"{name} must be square, got shape {a.shape}")
    if a.size == 0:
        raise InvalidMatrixError(f"{name} must be nonempty")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrixError(f"{name} contains non-finite entries")
    scale = np.abs(a).max()
    if np.abs(a - a.T).max() > _ASYM_RTOL * (1.0 + scale):
        raise InvalidMatrixError(f"{name} is not symmetric")
    return symmetrize(a)


def eig_sym(a) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix with a fixed canonical form.

    Eigenvalues are returned in descending order. Each eigenvector is scaled
    so its first component of nonnegligible magnitude is positive, which makes
    the decomposition deterministic for reproducible downstream output.

    Parameters
    ----------
    a : array_like
        Finite symmetric matrix.

    Returns
    -------
    EigenDecomposition
        ``values`` (p,) descending, ``vectors`` (p, p) with columns matching
        ``values``; ``a == vectors @ diag(values) @ vectors.T`` up to roundoff.

    Raises
    ------
    InvalidMatrixError
        If the input is not finite/square/symmetric.
    """
    a = check_symmetric(a)
    vals, vecs = np.linalg.eigh(a)
    # eigh sorts ascending; flip for descending without re-sorting.
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    # Sign convention: first component with |v_i| above a relative threshold
    # is made positive. Unit-norm columns always have such a component.
    p = vecs.shape[0]
    for j in range(p):
        col = vecs[:, j]
        idx = np.argmax(np.abs(col) > 1e-12)
        if col[idx] < 0:
            vecs[:, j] = -col
    return EigenDecomposition(vals, vecs)


def pd_tolerance(values) -> float:
    """Default positive-definiteness cutoff: 1e-12 * max(1, max |eigenvalue|)."""
    values = np.asarray(values, dtype=float)
    return 1e-12 * max(1.0, float(np.abs(values).max()))


def is_pd(a, tol: float = 0.0) -> bool:
    """True iff the smallest eigenvalue of symmetric ``a`` exceeds ``tol``."""
    a = check_symmetric(a)
    smallest = float(np.linalg.eigvalsh(a)[0])
    return smallest > tol


def mat_sqrt_pd(a) -> np.ndarray:
    """Symmetric positive-definite square root of a p.d. matrix.

    Raises
    ------
    NotPositiveDefiniteError
        If any eigenvalue is at or below the relative p.d. tolerance.
    """
    vals, vecs = eig_sym(a)
    if vals[-1] <= pd_tolerance(vals):
        raise NotPositiveDefiniteError(
            f"matrix square root requires a p.d. input (min eigenvalue {vals[-1]:.3e})"
        )
    return symmetrize((vecs * np.sqrt(vals)) @ vecs.T)


def inv_pd(a) -> np.ndarray:
    """Inverse of a symmetric positive-definite matrix.

    Computed via the eigendecomposition so the result is symmetric by
    construction and the p.d. requirement is enforced (not silently assumed).
    """
    vals, vecs = eig_sym(a)
    if vals[-1] <= pd_tolerance(vals):
        raise NotPositiveDefiniteError(
            f"inverse requires a p.d. input (min eigenvalue {vals[-1]:.3e})"
        )
    return symmetrize((vecs / vals) @ vecs.T)
