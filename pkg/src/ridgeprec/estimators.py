"""Ridge-penalized precision matrix estimators.

Four estimators share one vocabulary. With ``S`` the sample covariance and
``T`` a precision-side target:

* ``archetype-1``: convex-combination ridge, ``omega = [(1-v)S + v*G]^-1``
  with ``v`` in (0, 1] and ``G = T^-1`` the covariance-side target.
* ``archetype-2``: plain diagonal ridge, ``omega = (S + v*I)^-1``.
* ``alt-1``: the penalized-likelihood maximizer for penalty ``lam > 0``,
  ``omega = {[lam*I + (1/4)(S - lam*T)^2]^(1/2) + (1/2)(S - lam*T)}^-1``.
* ``alt-2``: ``alt-1`` at ``T = 0``.

The alternative estimators maximize
``ln|omega| - tr(S omega) - (lam/2)*||omega - T||_F^2`` and are positive
definite for every symmetric ``S``, every penalty ``lam > 0``, and every
symmetric ``T`` — including singular ``S`` from fewer observations than
variables. The covariance-side estimate obeys the exact identity
``sigma - lam*omega = S - lam*T``, so ``omega`` never requires an explicit
inversion; both matrices are built from one eigendecomposition of
``S - lam*T`` with cancellation-free per-eigenvalue formulas.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyDataError,
    InvalidMatrixError,
    InvalidPenaltyError,
    InvalidTargetError,
    NotPositiveDefiniteError,
)
from .linalg import check_symmetric, eig_sym, inv_pd, pd_tolerance, symmetrize

#: Canonical estimator kind names (also the CLI spelling).
KINDS = ("archetype-1", "archetype-2", "alt-1", "alt-2")

#: Sentinel for the data-driven diagonal target, resolved per fit from S.
DDIAG = "ddiag"


# ---------------------------------------------------------------------------
# Targets


@dataclass(frozen=True)
class Target:
    """Precision-side shrinkage target.

    One of four variants: ``zero``, ``scalar`` (psi * I, psi >= 0; psi = 0
    coincides with zero), ``diagonal`` (positive entries), or ``full``
    (symmetric positive definite). Use the factory classmethods; the raw
    constructor performs no validation.
    """

    kind: str
    psi: float = 0.0
    values: np.ndarray | None = field(default=None, compare=False)

    @classmethod
    def zero(cls) -> "Target":
        return cls("zero")

    @classmethod
    def scalar(cls, psi: float) -> "Target":
        psi = float(psi)
        if not np.isfinite(psi) or psi < 0:
            raise InvalidTargetError(f"scalar target needs finite psi >= 0, got {psi}")
        return cls("scalar", psi=psi)

    @classmethod
    def identity(cls) -> "Target":
        return cls.scalar(1.0)

    @classmethod
    def diagonal(cls, values) -> "Target":
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0 or not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise InvalidTargetError("diagonal target needs finite positive entries")
        return cls("diagonal", values=v)

    @classmethod
    def full(cls, matrix) -> "Target":
        m = check_symmetric(matrix, "full target")
        vals = np.linalg.eigvalsh(m)
        if vals[0] <= pd_tolerance(vals):
            raise InvalidTargetError(
                f"full target must be p.d. (min eigenvalue {vals[0]:.3e})"
            )
        return cls("full", values=m)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "scalar" and self.psi == 0.0)

    def matrix(self, p: int) -> np.ndarray:
        """The target as a dense (p, p) array."""
        if self.kind == "zero":
            return np.zeros((p, p))
        if self.kind == "scalar":
            return self.psi * np.eye(p)
        if self.kind == "diagonal":
            if self.values.size != p:
                raise InvalidTargetError(
                    f"diagonal target has {self.values.size} entries, expected {p}"
                )
            return np.diag(self.values)
        if self.values.shape[0] != p:
            raise InvalidTargetError(
                f"full target is {self.values.shape[0]}x{self.values.shape[0]}, expected {p}"
            )
        return self.values.copy()

    def gamma(self, p: int) -> np.ndarray:
        """Covariance-side target ``G = T^-1`` used by archetype-1."""
        if self.is_zero:
            raise InvalidTargetError("archetype-1 requires a p.d. target, got zero")
        if self.kind == "scalar":
            return (1.0 / self.psi) * np.eye(p)
        if self.kind == "diagonal":
            if self.values.size != p:
                raise InvalidTargetError(
                    f"diagonal target has {self.values.size} entries, expected {p}"
                )
            return np.diag(1.0 / self.values)
        return inv_pd(self.matrix(p))

    def label(self) -> str:
        """Short human-readable tag used in CLI/CSV output."""
        if self.kind == "scalar":
            if self.psi == 0.0:
                return "zero"
            if self.psi == 1.0:
                return "identity"
            from .matio import fmt

            return f"scalar:{fmt(self.psi)}"
        return self.kind


def default_diagonal_target(S) -> Target:
    """Data-driven diagonal target with entries 1/diag(S).

    Requires every diagonal entry of S to be strictly positive.
    """
    S = check_symmetric(S, "S")
    d = np.diag(S)
    if np.any(d <= 0):
        raise InvalidTargetError("default diagonal target needs diag(S) > 0")
    return Target.diagonal(1.0 / d)


def resolve_target(target, S) -> Target:
    """Resolve a target spec (Target instance or the ``"ddiag"`` sentinel)."""
    if isinstance(target, Target):
        return target
    if target == DDIAG:
        return default_diagonal_target(S)
    raise InvalidTargetError(f"unknown target spec {target!r}")


# ---------------------------------------------------------------------------
# Estimates


@dataclass(frozen=True)
class RidgeEstimate:
    """A fitted precision/covariance pair.

    ``omega`` is the precision estimate, ``sigma`` its inverse (the
    covariance-side estimate); both are exactly symmetric and mutually
    inverse up to roundoff. ``kind`` is one of :data:`KINDS` and ``lam`` the
    penalty in that estimator's own scale.
    """

    omega: np.ndarray
    sigma: np.ndarray
    kind: str
    lam: float
    target: Target | None

    @property
    def p(self) -> int:
        return self.omega.shape[0]


def _check_penalty(lam, lower_open: float = 0.0, upper: float = np.inf) -> float:
    lam = float(lam)
    if not np.isfinite(lam) or lam <= lower_open or lam > upper:
        bound = f"({lower_open}, {upper}]" if np.isfinite(upper) else f"({lower_open}, inf)"
        raise InvalidPenaltyError(f"penalty must be in {bound}, got {lam}")
    return lam


def sample_cov(Y, center: bool = False) -> np.ndarray:
    """Sample covariance ``S = Y'Y / n`` (divisor n, no centering by default).

    With ``center=True`` column means are subtracted first; the divisor is
    still n.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2:
        raise InvalidMatrixError(f"data must be 2-D, got shape {Y.shape}")
    n = Y.shape[0]
    if n == 0:
        raise EmptyDataError("data matrix has zero rows")
    if not np.all(np.isfinite(Y)):
        raise InvalidMatrixError("data matrix contains non-finite entries")
    if center:
        Y = Y - Y.mean(axis=0)
    return symmetrize(Y.T @ Y / n)


def _alt_shrink(m: np.ndarray, lam: float):
    """Covariance/precision eigenvalues of the alternative ridge solution.

    Given the spectrum ``m`` of ``S - lam*T``, the covariance-side value is
    ``sqrt(lam + m^2/4) + m/2`` and the precision value its reciprocal. Each
    is evaluated on the cancellation-free side of the identity
    ``(R + m/2)(R - m/2) = lam``.
    """
    m = np.asarray(m, dtype=float)
    root = np.sqrt(lam + 0.25 * m * m)
    cov = np.empty_like(m)
    prec = np.empty_like(m)
    pos = m >= 0
    cov[pos] = root[pos] + 0.5 * m[pos]
    prec[pos] = 1.0 / cov[pos]
    neg = ~pos
    other = root[neg] - 0.5 * m[neg]
    cov[neg] = lam / other
    prec[neg] = other / lam
    return cov, prec


def _alt_fit(M: np.ndarray, lam: float):
    vals, vecs = eig_sym(M)
    cov, prec = _alt_shrink(vals, lam)
    sigma = symmetrize((vecs * cov) @ vecs.T)
    omega = symmetrize((vecs * prec) @ vecs.T)
    return omega, sigma


def alt_ridge1(S, target, lam: float) -> RidgeEstimate:
    """Penalized-likelihood ridge precision estimator with target ``T``.

    Maximizes ``ln|omega| - tr(S omega) - (lam/2)||omega - T||_F^2``. The
    solution is positive definite for every symmetric S (singular included),
    every ``lam > 0``, and every symmetric target. A zero target routes to
    :func:`alt_ridge2`, which is the same estimator at ``T = 0``.

    Parameters
    ----------
    S : array_like
        Symmetric sample covariance (n.n.d. in intended use).
    target : Target or "ddiag"
        Precision-side target; ``"ddiag"`` resolves to ``diag(1/diag(S))``.
    lam : float
        Penalty, any positive value.
    """
    S = check_symmetric(S, "S")
    lam = _check_penalty(lam)
    target = resolve_target(target, S)
    if target.is_zero:
        return alt_ridge2(S, lam)
    T = target.matrix(S.shape[0])
    omega, sigma = _alt_fit(S - lam * T, lam)
    return RidgeEstimate(omega, sigma, "alt-1", lam, target)


def alt_ridge2(S, lam: float) -> RidgeEstimate:
    """Target-free alternative ridge: ``alt_ridge1`` at ``T = 0``.

    ``omega = {[lam*I + (1/4)S^2]^(1/2) + (1/2)S}^-1``, positive definite for
    every symmetric S and ``lam > 0``.
    """
    S = check_symmetric(S, "S")
    lam = _check_penalty(lam)
    omega, sigma = _alt_fit(S, lam)
    return RidgeEstimate(omega, sigma, "alt-2", lam, Target.zero())


def archetype1(S, target, lam: float) -> RidgeEstimate:
    """Convex-combination ridge ``omega = [(1-v)S + v*G]^-1``, ``v`` in (0,1].

    ``G`` is the covariance-side target, the inverse of the precision-side
    ``target`` (which therefore must be p.d.; the zero target is rejected).
    """
    S = check_symmetric(S, "S")
    lam = _check_penalty(lam, upper=1.0)
    target = resolve_target(target, S)
    p = S.shape[0]
    G = target.gamma(p)
    C = symmetrize((1.0 - lam) * S + lam * G)
    vals, vecs = eig_sym(C)
    if vals[-1] <= pd_tolerance(vals):
        raise NotPositiveDefiniteError(
            f"combined matrix not p.d. (min eigenvalue {vals[-1]:.3e})"
        )
    omega = symmetrize((vecs / vals) @ vecs.T)
    sigma = symmetrize((vecs * vals) @ vecs.T)
    return RidgeEstimate(omega, sigma, "archetype-1", lam, target)


def archetype2(S, lam: float) -> RidgeEstimate:
    """Plain diagonal ridge ``omega = (S + v*I)^-1``, ``v > 0``."""
    S = check_symmetric(S, "S")
    lam = _check_penalty(lam)
    vals, vecs = eig_sym(S)
    shifted = vals + lam
    if shifted[-1] <= 0:
        raise NotPositiveDefiniteError(
            f"S + lam*I not p.d. (min eigenvalue {shifted[-1]:.3e})"
        )
    omega = symmetrize((vecs / shifted) @ vecs.T)
    sigma = symmetrize((vecs * shifted) @ vecs.T)
    return RidgeEstimate(omega, sigma, "archetype-2", lam, None)


def fit(kind: str, S, lam: float, target=None) -> RidgeEstimate:
    """Fit any estimator by kind name.

    ``target`` is required for "archetype-1" and "alt-1" (a
    :class:`Target` or ``"ddiag"``) and ignored by the other two kinds.
    """
    if kind == "alt-1":
        if target is None:
            raise InvalidTargetError("alt-1 requires a target")
        return alt_ridge1(S, target, lam)
    if kind == "alt-2":
        return alt_ridge2(S, lam)
    if kind == "archetype-1":
        if target is None:
            raise InvalidTargetError("archetype-1 requires a target")
        return archetype1(S, target, lam)
    if kind == "archetype-2":
        return archetype2(S, lam)
    raise InvalidPenaltyError(f"unknown estimator kind {kind!r}; expected one of {KINDS}")


# ---------------------------------------------------------------------------
# Spectrum-level shrinkage and penalty scale maps


def shrunk_eigenvalues(kind: str, d, lam: float, psi: float = 1.0) -> np.ndarray:
    """Covariance-side shrunken eigenvalues for scalar-target estimators.

    For a sample eigenvalue ``d`` (and scalar precision target ``psi * I``
    where a target applies):

    * alt-1:       ``sqrt(lam + (d - lam*psi)^2/4) + (d - lam*psi)/2``
    * alt-2:       ``sqrt(lam + d^2/4) + d/2``
    * archetype-1: ``(1-lam)*d + lam/psi``
    * archetype-2: ``d + lam``

    Precision-side values are the reciprocals.
    """
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if not np.all(np.isfinite(d)):
        raise InvalidMatrixError("eigenvalues must be finite")
    psi = float(psi)
    if kind == "alt-1":
        lam = _check_penalty(lam)
        if not np.isfinite(psi) or psi < 0:
            raise InvalidTargetError(f"alt-1 scalar target needs psi >= 0, got {psi}")
        cov, _ = _alt_shrink(d - lam * psi, lam)
        return cov
    if kind == "alt-2":
        lam = _check_penalty(lam)
        cov, _ = _alt_shrink(d, lam)
        return cov
    if kind == "archetype-1":
        lam = _check_penalty(lam, upper=1.0)
        if not np.isfinite(psi) or psi <= 0:
            raise InvalidTargetError(f"archetype-1 scalar target needs psi > 0, got {psi}")
        return (1.0 - lam) * d + lam / psi
    if kind == "archetype-2":
        lam = _check_penalty(lam)
        return d + lam
    raise InvalidPenaltyError(f"unknown estimator kind {kind!r}; expected one of {KINDS}")


def penalty_map_1(lam_a: float) -> float:
    """Map an alternative penalty to the archetype-1 scale: ``1 - 1/(lam_a + 1)``."""
    lam_a = _check_penalty(lam_a)
    return 1.0 - 1.0 / (lam_a + 1.0)


def penalty_map_2(lam_2: float) -> float:
    """Map an archetype-2 penalty to the alternative scale: ``lam_2^2``."""
    lam_2 = _check_penalty(lam_2)
    return lam_2 * lam_2


# ---------------------------------------------------------------------------
# Diagnostics


def loglik(omega, S) -> float:
    """Unpenalized Gaussian log-likelihood kernel ``ln|omega| - tr(S omega)``.

    ``omega`` must be p.d. (checked via Cholesky).
    """
    omega = check_symmetric(omega, "omega")
    S = check_symmetric(S, "S")
    try:
        L = np.linalg.cholesky(omega)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("loglik requires a p.d. omega") from exc
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return logdet - float(np.einsum("ij,ij->", S, omega))


def stationarity_residual(omega, S, target, lam: float) -> float:
    """Frobenius norm of the penalized-likelihood stationarity condition.

    At the alternative-ridge maximizer, ``omega^-1 - (S - lam*T) - lam*omega``
    vanishes; the residual norm measures how far ``omega`` is from satisfying
    the first-order condition.
    """
    omega = check_symmetric(omega, "omega")
    S = check_symmetric(S, "S")
    lam = _check_penalty(lam)
    target = resolve_target(target, S)
    T = target.matrix(S.shape[0])
    resid = inv_pd(omega) - (S - lam * T) - lam * omega
    return float(np.linalg.norm(resid))
