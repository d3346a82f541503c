"""Conditional-independence graph extraction from a precision estimate.

Pipeline: precision matrix -> partial correlations -> two-component mixture
fit on the off-diagonal values -> per-edge local false discovery rates ->
edge selection and support sparsification.

The null density for a partial correlation r under kappa effective degrees
of freedom is ``f0(r; kappa) = |r| * B(r^2; 1/2, (kappa-1)/2)`` with B the
Beta density, which simplifies to
``(1 - r^2)^((kappa-3)/2) / Beta(1/2, (kappa-1)/2)`` and integrates to one
on [-1, 1]. The mixture is ``f = eta0 f0 + (1 - eta0) f_alt``; the fit
recipe is pinned:

* kappa: truncated maximum likelihood of f0 on the null-dominated central
  region |r| <= c with ``c = min(q75(|values|), 0.75)``, correcting for
  the truncation so the estimate is consistent when the data really are
  null. The quantile keeps the fit on the central bulk when shrinkage
  concentrates every value near zero; the 0.75 cap keeps alternative mass
  near the domain edges out of the null fit when it is abundant;
* eta0: central matching, the ratio of the mixture density to the fitted
  null density at r = 0, clamped to [0, 1];
* mixture density: Gaussian kernel density estimate with Silverman's
  bandwidth, reflected at both -1 and +1.

Edge (j, j') is selected when ``1 - lFDR >= threshold`` with
``lFDR = min(1, eta0 f0 / f)`` (equal to the two-component posterior null
probability when the alternative density is recovered as
``max(0, (f - eta0 f0)/(1 - eta0))``).
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import optimize, special

from . import cv, estimators
from .errors import (
    DegenerateFitError,
    InsufficientDataError,
    InvalidParameterError,
    NotPositiveDefiniteError,
)
from .linalg import check_symmetric, pd_tolerance, symmetrize

#: Quantile of |values| bounding the null-dominated region used for the
#: kappa fit.
CENTRAL_FRACTION = 0.75
#: Hard cap on the central cutoff: values with |r| beyond it are never
#: attributed to the null component, however heavy their share.
CENTRAL_CAP = 0.75


# ---------------------------------------------------------------------------
# Partial correlations


def partial_correlations(omega) -> np.ndarray:
    """Standardize a p.d. precision matrix to partial correlations.

    ``P[j, j'] = -omega[j, j'] / sqrt(omega[j, j] omega[j', j'])`` with unit
    diagonal. Off-diagonal entries lie in (-1, 1) for p.d. input.
    """
    omega = check_symmetric(omega, "omega")
    vals = np.linalg.eigvalsh(omega)
    if vals[0] <= pd_tolerance(vals):
        raise NotPositiveDefiniteError(
            f"partial correlations require a p.d. precision (min eigenvalue {vals[0]:.3e})"
        )
    d = np.sqrt(np.diag(omega))
    P = -omega / np.outer(d, d)
    np.fill_diagonal(P, 1.0)
    return symmetrize(P)


def offdiagonal_values(P) -> np.ndarray:
    """The p(p-1)/2 nonredundant off-diagonal entries (upper triangle, row-major)."""
    P = np.asarray(P, dtype=float)
    iu = np.triu_indices(P.shape[0], k=1)
    return P[iu].copy()


# ---------------------------------------------------------------------------
# Null density and mixture fit


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not np.isfinite(kappa) or kappa <= 1.0:
        raise InvalidParameterError(f"kappa must be finite and > 1, got {kappa}")
    return kappa


def null_density(r, kappa: float):
    """Null density of a partial correlation with ``kappa`` degrees of freedom.

    Vectorized over ``r`` (must lie in [-1, 1]); scalar in, scalar out.
    """
    kappa = _check_kappa(kappa)
    arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(np.abs(arr) > 1.0):
        raise InvalidParameterError("null density domain is [-1, 1]")
    expo = 0.5 * (kappa - 3.0)
    lognorm = special.betaln(0.5, 0.5 * (kappa - 1.0))
    with np.errstate(divide="ignore"):
        out = np.exp(expo * np.log1p(-arr * arr) - lognorm)
    return out if np.ndim(r) else float(out[0])


def _null_loglik_terms(values: np.ndarray, kappa: float) -> float:
    expo = 0.5 * (kappa - 3.0)
    lognorm = special.betaln(0.5, 0.5 * (kappa - 1.0))
    return float(np.sum(expo * np.log1p(-values * values) - lognorm))


def _fit_kappa(values: np.ndarray, cutoff: float) -> float:
    """Truncated ML for kappa on the |values| <= cutoff subset.

    The log-likelihood of the kept values under f0 restricted to the
    central region subtracts ``m * ln P0(|r| <= cutoff; kappa)``, so the
    estimate stays consistent under truncation.
    """
    kept = values[np.abs(values) <= cutoff]
    m = kept.size

    def nll(u: float) -> float:
        kappa = 1.0 + math.exp(u)
        mass = special.betainc(0.5, 0.5 * (kappa - 1.0), cutoff * cutoff)
        if mass <= 0.0:
            return np.inf
        return -_null_loglik_terms(kept, kappa) + m * math.log(mass)

    res = optimize.minimize_scalar(
        nll,
        bounds=(math.log(1e-2), math.log(1e7)),
        method="bounded",
        options={"xatol": 1e-8},
    )
    return 1.0 + math.exp(float(res.x))


@dataclass(frozen=True)
class LfdrFit:
    """Fitted two-component mixture over partial-correlation values."""

    eta0: float
    kappa: float
    values: np.ndarray = field(compare=False)
    bandwidth: float
    cutoff: float

    def mixture_density(self, r):
        """Reflected-KDE mixture density, evaluable anywhere on [-1, 1]."""
        arr = np.atleast_1d(np.asarray(r, dtype=float))
        v = self.values
        h = self.bandwidth
        aug = np.concatenate([v, 2.0 - v, -2.0 - v])
        norm = v.size * h * math.sqrt(2.0 * math.pi)
        out = np.empty_like(arr)
        step = max(1, int(2**22 / max(aug.size, 1)))
        for start in range(0, arr.size, step):
            block = arr[start : start + step, None]
            z = (block - aug[None, :]) / h
            out[start : start + step] = np.exp(-0.5 * z * z).sum(axis=1) / norm
        return out if np.ndim(r) else float(out[0])


def fit_lfdr(values) -> LfdrFit:
    """Fit the null/alternative mixture to partial-correlation values.

    Requires at least 10 values, all strictly inside (-1, 1), not all
    identical. See the module docstring for the pinned recipe.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size < 10:
        raise InsufficientDataError(
            f"mixture fit needs at least 10 values, got {values.size}"
        )
    if not np.all(np.isfinite(values)) or np.any(np.abs(values) >= 1.0):
        raise InvalidParameterError("values must be finite and strictly inside (-1, 1)")
    if np.ptp(values) == 0.0:
        raise DegenerateFitError("all values identical; no mixture to fit")
    cutoff = min(float(np.quantile(np.abs(values), CENTRAL_FRACTION)), CENTRAL_CAP)
    kept = values[np.abs(values) <= cutoff]
    if kept.size < 5:
        raise DegenerateFitError(
            f"only {kept.size} values in the central region |r| <= {cutoff:g}"
        )
    if np.ptp(kept) == 0.0:
        raise DegenerateFitError("central-region values are all identical")
    kappa = _fit_kappa(values, cutoff)
    sd = float(np.std(values))
    iqr = float(np.quantile(values, 0.75) - np.quantile(values, 0.25))
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    bandwidth = 0.9 * scale * values.size ** (-0.2)
    fit = LfdrFit(1.0, kappa, values.copy(), bandwidth, cutoff)
    eta0 = float(np.clip(fit.mixture_density(0.0) / null_density(0.0, kappa), 0.0, 1.0))
    return LfdrFit(eta0, kappa, values.copy(), bandwidth, cutoff)


# ---------------------------------------------------------------------------
# Per-edge lFDR, selection, sparsification


def lfdr_values(values, fit: LfdrFit) -> np.ndarray:
    """Local FDR for each value: ``min(1, eta0 f0 / f)``.

    ``eta0 == 1`` short-circuits to all ones (the pure-null posterior).
    """
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if fit.eta0 >= 1.0:
        return np.ones_like(values)
    f0 = null_density(values, fit.kappa)
    f = fit.mixture_density(values)
    return np.minimum(1.0, fit.eta0 * np.asarray(f0) / f)


def edge_probabilities(P, fit: LfdrFit) -> dict:
    """Posterior presence probability ``1 - lFDR`` for every pair j < j'."""
    P = np.asarray(P, dtype=float)
    iu = np.triu_indices(P.shape[0], k=1)
    lf = lfdr_values(P[iu], fit)
    return {
        (int(i), int(j)): float(1.0 - v) for i, j, v in zip(iu[0], iu[1], lf)
    }


def select_edges(P, fit: LfdrFit, threshold: float = 0.99) -> set:
    """Edges whose posterior presence probability reaches ``threshold``."""
    threshold = float(threshold)
    if not 0.0 <= threshold <= 1.0:
        raise InvalidParameterError(f"threshold must be in [0, 1], got {threshold}")
    probs = edge_probabilities(P, fit)
    return {e for e, pr in probs.items() if pr >= threshold}


def sparsify(omega, edges):
    """Zero the off-diagonal entries outside ``edges``.

    Returns ``(sparsified, min_eigenvalue)``; the smallest eigenvalue is
    reported because support-based truncation can leave the p.d. cone.
    """
    omega = check_symmetric(omega, "omega")
    p = omega.shape[0]
    keep = np.zeros((p, p), dtype=bool)
    for i, j in edges:
        if not (0 <= i < p and 0 <= j < p) or i == j:
            raise InvalidParameterError(f"edge ({i}, {j}) out of range for p={p}")
        keep[i, j] = keep[j, i] = True
    np.fill_diagonal(keep, True)
    out = np.where(keep, omega, 0.0)
    return out, float(np.linalg.eigvalsh(out)[0])


class SupportMetrics(NamedTuple):
    sensitivity: float
    specificity: float


def _normalize_edges(edges) -> set:
    out = set()
    for i, j in edges:
        if i == j:
            raise InvalidParameterError(f"self-loop ({i}, {j}) is not an edge")
        out.add((min(i, j), max(i, j)))
    return out


def support_metrics(selected, truth, p: int) -> SupportMetrics:
    """Sensitivity and specificity of a selected edge set vs the truth."""
    selected = _normalize_edges(selected)
    truth = _normalize_edges(truth)
    if not truth:
        raise InvalidParameterError("sensitivity is undefined for an empty truth set")
    total = p * (p - 1) // 2
    negatives = total - len(truth)
    if negatives == 0:
        raise InvalidParameterError("specificity is undefined for a complete truth set")
    tp = len(selected & truth)
    fp = len(selected - truth)
    return SupportMetrics(tp / len(truth), (negatives - fp) / negatives)


def stable_edges(ranked_lists, alpha: float, p: int) -> set:
    """Union of the top ``ceil(p(p-1)/2 * alpha)`` edges from each ranked list."""
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise InvalidParameterError(f"alpha must be in (0, 1], got {alpha}")
    m = math.ceil(p * (p - 1) / 2 * alpha)
    out = set()
    for ranked in ranked_lists:
        out |= _normalize_edges(list(ranked)[:m])
    return out


# ---------------------------------------------------------------------------
# End-to-end pipeline


@dataclass(frozen=True)
class GgmResult:
    omega: np.ndarray
    partials: np.ndarray
    fit: LfdrFit
    probabilities: dict
    selected: set
    sparsified: np.ndarray
    min_eigenvalue: float
    lambda_used: float | None
    cv_result: object = None


def extract_network(
    Y=None,
    omega=None,
    estimator: str = "alt-1",
    target=estimators.DDIAG,
    lam: float | None = None,
    auto_lambda: bool = False,
    grid=None,
    threshold: float = 0.99,
    center: bool = False,
    threads: int = 1,
) -> GgmResult:
    """Run the full pipeline from data (or a precision matrix) to a graph.

    Exactly one of ``Y`` (n x p data) and ``omega`` (p.d. precision) must be
    given. With data, the penalty is either ``lam`` or chosen by approximate
    leave-one-out CV over ``grid`` (default grid when omitted) when
    ``auto_lambda`` is set.
    """
    if (Y is None) == (omega is None):
        raise InvalidParameterError("provide exactly one of data and precision input")
    cv_result = None
    lambda_used = None
    if Y is not None:
        S = estimators.sample_cov(np.asarray(Y, dtype=float), center=center)
        if auto_lambda:
            if lam is not None:
                raise InvalidParameterError("give either lam or auto_lambda, not both")
            if grid is None:
                grid = cv.default_grid(S, kind=estimator)
            config = cv.CVConfig(grid=grid, scheme="aloocv", estimator=estimator, target=target)
            cv_result = cv.select_lambda(Y, config, threads=threads)
            lam = cv_result.lambda_star
        if lam is None:
            raise InvalidParameterError("a penalty is required (lam or auto_lambda)")
        est = estimators.fit(estimator, S, lam, target)
        omega = est.omega
        lambda_used = float(lam)
    else:
        omega = check_symmetric(omega, "omega")
    P = partial_correlations(omega)
    fit = fit_lfdr(offdiagonal_values(P))
    probs = edge_probabilities(P, fit)
    selected = select_edges(P, fit, threshold)
    sparsified, min_eig = sparsify(omega, selected)
    return GgmResult(
        omega=omega,
        partials=P,
        fit=fit,
        probabilities=probs,
        selected=selected,
        sparsified=sparsified,
        min_eigenvalue=min_eig,
        lambda_used=lambda_used,
        cv_result=cv_result,
    )
