"""Synthetic populations, Monte Carlo risk curves, and shrinkage paths."""

from dataclasses import dataclass

import numpy as np

from . import estimators as _est
from .cv import map_maybe_threaded
from .errors import (
    ConstructionFailedError,
    InvalidParameterError,
    NotPositiveDefiniteError,
)
from .estimators import sample_cov
from .linalg import check_symmetric, inv_pd, pd_tolerance, symmetrize

TOPOLOGIES = ("random", "chain", "star", "clique")
LOSSES = ("frobenius", "quadratic")


@dataclass(frozen=True)
class PopulationSpec:
    """Recipe for a population precision matrix.

    ``seed``/``n0`` matter only for the random topology; ``blocks``/``offdiag``
    only for clique.
    """

    topology: str
    p: int
    seed: int = 0
    n0: int = 10000
    blocks: int = 5
    offdiag: float = 0.25

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise InvalidParameterError(
                f"topology must be one of {TOPOLOGIES}, got {self.topology!r}"
            )
        if int(self.p) != self.p or self.p < 2:
            raise InvalidParameterError(f"p must be an integer >= 2, got {self.p}")


def population_precision(spec: PopulationSpec) -> np.ndarray:
    """Build the population precision matrix for a spec; always validated p.d."""
    p = int(spec.p)
    if spec.topology == "chain":
        Omega = np.eye(p)
        idx = np.arange(p - 1)
        Omega[idx, idx + 1] = 0.25
        Omega[idx + 1, idx] = 0.25
    elif spec.topology == "star":
        Omega = np.eye(p)
        for j in range(1, p):
            Omega[0, j] = Omega[j, 0] = 1.0 / (j + 1)
    elif spec.topology == "clique":
        if p % spec.blocks != 0:
            raise InvalidParameterError(
                f"clique needs p divisible by blocks ({p} % {spec.blocks} != 0)"
            )
        b = p // spec.blocks
        block = np.full((b, b), spec.offdiag)
        np.fill_diagonal(block, 1.0)
        Omega = np.kron(np.eye(spec.blocks), block)
    else:  # random
        rng = np.random.default_rng([int(spec.seed), 1])
        Y = rng.standard_normal((int(spec.n0), p))
        Omega = Y.T @ Y / spec.n0
    Omega = symmetrize(Omega)
    vals = np.linalg.eigvalsh(Omega)
    if vals[0] <= pd_tolerance(vals):
        raise ConstructionFailedError(
            f"{spec.topology} population is not p.d. (min eigenvalue {vals[0]:.3e})"
        )
    return Omega


def sample_mvn(Sigma, n: int, seed) -> np.ndarray:
    """Draw n rows from N(0, Sigma). ``seed`` is an int/sequence or a Generator."""
    Sigma = check_symmetric(Sigma, "Sigma")
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n}")
    try:
        L = np.linalg.cholesky(Sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("sampling requires a p.d. covariance") from exc
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.standard_normal((int(n), Sigma.shape[0])) @ L.T


def loss_frobenius(omega_hat, Omega) -> float:
    """Squared Frobenius loss ``||omega_hat - Omega||_F^2``."""
    diff = np.asarray(omega_hat, dtype=float) - np.asarray(Omega, dtype=float)
    return float(np.sum(diff * diff))


def _quadratic_given_sigma(omega_hat, Sigma) -> float:
    M = omega_hat @ Sigma
    M[np.diag_indices_from(M)] -= 1.0
    return float(np.sum(M * M))


def loss_quadratic(omega_hat, Omega) -> float:
    """Squared quadratic loss ``||omega_hat Omega^-1 - I||_F^2``."""
    return _quadratic_given_sigma(np.asarray(omega_hat, dtype=float), inv_pd(Omega))


@dataclass(frozen=True)
class RiskConfig:
    """Monte Carlo risk-curve settings.

    ``grid`` is in the alternative penalty scale; archetype fits translate
    each value through the penalty scale maps so all estimators are compared
    at equivalent shrinkage.
    """

    population: PopulationSpec
    sample_sizes: tuple
    grid: np.ndarray
    estimators: tuple = ("alt-1", "archetype-1")
    target: object = _est.DDIAG
    reps: int = 100
    loss: str = "quadratic"
    base_seed: int = 0

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise InvalidParameterError(f"loss must be one of {LOSSES}, got {self.loss!r}")
        for kind in self.estimators:
            if kind not in _est.KINDS:
                raise InvalidParameterError(f"unknown estimator kind {kind!r}")
        if int(self.reps) != self.reps or self.reps < 1:
            raise InvalidParameterError(f"reps must be a positive integer, got {self.reps}")
        grid = np.atleast_1d(np.asarray(self.grid, dtype=float))
        if grid.size == 0 or not np.all(np.isfinite(grid)) or np.any(grid <= 0):
            raise InvalidParameterError("grid values must be finite and positive")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "estimators", tuple(self.estimators))


@dataclass(frozen=True)
class RiskCurve:
    grid: np.ndarray
    sample_sizes: tuple
    estimators: tuple
    target_label: str
    loss: str
    medians: dict  # (kind, n) -> ndarray over grid
    losses: dict | None = None  # (kind, n) -> ndarray (reps, len(grid))


def penalty_in_kind_scale(kind: str, lam_a: float) -> float:
    """Translate an alternative-scale penalty into ``kind``'s own scale."""
    if kind in ("alt-1", "alt-2"):
        return float(lam_a)
    if kind == "archetype-1":
        return _est.penalty_map_1(lam_a)
    if kind == "archetype-2":
        return float(np.sqrt(lam_a))
    raise InvalidParameterError(f"unknown estimator kind {kind!r}")


def default_risk_grid(Omega, num: int = 50) -> np.ndarray:
    """Default alternative-scale grid anchored at g = tr(Omega^-1)/p."""
    Sigma = inv_pd(Omega)
    g = float(np.trace(Sigma)) / Sigma.shape[0]
    return np.logspace(np.log10(1e-4 * g), np.log10(1e4 * g), int(num))


def risk_curve(config: RiskConfig, threads: int = 1, keep_losses: bool = False) -> RiskCurve:
    """Median loss per (estimator, sample size, grid penalty) over replicates.

    Replicate r at sample size n uses the RNG stream seeded by
    ``[base_seed, n, r]``, so curves are reproducible and thread-safe.
    """
    Omega = population_precision(config.population)
    Sigma = inv_pd(Omega)
    L = np.linalg.cholesky(Sigma)
    p = Omega.shape[0]
    kinds = config.estimators
    grid = config.grid
    lam_table = {k: [penalty_in_kind_scale(k, la) for la in grid] for k in kinds}

    def one_rep(args):
        n, r = args
        rng = np.random.default_rng([int(config.base_seed), int(n), int(r)])
        S = sample_cov(rng.standard_normal((n, p)) @ L.T)
        out = np.empty((len(kinds), grid.size))
        for ki, kind in enumerate(kinds):
            for gi, lam in enumerate(lam_table[kind]):
                est = _est.fit(kind, S, lam, config.target)
                if config.loss == "frobenius":
                    out[ki, gi] = loss_frobenius(est.omega, Omega)
                else:
                    out[ki, gi] = _quadratic_given_sigma(est.omega, Sigma)
        return out

    medians = {}
    losses = {} if keep_losses else None
    for n in config.sample_sizes:
        reps = [(n, r) for r in range(config.reps)]
        stacked = np.stack(map_maybe_threaded(one_rep, reps, threads))
        med = np.median(stacked, axis=0)
        for ki, kind in enumerate(kinds):
            medians[(kind, n)] = med[ki]
            if keep_losses:
                losses[(kind, n)] = stacked[:, ki, :]
    if isinstance(config.target, _est.Target):
        target_label = config.target.label()
    else:
        target_label = str(config.target)
    return RiskCurve(grid, config.sample_sizes, kinds, target_label, config.loss, medians, losses)


# ---------------------------------------------------------------------------
# The worked 5x5 example and shrinkage paths


def figure1_inverse() -> np.ndarray:
    """The 5x5 population precision: unit diagonal, (j1*j2+1 mod 21)/25 off it."""
    p = 5
    M = np.empty((p, p))
    for a in range(1, p + 1):
        for b in range(1, p + 1):
            M[a - 1, b - 1] = 1.0 if a == b else ((a * b + 1) % 21) / 25.0
    return M


def figure1_matrix() -> np.ndarray:
    """The 5x5 worked-example covariance (inverse of :func:`figure1_inverse`)."""
    Sinv = figure1_inverse()
    vals = np.linalg.eigvalsh(Sinv)
    if vals[0] <= pd_tolerance(vals):
        raise ConstructionFailedError("worked-example precision is not p.d.")
    return inv_pd(Sinv)


def coefficient_paths(S, grid, kinds=("alt-1",), target=_est.DDIAG):
    """Off-diagonal precision entries along a penalty grid.

    Returns ``(pairs, paths)`` with ``pairs`` the upper-triangle index pairs
    and ``paths[kind]`` an array of shape (len(pairs), len(grid)). The grid
    is in the alternative scale and mapped per kind, as in the risk harness.
    """
    S = check_symmetric(S, "S")
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    iu = np.triu_indices(S.shape[0], k=1)
    pairs = list(zip(iu[0].tolist(), iu[1].tolist()))
    paths = {}
    for kind in kinds:
        out = np.empty((len(pairs), grid.size))
        for gi, la in enumerate(grid):
            est = _est.fit(kind, S, penalty_in_kind_scale(kind, la), target)
            out[:, gi] = est.omega[iu]
        paths[kind] = out
    return pairs, paths
