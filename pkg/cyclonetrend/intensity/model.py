"""
CycloneTrend - Poisson Regression on Integrated Splines
=======================================================

Reduces the non-homogeneous Poisson process to a Poisson regression: the
count in bin n has log mean sum_l beta_l * integral_{bin n} B_l(t) dt, so the
design matrix holds the integrated basis functions and the model is a
canonical-link GLM.

Features:
- Count series container with validation
- Design matrix of integrated basis functions
- Log-likelihood, score and Fisher information
- Fisher scoring with step-halving and loud failure modes
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from core.exceptions import (
    ConvergenceError, DegenerateDataError, DomainError, NumericError, RankDeficiencyError,
)

from .basis import SplineBasis, StudyPeriod, integrate_basis

logger = logging.getLogger(__name__)

# exp() overflows just past 709; anything beyond this is treated as divergence.
MAX_LINEAR_PREDICTOR = 700.0

# Smallest eigenvalue ratio of the information matrix accepted as full rank.
MIN_INFORMATION_RCOND = 1e-13


@dataclass(frozen=True, eq=False)
class CountSeries:
    """Per-bin event counts X_1..X_N for one category."""

    period: StudyPeriod
    counts: np.ndarray
    label: str = ''

    def __post_init__(self):
        raw = np.asarray(self.counts)
        if raw.ndim != 1 or raw.shape[0] != self.period.N:
            raise DomainError(
                f"expected {self.period.N} counts for the study period, got {raw.size}"
            )
        values = raw.astype(float)
        if not np.all(np.isfinite(values)) or np.any(values != np.round(values)):
            raise DomainError("counts must be integers")
        if np.any(values < 0):
            raise DomainError("counts must be nonnegative")
        counts = values.astype(np.int64)
        counts.flags.writeable = False
        object.__setattr__(self, 'counts', counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def segment_sums(self, K: int):
        """(sum of the first K bins, sum of all bins)."""
        return int(self.counts[:K].sum()), self.total


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """N x L matrix; entry (n, l) is the integral of B_l over bin n."""

    entries: np.ndarray
    period: StudyPeriod

    @property
    def n_bins(self) -> int:
        return self.entries.shape[0]

    @property
    def n_basis(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class FitOptions:
    """Stopping rules for Fisher scoring."""

    tolerance: float = 1e-10
    score_tolerance: float = 1e-8
    max_iterations: int = 100
    max_halvings: int = 30

    @classmethod
    def from_settings(cls) -> 'FitOptions':
        from django.conf import settings
        return cls(
            tolerance=getattr(settings, 'FIT_TOLERANCE', cls.tolerance),
            score_tolerance=getattr(settings, 'FIT_SCORE_TOLERANCE', cls.score_tolerance),
            max_iterations=getattr(settings, 'FIT_MAX_ITERATIONS', cls.max_iterations),
            max_halvings=getattr(settings, 'FIT_MAX_HALVINGS', cls.max_halvings),
        )


@dataclass(frozen=True, eq=False)
class FitResult:
    """Maximum likelihood estimate with its inverse-information covariance."""

    beta_hat: np.ndarray
    covariance: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    fitted_means: np.ndarray
    score_max_norm: float

    @property
    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance))


# ---------------------------------------------------------------------------
# Design and likelihood
# ---------------------------------------------------------------------------

def build_design(basis: SplineBasis, period: StudyPeriod) -> DesignMatrix:
    """Integrate every basis function over every bin of the period."""
    if basis.period != period:
        raise DomainError("basis was built on a different study period")
    edges = period.bin_edges()
    rows = [integrate_basis(basis, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    entries = np.vstack(rows)
    entries.flags.writeable = False
    return DesignMatrix(entries=entries, period=period)


def _check_dimensions(design: DesignMatrix, beta: np.ndarray, counts: Optional[CountSeries] = None):
    if beta.shape != (design.n_basis,):
        raise DomainError(f"beta has {beta.size} entries, design has {design.n_basis} columns")
    if counts is not None and counts.counts.shape[0] != design.n_bins:
        raise DomainError(f"series has {counts.counts.size} bins, design has {design.n_bins} rows")


def linear_predictor(design: DesignMatrix, beta) -> np.ndarray:
    """eta_n = row_n . beta, refusing values exp() cannot represent."""
    beta = np.asarray(beta, dtype=float)
    _check_dimensions(design, beta)
    eta = design.entries @ beta
    bad = np.flatnonzero(~np.isfinite(eta) | (np.abs(eta) > MAX_LINEAR_PREDICTOR))
    if bad.size:
        n = int(bad[0]) + 1
        raise NumericError(f"linear predictor {eta[bad[0]]} out of range in bin {n}", bin_index=n)
    return eta


def log_likelihood(design: DesignMatrix, counts: CountSeries, beta) -> float:
    """Poisson log-likelihood including the -log(X_n!) constant."""
    beta = np.asarray(beta, dtype=float)
    _check_dimensions(design, beta, counts)
    eta = linear_predictor(design, beta)
    x = counts.counts.astype(float)
    return float(np.sum(x * eta - np.exp(eta) - gammaln(x + 1.0)))


def score(design: DesignMatrix, counts: CountSeries, beta) -> np.ndarray:
    """Gradient of the log-likelihood in beta."""
    beta = np.asarray(beta, dtype=float)
    _check_dimensions(design, beta, counts)
    mu = np.exp(linear_predictor(design, beta))
    return design.entries.T @ (counts.counts - mu)


def fisher_information(design: DesignMatrix, beta) -> np.ndarray:
    """I_ij = sum_n D_ni * D_nj * exp(eta_n)."""
    mu = np.exp(linear_predictor(design, beta))
    D = design.entries
    return D.T @ (mu[:, None] * D)


# ---------------------------------------------------------------------------
# Fisher scoring
# ---------------------------------------------------------------------------

def _factor_information(information: np.ndarray):
    eigenvalues = np.linalg.eigvalsh(information)
    if eigenvalues[0] <= MIN_INFORMATION_RCOND * eigenvalues[-1]:
        raise RankDeficiencyError(
            f"Fisher information is singular (eigenvalue ratio {eigenvalues[0] / eigenvalues[-1]:.3g})"
        )
    try:
        return linalg.cho_factor(information)
    except linalg.LinAlgError as exc:
        raise RankDeficiencyError(f"Fisher information is not positive definite: {exc}") from exc


def initial_beta(design: DesignMatrix, counts: CountSeries) -> np.ndarray:
    """All coefficients log(mean count / delta): a flat starting intensity."""
    mean_count = counts.counts.mean()
    return np.full(design.n_basis, np.log(mean_count / design.period.delta))


def fit_mle(design: DesignMatrix, counts: CountSeries, options: Optional[FitOptions] = None) -> FitResult:
    """
    Maximum likelihood estimate of beta by Fisher scoring.

    The log link is canonical, so Fisher scoring coincides with Newton's
    method. Steps are halved until the log-likelihood does not decrease.

    Raises:
        DegenerateDataError: the series has no events.
        RankDeficiencyError: the information matrix is singular.
        ConvergenceError: no convergence within options.max_iterations.
    """
    options = options or FitOptions()
    _check_dimensions(design, np.zeros(design.n_basis), counts)
    if counts.total == 0:
        raise DegenerateDataError(
            f"series '{counts.label}' has no events; the maximum likelihood estimate does not exist"
        )

    x = counts.counts.astype(float)
    D = design.entries
    beta = initial_beta(design, counts)
    ll = log_likelihood(design, counts, beta)
    iterations = 0

    while True:
        mu = np.exp(linear_predictor(design, beta))
        gradient = D.T @ (x - mu)
        score_norm = float(np.max(np.abs(gradient)))
        if score_norm < options.score_tolerance:
            break
        if iterations >= options.max_iterations:
            raise ConvergenceError(
                f"Fisher scoring did not converge in {options.max_iterations} iterations "
                f"(score max-norm {score_norm:.3g})",
                beta=beta, iterations=iterations,
            )

        step = linalg.cho_solve(_factor_information(D.T @ (mu[:, None] * D)), gradient)
        scale = 1.0
        slack = 1e-12 * max(1.0, abs(ll))
        for halving in range(options.max_halvings + 1):
            candidate = beta + scale * step
            try:
                ll_candidate = log_likelihood(design, counts, candidate)
            except NumericError:
                ll_candidate = -np.inf
            if ll_candidate >= ll - slack:
                break
            scale *= 0.5
        else:
            raise ConvergenceError(
                f"step-halving failed to increase the log-likelihood after "
                f"{options.max_halvings} halvings",
                beta=beta, iterations=iterations,
            )

        iterations += 1
        change = ll_candidate - ll
        logger.debug(
            f"iteration {iterations}: log-likelihood {ll_candidate:.12f} "
            f"(change {change:.3g}, step scale {scale:g}, score {score_norm:.3g})"
        )
        beta, ll = candidate, ll_candidate
        if abs(change) < options.tolerance:
            break

    mu = np.exp(linear_predictor(design, beta))
    gradient = D.T @ (x - mu)
    information = D.T @ (mu[:, None] * D)
    covariance = linalg.cho_solve(_factor_information(information), np.eye(design.n_basis))
    covariance = 0.5 * (covariance + covariance.T)

    result = FitResult(
        beta_hat=beta,
        covariance=covariance,
        log_likelihood=ll,
        iterations=iterations,
        converged=True,
        fitted_means=mu,
        score_max_norm=float(np.max(np.abs(gradient))),
    )
    logger.info(
        f"Fitted '{counts.label}' with L={design.n_basis}: log-likelihood {ll:.6f}, "
        f"{iterations} iterations, fitted total {mu.sum():.6f} vs observed {counts.total}"
    )
    return result
