"""
CycloneTrend - Intensity Curves and Delta-Method Bands
======================================================

Gridded estimates of lambda(t) = exp(g(t)), g(t) = sum_l beta_l B_l(t), and
of its first two time derivatives

    lambda'(t)  = lambda(t) * g'(t)
    lambda''(t) = lambda(t) * (g''(t) + g'(t)^2)

with pointwise 95% normal bands from the delta method,
Var ~= grad^T I^-1 grad, where grad is the gradient of the curve in beta.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from core.exceptions import DomainError

from .basis import SplineBasis, StudyPeriod, basis_matrix
from .model import FitResult

logger = logging.getLogger(__name__)

Z_95 = 1.959964


@dataclass(frozen=True, eq=False)
class CurveEstimate:
    """Estimates of lambda^(order) on a grid, with standard errors and bands."""

    grid: np.ndarray
    order: int
    value: np.ndarray
    std_error: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    scale: str = 'linear'

    def records(self):
        for row in zip(self.grid, self.value, self.std_error, self.ci_low, self.ci_high):
            yield dict(zip(('t', 'estimate', 'std_error', 'ci_low', 'ci_high'), map(float, row)))


def default_grid(period: StudyPeriod, points: Optional[int] = None) -> np.ndarray:
    """Equally spaced evaluation grid over [a, b]."""
    if points is None:
        from django.conf import settings
        points = getattr(settings, 'INTENSITY_GRID_POINTS', 1001)
    if points < 2:
        raise DomainError(f"a grid needs at least 2 points, got {points}")
    grid = np.linspace(period.a, period.b, points)
    grid[-1] = period.b
    return grid


def _check_order(order: int):
    if order not in (0, 1, 2):
        raise DomainError(f"curve order must be 0, 1 or 2, got {order}")


def _spline_terms(beta, basis: SplineBasis, times):
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (basis.L,):
        raise DomainError(f"beta has {beta.size} entries, basis has {basis.L} functions")
    B0 = basis_matrix(basis, times, 0)
    B1 = basis_matrix(basis, times, 1)
    B2 = basis_matrix(basis, times, 2)
    g, g1, g2 = B0 @ beta, B1 @ beta, B2 @ beta
    return B0, B1, B2, g, g1, g2, np.exp(g)


def curve_values(beta, basis: SplineBasis, times, order: int) -> np.ndarray:
    """lambda^(order)(t) at each time for the given coefficients."""
    _check_order(order)
    _, _, _, _, g1, g2, lam = _spline_terms(beta, basis, times)
    if order == 0:
        return lam
    if order == 1:
        return lam * g1
    return lam * (g2 + g1 ** 2)


def curve_gradient(beta, basis: SplineBasis, times, order: int) -> np.ndarray:
    """
    d lambda^(order)(t) / d beta_l, one row per time.

    order 0: lambda * B_l
    order 1: lambda * (B_l' + B_l g')
    order 2: lambda * (B_l'' + B_l (g'' + g'^2) + 2 B_l' g')
    """
    _check_order(order)
    B0, B1, B2, _, g1, g2, lam = _spline_terms(beta, basis, times)
    if order == 0:
        inner = B0
    elif order == 1:
        inner = B1 + B0 * g1[:, None]
    else:
        inner = B2 + B0 * (g2 + g1 ** 2)[:, None] + 2.0 * B1 * g1[:, None]
    return lam[:, None] * inner


def _quadratic_form(gradients: np.ndarray, covariance: np.ndarray) -> np.ndarray:
    variance = np.einsum('gi,ij,gj->g', gradients, covariance, gradients)
    # Rounding can leave -1e-20 where the true form is zero.
    return np.maximum(variance, 0.0)


def delta_method_variance(fit: FitResult, basis: SplineBasis, t: float, order: int) -> float:
    """Delta-method variance of lambda-hat^(order) at a single time."""
    gradient = curve_gradient(fit.beta_hat, basis, [t], order)
    return float(_quadratic_form(gradient, fit.covariance)[0])


def intensity(fit: FitResult, basis: SplineBasis, grid, order: int = 0,
              log_scale: bool = False) -> CurveEstimate:
    """
    Estimate lambda^(order) on a grid with 95% delta-method bands.

    Bands are value +/- 1.959964 * std_error and may cross zero. With
    log_scale=True (order 0 only) the band is exp(g +/- z * se(g)) instead,
    which stays positive; std_error is still the delta-method error of lambda.
    """
    _check_order(order)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if not basis.period.contains(grid):
        raise DomainError(f"grid must lie in [{basis.period.a}, {basis.period.b}]")

    value = curve_values(fit.beta_hat, basis, grid, order)
    std_error = np.sqrt(_quadratic_form(curve_gradient(fit.beta_hat, basis, grid, order), fit.covariance))

    if log_scale:
        if order != 0:
            raise DomainError("log-scale bands are only defined for the intensity itself (order 0)")
        B0 = basis_matrix(basis, grid, 0)
        log_se = np.sqrt(_quadratic_form(B0, fit.covariance))
        g = np.log(value)
        ci_low, ci_high = np.exp(g - Z_95 * log_se), np.exp(g + Z_95 * log_se)
        scale = 'log'
    else:
        ci_low, ci_high = value - Z_95 * std_error, value + Z_95 * std_error
        scale = 'linear'

    return CurveEstimate(
        grid=grid, order=order, value=value, std_error=std_error,
        ci_low=ci_low, ci_high=ci_high, scale=scale,
    )


# ---------------------------------------------------------------------------
# Curve summaries
# ---------------------------------------------------------------------------

def _window(curve: CurveEstimate, lo: float, hi: float) -> np.ndarray:
    if hi <= lo:
        raise DomainError(f"window ({lo}, {hi}) is empty")
    mask = (curve.grid >= lo) & (curve.grid <= hi)
    if mask.sum() < 2:
        raise DomainError(f"fewer than two grid points fall in [{lo}, {hi}]")
    return mask


def window_average(curve: CurveEstimate, lo: float, hi: float) -> float:
    """Time average of the curve over [lo, hi] by the trapezoidal rule."""
    mask = _window(curve, lo, hi)
    t, v = curve.grid[mask], curve.value[mask]
    return float(trapezoid(v, t) / (t[-1] - t[0]))


def sign_share(curve: CurveEstimate, lo: float, hi: float) -> float:
    """Share of grid points in [lo, hi] where the curve is positive."""
    mask = _window(curve, lo, hi)
    return float(np.mean(curve.value[mask] > 0))
