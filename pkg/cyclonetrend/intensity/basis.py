"""
CycloneTrend - Cubic B-Spline Basis
===================================

Clamped cubic B-spline bases on a study period (a, b]: construction with
equally spaced interior knots, evaluation of the basis functions and their
first two derivatives, and exact integrals over subintervals.

Features:
- Study period with N equal bins of width delta
- Clamped knot vector (boundary knots repeated degree + 1 times)
- Vectorised evaluation through scipy's de Boor recursion
- Piecewise Gauss-Legendre integration, split at the knots
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np
from scipy.interpolate import BSpline

from core.exceptions import DomainError, IdentifiabilityError

logger = logging.getLogger(__name__)

DEGREE = 3

# Two Gauss-Legendre nodes integrate polynomials up to degree 3 exactly.
QUADRATURE_NODES, QUADRATURE_WEIGHTS = np.polynomial.legendre.leggauss(2)


@dataclass(frozen=True)
class StudyPeriod:
    """
    The window (a, b] cut into N bins of equal width.

    Bin n (1-based) is (a + (n - 1) * delta, a + n * delta].
    """

    a: float
    b: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise DomainError(f"study period needs a < b, got a={self.a}, b={self.b}")
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"study period needs at least 2 bins, got N={self.N}")
        object.__setattr__(self, 'a', float(self.a))
        object.__setattr__(self, 'b', float(self.b))
        object.__setattr__(self, 'N', int(self.N))

    @property
    def delta(self) -> float:
        return (self.b - self.a) / self.N

    @property
    def length(self) -> float:
        return self.b - self.a

    def bin_edges(self) -> np.ndarray:
        """The N + 1 bin boundaries, first and last exactly a and b."""
        edges = self.a + self.delta * np.arange(self.N + 1)
        edges[-1] = self.b
        return edges

    def bin_bounds(self, n: int) -> Tuple[float, float]:
        """Bounds (lo, hi] of bin n, 1-based."""
        if not 1 <= n <= self.N:
            raise DomainError(f"bin index {n} outside 1..{self.N}")
        edges = self.bin_edges()
        return float(edges[n - 1]), float(edges[n])

    def contains(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        return bool(np.all(np.isfinite(t)) and np.all(t >= self.a) and np.all(t <= self.b))

    def shifted(self, offset: float) -> 'StudyPeriod':
        return StudyPeriod(self.a + offset, self.b + offset, self.N)


@dataclass(frozen=True)
class SplineBasis:
    """Clamped cubic B-spline basis on a study period."""

    period: StudyPeriod
    interior_knots: Tuple[float, ...]
    degree: int = DEGREE

    def __post_init__(self):
        knots = tuple(float(k) for k in self.interior_knots)
        if any(k <= self.period.a or k >= self.period.b for k in knots):
            raise DomainError("interior knots must lie strictly inside (a, b)")
        if any(k2 <= k1 for k1, k2 in zip(knots, knots[1:])):
            raise DomainError("interior knots must be strictly increasing")
        if self.degree != DEGREE:
            raise DomainError(f"only cubic splines are supported, got degree {self.degree}")
        object.__setattr__(self, 'interior_knots', knots)

    @property
    def L(self) -> int:
        """Number of basis functions."""
        return len(self.interior_knots) + self.degree + 1

    @property
    def knot_vector(self) -> np.ndarray:
        boundary = self.degree + 1
        return np.concatenate([
            np.full(boundary, self.period.a),
            np.asarray(self.interior_knots, dtype=float),
            np.full(boundary, self.period.b),
        ])

    @property
    def breakpoints(self) -> np.ndarray:
        """Distinct knots: a, the interior knots, b."""
        return np.concatenate([[self.period.a], self.interior_knots, [self.period.b]])

    def support(self, index: int) -> Tuple[float, float]:
        """Interval outside of which basis function `index` (0-based) vanishes."""
        knots = self.knot_vector
        return float(knots[index]), float(knots[index + self.degree + 1])

    @cached_property
    def _splines(self) -> Tuple[BSpline, BSpline, BSpline]:
        # Identity coefficients turn one vector-valued spline into all L basis functions.
        spline = BSpline(self.knot_vector, np.eye(self.L), self.degree, extrapolate=False)
        return spline, spline.derivative(1), spline.derivative(2)


def make_basis(period: StudyPeriod, interior_knot_count: int) -> SplineBasis:
    """
    Build a clamped cubic basis with equally spaced interior knots.

    Raises IdentifiabilityError when there are more basis functions than bins.
    """
    if int(interior_knot_count) != interior_knot_count or interior_knot_count < 0:
        raise DomainError(f"interior knot count must be a nonnegative integer, got {interior_knot_count}")
    interior_knot_count = int(interior_knot_count)

    n_basis = interior_knot_count + DEGREE + 1
    if n_basis > period.N:
        raise IdentifiabilityError(n_basis, period.N)

    interior = np.linspace(period.a, period.b, interior_knot_count + 2)[1:-1]
    basis = SplineBasis(period=period, interior_knots=tuple(interior))
    logger.debug(f"Built cubic basis with L={basis.L} on ({period.a}, {period.b}]")
    return basis


def basis_matrix(basis: SplineBasis, times, derivative_order: int = 0) -> np.ndarray:
    """
    Evaluate every basis function (or its derivative) at many times.

    Returns an array of shape (len(times), L). At t = b the left limit is
    used, so the basis still sums to one there.
    """
    if derivative_order not in (0, 1, 2):
        raise DomainError(f"derivative order must be 0, 1 or 2, got {derivative_order}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if not basis.period.contains(times):
        raise DomainError(
            f"evaluation times must lie in [{basis.period.a}, {basis.period.b}]"
        )
    return basis._splines[derivative_order](times)


def eval_basis(basis: SplineBasis, t: float, derivative_order: int = 0) -> np.ndarray:
    """Values (B_1^(d)(t), ..., B_L^(d)(t)) at a single time t."""
    return basis_matrix(basis, [t], derivative_order)[0]


def quadrature_rule(basis: SplineBasis, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on (lo, hi], split at interior knots."""
    inside = [k for k in basis.interior_knots if lo < k < hi]
    cuts = np.array([lo, *inside, hi])
    half = 0.5 * np.diff(cuts)[:, None]
    mid = 0.5 * (cuts[:-1] + cuts[1:])[:, None]
    nodes = (mid + half * QUADRATURE_NODES).ravel()
    weights = (half * QUADRATURE_WEIGHTS).ravel()
    # Rounding can push a node a hair past the window on the outer pieces.
    return np.clip(nodes, lo, hi), weights


def integrate_basis(basis: SplineBasis, lo: float, hi: float) -> np.ndarray:
    """Exact integrals of each basis function over (lo, hi]."""
    period = basis.period
    if not (period.a <= lo < hi <= period.b):
        raise DomainError(
            f"integration window ({lo}, {hi}] must be non-empty and inside "
            f"[{period.a}, {period.b}]"
        )
    nodes, weights = quadrature_rule(basis, lo, hi)
    return weights @ basis_matrix(basis, nodes, 0)
