"""
CycloneTrend - NHPP Simulation and Parametric Bootstrap
=======================================================

Synthetic data with a known intensity, used to check estimation and testing.

Features:
- Constant, spline, step and ramp intensity specifications
- Binned counts drawn from Poisson(integral of lambda over each bin)
- Exact event times by thinning against a constant upper bound
- Parametric bootstrap of a fitted model and pointwise coverage studies

Every random draw comes from a numpy Generator over the SIMULATION_RNG bit
generator (PCG64 by default). Replicate streams are derived from one seed
with SeedSequence.spawn, so each replicate depends only on
(seed, replicate index) and results are collected in replicate order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.exceptions import CycloneTrendError, DomainError, OracleUnreliableError, SpecError
from core.outputs import format_float
from intensity.basis import SplineBasis, StudyPeriod
from intensity.inference import curve_values, intensity
from intensity.model import CountSeries, DesignMatrix, FitOptions, FitResult, build_design, fit_mle

logger = logging.getLogger(__name__)

DEFAULT_RNG = 'PCG64'

# Gauss-Legendre nodes per knot piece when integrating a spline intensity.
SPLINE_QUADRATURE_NODES, SPLINE_QUADRATURE_WEIGHTS = np.polynomial.legendre.leggauss(8)


class IntensityKind(str, Enum):
    CONSTANT = 'constant'
    SPLINE = 'spline'
    STEP = 'step'
    RAMP = 'ramp'


def rng_name() -> str:
    from django.conf import settings
    return getattr(settings, 'SIMULATION_RNG', DEFAULT_RNG)


def make_rng(seed) -> np.random.Generator:
    name = rng_name()
    bit_generator = getattr(np.random, name, None)
    if not (isinstance(bit_generator, type) and issubclass(bit_generator, np.random.BitGenerator)):
        raise SpecError(f"unknown bit generator {name!r}", hint="Set SIMULATION_RNG to a numpy BitGenerator such as PCG64.")
    return np.random.Generator(bit_generator(seed))


def replicate_rngs(seed: int, replications: int) -> List[np.random.Generator]:
    """One independent generator per replicate, split from a single seed."""
    children = np.random.SeedSequence(seed).spawn(replications)
    return [make_rng(child) for child in children]


@dataclass(frozen=True, eq=False)
class IntensitySpec:
    """A known intensity on a study period. Build with the classmethods."""

    kind: IntensityKind
    domain: StudyPeriod
    rate: Optional[float] = None
    basis: Optional[SplineBasis] = None
    beta: Optional[np.ndarray] = field(default=None, repr=False)
    rate_before: Optional[float] = None
    rate_after: Optional[float] = None
    change_time: Optional[float] = None
    start_rate: Optional[float] = None
    end_rate: Optional[float] = None

    def __post_init__(self):
        kind = IntensityKind(self.kind)
        object.__setattr__(self, 'kind', kind)
        a, b = self.domain.a, self.domain.b

        if kind is IntensityKind.CONSTANT:
            self._require_positive(rate=self.rate)
        elif kind is IntensityKind.STEP:
            self._require_positive(rate_before=self.rate_before, rate_after=self.rate_after)
            if self.change_time is None or not a < self.change_time < b:
                raise SpecError(f"change time {self.change_time} must lie strictly inside ({a}, {b})")
        elif kind is IntensityKind.RAMP:
            self._require_positive(start_rate=self.start_rate, end_rate=self.end_rate)
        else:
            if self.basis is None or self.beta is None:
                raise SpecError("a spline intensity needs a basis and coefficients")
            if self.basis.period != self.domain:
                raise SpecError("spline basis was built on a different study period")
            beta = np.asarray(self.beta, dtype=float)
            if beta.shape != (self.basis.L,) or not np.all(np.isfinite(beta)):
                raise SpecError(f"spline intensity needs {self.basis.L} finite coefficients")
            object.__setattr__(self, 'beta', beta)

    @staticmethod
    def _require_positive(**rates):
        for name, value in rates.items():
            if value is None or not np.isfinite(value) or value <= 0:
                raise SpecError(f"{name} must be a positive rate, got {value}")

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, domain: StudyPeriod, rate: float) -> 'IntensitySpec':
        return cls(IntensityKind.CONSTANT, domain, rate=rate)

    @classmethod
    def spline(cls, basis: SplineBasis, beta) -> 'IntensitySpec':
        return cls(IntensityKind.SPLINE, basis.period, basis=basis, beta=beta)

    @classmethod
    def step(cls, domain: StudyPeriod, rate_before: float, rate_after: float,
             change_time: float) -> 'IntensitySpec':
        return cls(IntensityKind.STEP, domain, rate_before=rate_before,
                   rate_after=rate_after, change_time=change_time)

    @classmethod
    def ramp(cls, domain: StudyPeriod, start_rate: float, end_rate: float) -> 'IntensitySpec':
        return cls(IntensityKind.RAMP, domain, start_rate=start_rate, end_rate=end_rate)

    # -- evaluation ------------------------------------------------------

    def rate_at(self, t) -> np.ndarray:
        """lambda(t), vectorised."""
        t = np.asarray(t, dtype=float)
        if self.kind is IntensityKind.CONSTANT:
            return np.full_like(t, self.rate)
        if self.kind is IntensityKind.STEP:
            return np.where(t <= self.change_time, self.rate_before, self.rate_after)
        if self.kind is IntensityKind.RAMP:
            fraction = (t - self.domain.a) / self.domain.length
            return self.start_rate + (self.end_rate - self.start_rate) * fraction
        return curve_values(self.beta, self.basis, np.atleast_1d(t), 0).reshape(t.shape)

    def integral(self, lo: float, hi: float) -> float:
        """Integral of lambda over (lo, hi]."""
        if hi <= lo:
            return 0.0
        if self.kind is IntensityKind.CONSTANT:
            return self.rate * (hi - lo)
        if self.kind is IntensityKind.STEP:
            before = max(0.0, min(hi, self.change_time) - lo)
            after = max(0.0, hi - max(lo, self.change_time))
            return self.rate_before * before + self.rate_after * after
        if self.kind is IntensityKind.RAMP:
            return (hi - lo) * float(self.rate_at(0.5 * (lo + hi)))

        inside = [k for k in self.basis.interior_knots if lo < k < hi]
        cuts = np.array([lo, *inside, hi])
        half = 0.5 * np.diff(cuts)[:, None]
        mid = 0.5 * (cuts[:-1] + cuts[1:])[:, None]
        nodes = np.clip((mid + half * SPLINE_QUADRATURE_NODES).ravel(), lo, hi)
        weights = (half * SPLINE_QUADRATURE_WEIGHTS).ravel()
        return float(weights @ self.rate_at(nodes))

    def parameters(self) -> Dict:
        """The fields that rebuild this intensity, as scalars or space separated text."""
        if self.kind is IntensityKind.CONSTANT:
            return {'rate': float(self.rate)}
        if self.kind is IntensityKind.STEP:
            return {'rate_before': float(self.rate_before), 'rate_after': float(self.rate_after),
                    'change_time': float(self.change_time)}
        if self.kind is IntensityKind.RAMP:
            return {'start_rate': float(self.start_rate), 'end_rate': float(self.end_rate)}
        return {
            'beta': ' '.join(format_float(b) for b in self.beta),
            'interior_knots': ' '.join(format_float(k) for k in self.basis.interior_knots),
        }

    def bin_means(self) -> np.ndarray:
        edges = self.domain.bin_edges()
        return np.array([self.integral(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])])

    def upper_bound(self) -> float:
        """A finite bound on lambda over (a, b]."""
        if self.kind is IntensityKind.CONSTANT:
            return float(self.rate)
        if self.kind is IntensityKind.STEP:
            return float(max(self.rate_before, self.rate_after))
        if self.kind is IntensityKind.RAMP:
            return float(max(self.start_rate, self.end_rate))
        # Convex hull property: g(t) never exceeds the largest coefficient.
        bound = float(np.exp(np.max(self.beta)))
        if not np.isfinite(bound):
            raise SpecError("spline intensity is unbounded in floating point")
        return bound


# ---------------------------------------------------------------------------
# Counts and events
# ---------------------------------------------------------------------------

def simulate_counts(spec: IntensitySpec, seed: int) -> CountSeries:
    """Independent Poisson counts with mean equal to the bin integrals of lambda."""
    rng = make_rng(seed)
    counts = rng.poisson(spec.bin_means())
    logger.debug(f"Simulated {spec.kind.value} counts with {rng_name()} seed {seed}: total {counts.sum()}")
    return CountSeries(spec.domain, counts, label=f"simulated-{spec.kind.value}")


def thin_events(spec: IntensitySpec, rng: np.random.Generator, lo: float, hi: float) -> Tuple[np.ndarray, int]:
    """
    Event times on (lo, hi] by thinning a homogeneous process at the bound.

    Returns the accepted times (increasing) and the number of candidates.
    """
    period = spec.domain
    if not (period.a <= lo <= hi <= period.b):
        raise DomainError(f"window ({lo}, {hi}] must lie inside [{period.a}, {period.b}]")
    if hi == lo:
        return np.empty(0), 0

    bound = spec.upper_bound()
    n_candidates = int(rng.poisson(bound * (hi - lo)))
    candidates = np.sort(hi - rng.uniform(0.0, hi - lo, n_candidates))
    accept = rng.uniform(0.0, 1.0, n_candidates) * bound < spec.rate_at(candidates)
    events = candidates[accept]
    logger.debug(f"Thinning kept {events.size} of {n_candidates} candidates")
    return events, n_candidates


def simulate_events(spec: IntensitySpec, seed: int, lo: Optional[float] = None,
                    hi: Optional[float] = None) -> np.ndarray:
    """Strictly increasing event times of the NHPP on (lo, hi], default (a, b]."""
    lo = spec.domain.a if lo is None else lo
    hi = spec.domain.b if hi is None else hi
    events, _ = thin_events(spec, make_rng(seed), lo, hi)
    return events


def bin_events(events, period: StudyPeriod, label: str = 'binned-events') -> CountSeries:
    """Count events per bin with the (lo, hi] convention."""
    events = np.asarray(events, dtype=float)
    if events.size and not (np.all(events > period.a) and np.all(events <= period.b)):
        raise DomainError(f"events must lie in ({period.a}, {period.b}]")
    index = np.searchsorted(period.bin_edges(), events, side='left') - 1
    return CountSeries(period, np.bincount(index, minlength=period.N), label=label)


# ---------------------------------------------------------------------------
# Parametric bootstrap
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BootstrapResult:
    """Refitted replicates, in replicate order, plus the failure count."""

    fits: Tuple[FitResult, ...]
    failed: int
    seed: int
    rng: str = DEFAULT_RNG

    def __len__(self):
        return len(self.fits)


def _max_failure_share() -> float:
    from django.conf import settings
    return getattr(settings, 'BOOTSTRAP_MAX_FAILURE_SHARE', 0.10)


def _run_replicates(job, rngs, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, rngs))
    return [job(rng) for rng in rngs]


def parametric_bootstrap(fit: FitResult, design: DesignMatrix, replications: int, seed: int,
                         options: Optional[FitOptions] = None, workers: int = 1) -> BootstrapResult:
    """
    Draw counts from Poisson(mu-hat), refit each replicate with the same design.

    Replicates that fail to refit are dropped and counted; more than
    BOOTSTRAP_MAX_FAILURE_SHARE failures raise OracleUnreliableError.
    """
    if not fit.converged:
        raise DomainError("bootstrap needs a converged fit")
    if replications < 0:
        raise DomainError(f"replications must be nonnegative, got {replications}")

    def job(rng):
        counts = CountSeries(design.period, rng.poisson(fit.fitted_means), label='bootstrap')
        try:
            return fit_mle(design, counts, options)
        except CycloneTrendError as exc:
            logger.debug(f"bootstrap replicate dropped: {exc}")
            return None

    outcomes = _run_replicates(job, replicate_rngs(seed, replications), workers)
    fits = tuple(f for f in outcomes if f is not None)
    failed = len(outcomes) - len(fits)

    if replications and failed / replications > _max_failure_share():
        raise OracleUnreliableError(f"{failed} of {replications} bootstrap replicates failed to refit")
    if failed:
        logger.warning(f"Dropped {failed} of {replications} bootstrap replicates")
    logger.info(f"Bootstrap: {len(fits)} replicates refitted ({rng_name()}, seed {seed})")
    return BootstrapResult(fits=fits, failed=failed, seed=seed, rng=rng_name())


def bootstrap_curve_std(result: BootstrapResult, basis: SplineBasis, grid, order: int = 0) -> np.ndarray:
    """Standard deviation across replicates of lambda-hat^(order) on the grid."""
    if len(result) < 2:
        raise DomainError("need at least two bootstrap replicates")
    curves = np.vstack([curve_values(f.beta_hat, basis, grid, order) for f in result.fits])
    return curves.std(axis=0, ddof=1)


def pointwise_coverage(spec: IntensitySpec, basis: SplineBasis, replications: int, seed: int,
                       grid, options: Optional[FitOptions] = None, workers: int = 1) -> np.ndarray:
    """
    Share of replicates whose 95% band for lambda covers the true intensity,
    per grid point. Replicates that fail to fit are skipped.
    """
    grid = np.asarray(grid, dtype=float)
    truth = spec.rate_at(grid)
    means = spec.bin_means()
    design = build_design(basis, spec.domain)

    def job(rng):
        counts = CountSeries(spec.domain, rng.poisson(means), label='coverage')
        try:
            curve = intensity(fit_mle(design, counts, options), basis, grid, 0)
        except CycloneTrendError:
            return None
        return (curve.ci_low <= truth) & (truth <= curve.ci_high)

    hits = [h for h in _run_replicates(job, replicate_rngs(seed, replications), workers) if h is not None]
    if not hits:
        raise OracleUnreliableError("no coverage replicate could be fitted")
    return np.mean(np.vstack(hits), axis=0)
