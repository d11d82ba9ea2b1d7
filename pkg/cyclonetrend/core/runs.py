"""
CycloneTrend - Run Orchestration
================================

One function per command-line operation. Each reads its input, calls the
library and writes every artifact through a single AtomicOutputSet, so a
failing run leaves nothing behind.

Artifacts (`<ext>` is csv or json):
- fit:       <label>_order0/1/2.<ext> curves, <label>_fit_summary.<ext>
- test:      <label>_test.<ext>
- simulate:  <label>.csv in ingestion format, headed by the intensity
             parameters, the bit generator and the run config
- basis:     <label>_basis.<ext>, <label>_design.<ext>
- summarize: <label>_summary.<ext>
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from changepoint.exact_test import ChangePointResult, exact_test
from core.exceptions import DomainError
from core.ingestion import annual_period, frequency_table, ingest, render_series
from core.outputs import AtomicOutputSet, config_header, render_records
from core.runconfig import RunConfig
from intensity.basis import SplineBasis, basis_matrix, make_basis
from intensity.inference import CurveEstimate, default_grid, intensity, window_average
from intensity.model import CountSeries, FitOptions, FitResult, build_design, fit_mle
from simulation.simulate import IntensitySpec, rng_name, simulate_counts

logger = logging.getLogger(__name__)

CURVE_ORDERS = (0, 1, 2)


@dataclass
class RunOutcome:
    """What a run produced: the published paths plus the headline numbers."""

    paths: List = field(default_factory=list)
    summary: Dict = field(default_factory=dict)


def _level() -> float:
    from django.conf import settings
    return getattr(settings, 'CHANGEPOINT_LEVEL', 0.05)


def _load(config: RunConfig) -> CountSeries:
    if config.input_path is None:
        raise DomainError("this run needs an input file")
    return ingest(config.input_path, config.start_year, config.end_year, label=config.label)


def _name(config: RunConfig, suffix: str) -> str:
    return f"{config.label}{suffix}.{config.emit_format}"


def _segment_rows(config: RunConfig, sum_before: int, sum_total: int) -> List[Dict]:
    K, N = config.change_bin, config.n_years
    return [
        {'segment': f"{config.start_year}-{config.change_year}", 'years': K,
         'events': sum_before, 'average': sum_before / K},
        {'segment': f"{config.change_year + 1}-{config.end_year}", 'years': N - K,
         'events': sum_total - sum_before, 'average': (sum_total - sum_before) / (N - K)},
    ]


# =============================================================================
# FIT
# =============================================================================

def fit_series(config: RunConfig, series: CountSeries):
    """Basis, fit and the three curves for one series."""
    basis = make_basis(series.period, config.interior_knot_count)
    fit = fit_mle(build_design(basis, series.period), series, FitOptions.from_settings())
    grid = default_grid(series.period, config.grid_points)
    curves = [
        intensity(fit, basis, grid, order, log_scale=config.log_scale_band and order == 0)
        for order in CURVE_ORDERS
    ]
    return basis, fit, curves


def _fit_summary(config: RunConfig, series: CountSeries, basis: SplineBasis, fit: FitResult,
                 level_curve: CurveEstimate) -> Dict:
    summary = {
        'n_basis': basis.L,
        'log_likelihood': fit.log_likelihood,
        'iterations': fit.iterations,
        'converged': fit.converged,
        'score_max_norm': fit.score_max_norm,
        'fitted_total': float(fit.fitted_means.sum()),
        'observed_total': series.total,
    }
    if config.change_year is not None:
        split = float(config.change_year + 1)
        summary['fitted_average_before'] = window_average(level_curve, series.period.a, split)
        summary['fitted_average_after'] = window_average(level_curve, split, series.period.b)
    return summary


def run_fit(config: RunConfig) -> RunOutcome:
    """Fit the intensity and write the curve files and the fit summary."""
    series = _load(config)
    basis, fit, curves = fit_series(config, series)
    settings_dict = config.as_dict()
    summary = _fit_summary(config, series, basis, fit, curves[0])

    coefficients = [
        {'index': index, 'beta_hat': float(b), 'std_error': float(se)}
        for index, (b, se) in enumerate(zip(fit.beta_hat, fit.std_errors), start=1)
    ]
    with AtomicOutputSet(config.output_dir) as outputs:
        for curve in curves:
            outputs.add(
                _name(config, f"_order{curve.order}"),
                render_records(f"curve_order{curve.order}", curve.records(), settings_dict,
                               config.emit_format, summary={'band_scale': curve.scale}),
            )
        outputs.add(
            _name(config, '_fit_summary'),
            render_records('fit_summary', coefficients, settings_dict, config.emit_format, summary),
        )

    logger.info(f"Fit run '{config.label}' wrote {len(outputs.published)} files to {config.output_dir}")
    return RunOutcome(paths=outputs.published, summary=summary)


# =============================================================================
# CHANGE-POINT TEST
# =============================================================================

def report_summary(config: RunConfig, result: ChangePointResult) -> Dict:
    level = _level()
    return {
        'change_year': config.change_year,
        'K': result.K,
        'N': result.N,
        'sum_before': result.sum_before,
        'sum_after': result.sum_after,
        'sum_total': result.sum_total,
        'mean_before': result.mean_before,
        'mean_after': result.mean_after,
        'variant': result.variant.value,
        'p_value': result.p_value,
        'level': level,
        'decision': 'reject' if result.rejects(level) else 'accept',
    }


def run_test(config: RunConfig) -> RunOutcome:
    """Exact test of a drop after change_year; writes the test report."""
    if config.change_year is None:
        raise DomainError("the change-point test needs a change year")
    series = _load(config)
    result = exact_test(series, config.change_bin, config.test_variant)
    summary = report_summary(config, result)

    with AtomicOutputSet(config.output_dir) as outputs:
        outputs.add(
            _name(config, '_test'),
            render_records('changepoint_test', _segment_rows(config, result.sum_before, result.sum_total),
                           config.as_dict(), config.emit_format, summary),
        )
    return RunOutcome(paths=outputs.published, summary=summary)


# =============================================================================
# SIMULATION
# =============================================================================

def run_simulate(config: RunConfig, spec: IntensitySpec) -> RunOutcome:
    """Simulate counts from spec and write them in ingestion format."""
    if config.seed is None:
        raise DomainError("simulation needs an explicit seed")
    if spec.domain != annual_period(config.start_year, config.end_year):
        raise DomainError("intensity spec was built for a different study period")

    series = simulate_counts(spec, config.seed)
    parameters = {f"intensity.{key}": value for key, value in spec.parameters().items()}
    header = [
        f"intensity={spec.kind.value}",
        f"rng={rng_name()}",
        *config_header(parameters),
        *config_header(config.as_dict()),
    ]
    with AtomicOutputSet(config.output_dir) as outputs:
        outputs.add(f"{config.label}.csv", render_series(series, header))
    return RunOutcome(paths=outputs.published, summary={'total': series.total, 'kind': spec.kind.value})


# =============================================================================
# BASIS DUMP AND SUMMARY
# =============================================================================

def run_basis(config: RunConfig) -> RunOutcome:
    """Write the basis on the grid and the design matrix, for debugging."""
    period = annual_period(config.start_year, config.end_year)
    basis = make_basis(period, config.interior_knot_count)
    grid = default_grid(period, config.grid_points)
    design = build_design(basis, period)
    columns = [f"B{index}" for index in range(1, basis.L + 1)]

    values = basis_matrix(basis, grid, 0)
    basis_rows = [{'t': float(t), **dict(zip(columns, map(float, row)))} for t, row in zip(grid, values)]
    edges = period.bin_edges()
    design_rows = [
        {'bin': n, 'lo': float(edges[n - 1]), 'hi': float(edges[n]), **dict(zip(columns, map(float, row)))}
        for n, row in enumerate(design.entries, start=1)
    ]
    summary = {'n_basis': basis.L, 'interior_knots': ' '.join(format(k, '.17g') for k in basis.interior_knots)}

    settings_dict = config.as_dict()
    with AtomicOutputSet(config.output_dir) as outputs:
        outputs.add(_name(config, '_basis'),
                    render_records('basis', basis_rows, settings_dict, config.emit_format, summary))
        outputs.add(_name(config, '_design'),
                    render_records('design', design_rows, settings_dict, config.emit_format, summary))
    return RunOutcome(paths=outputs.published, summary=summary)


def describe_series(series: CountSeries) -> Dict:
    """N, total, mean, sample variance and dispersion index of a series."""
    counts = series.counts.astype(float)
    mean = float(counts.mean())
    variance = float(np.var(counts, ddof=1))
    return {
        'N': series.period.N,
        'total': series.total,
        'mean': mean,
        'variance': variance,
        'dispersion_index': variance / mean if mean > 0 else None,
    }


def run_summarize(config: RunConfig) -> RunOutcome:
    """Frequency table and descriptive statistics, plus segment averages."""
    series = _load(config)
    summary = describe_series(series)
    if config.change_year is not None:
        sum_before, sum_total = series.segment_sums(config.change_bin)
        for row, side in zip(_segment_rows(config, sum_before, sum_total), ('before', 'after')):
            summary[f"average_{side}"] = row['average']

    records = [{'events': k, 'years': years} for k, years in frequency_table(series).items()]
    with AtomicOutputSet(config.output_dir) as outputs:
        outputs.add(_name(config, '_summary'),
                    render_records('summary', records, config.as_dict(), config.emit_format, summary))
    return RunOutcome(paths=outputs.published, summary=summary)
