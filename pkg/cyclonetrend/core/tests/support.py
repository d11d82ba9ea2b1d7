"""Shared helpers for the CycloneTrend test suites."""

import json
import os
from pathlib import Path

import numpy as np
from django.conf import settings

from core.ingestion import annual_period
from intensity.model import CountSeries

AGGREGATES_PATH = Path(settings.BASE_DIR) / 'data' / 'bob_cyclone_aggregates.json'


def load_aggregates() -> dict:
    with AGGREGATES_PATH.open(encoding='utf-8') as handle:
        return json.load(handle)


def write_counts(directory, name, start_year, counts, newline='\n') -> Path:
    """Write a `year,count` file and return its path."""
    path = Path(directory) / name
    lines = ['year,count'] + [f"{start_year + i},{c}" for i, c in enumerate(counts)]
    path.write_bytes((newline.join(lines) + newline).encode('utf-8'))
    return path


def smooth_series(start_year=1891, end_year=2015, seed=2024) -> CountSeries:
    """Poisson counts around a rate that rises, peaks mid-record and falls."""
    period = annual_period(start_year, end_year)
    mid = period.a + np.arange(period.N) + 0.5
    x = (mid - period.a) / period.length
    rate = 5.0 + 1.5 * np.sin(np.pi * x) - 1.0 * x
    counts = np.random.default_rng(seed).poisson(rate)
    return CountSeries(period, counts, label='smooth')


def bob_series_path(name: str):
    """Path of a user-exported IMD series, or None when not configured."""
    directory = getattr(settings, 'BOB_SERIES_DIR', '') or os.environ.get('BOB_SERIES_DIR', '')
    if not directory:
        return None
    path = Path(directory) / name
    return path if path.is_file() else None
