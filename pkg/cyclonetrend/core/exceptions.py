"""
CycloneTrend - Exceptions
=========================

One hierarchy for every failure the toolkit reports. Each class carries a
`hint` with the remediation shown by the command line.
"""

from typing import Optional

import numpy as np


class CycloneTrendError(Exception):
    """Base class for all CycloneTrend errors."""

    hint = ''

    def __init__(self, message: str, hint: Optional[str] = None):
        super().__init__(message)
        if hint is not None:
            self.hint = hint

    def render(self) -> str:
        """Message plus remediation hint, as printed by the commands."""
        message = str(self)
        return f"{message} (hint: {self.hint})" if self.hint else message


class DomainError(CycloneTrendError, ValueError):
    """An argument lies outside the domain of the operation."""

    hint = 'check the time window, bin index or probability passed in'


class IdentifiabilityError(CycloneTrendError):
    """More basis functions than bins: coefficients cannot be identified."""

    hint = 'use fewer interior knots'

    def __init__(self, n_basis: int, n_bins: int):
        super().__init__(
            f"{n_basis} basis functions cannot be identified from {n_bins} bins"
        )
        self.n_basis = n_basis
        self.n_bins = n_bins


class NumericError(CycloneTrendError):
    """A linear predictor left the range where exp() is representable."""

    hint = 'the coefficients diverged; check the data for extreme counts'

    def __init__(self, message: str, bin_index: Optional[int] = None):
        super().__init__(message)
        self.bin_index = bin_index


class RankDeficiencyError(CycloneTrendError):
    """The Fisher information matrix is singular at the current iterate."""

    hint = 'use fewer interior knots so every basis function sees enough data'


class ConvergenceError(CycloneTrendError):
    """Fisher scoring did not converge within the iteration budget."""

    hint = 'raise FIT_MAX_ITERATIONS or loosen FIT_TOLERANCE'

    def __init__(self, message: str, beta: np.ndarray, iterations: int):
        super().__init__(message)
        self.beta = np.asarray(beta, dtype=float).copy()
        self.iterations = iterations


class DegenerateDataError(CycloneTrendError):
    """The data carry no information for the requested computation."""

    hint = 'a series with no events cannot be fitted or tested'


class IngestionError(CycloneTrendError):
    """An input file violates the `year,count` format."""

    hint = 'the file needs a `year,count` header and one row per year'

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SpecError(CycloneTrendError):
    """An intensity specification for simulation is invalid."""

    hint = 'rates must be positive and change times inside the study period'


class OracleUnreliableError(CycloneTrendError):
    """Too many bootstrap replicates failed to refit."""

    hint = 'use a better conditioned model (fewer knots or more data)'
