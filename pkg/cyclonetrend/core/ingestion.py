"""
CycloneTrend - Count Series Ingestion
=====================================

Reads and writes yearly count files:

    # optional comment lines
    year,count
    1891,7
    1892,4
    ...

UTF-8, LF or CRLF line endings. Years must cover the requested range exactly
once and in order; every problem is reported with its line number.
"""

import csv
import io
import logging
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, Optional, TextIO, Union

from core.exceptions import IngestionError
from intensity.basis import StudyPeriod
from intensity.model import CountSeries

logger = logging.getLogger(__name__)

HEADER = ('year', 'count')


def annual_period(start_year: int, end_year: int) -> StudyPeriod:
    """(start_year, end_year + 1] with one bin per year."""
    return StudyPeriod(a=start_year, b=end_year + 1, N=end_year - start_year + 1)


def _parse_int(text: str, what: str, line: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise IngestionError(f"{what} '{text.strip()}' is not an integer", line=line) from None


def _data_lines(handle: TextIO) -> Iterable:
    """(line number, raw line) for every non-blank, non-comment line."""
    for number, raw in enumerate(handle, start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith('#'):
            yield number, raw


def read_series(handle: TextIO, start_year: int, end_year: int, label: str = '') -> CountSeries:
    """Parse an open `year,count` stream into a validated CountSeries."""
    if start_year >= end_year:
        raise IngestionError(f"start year {start_year} must precede end year {end_year}")

    lines = list(_data_lines(handle))
    if not lines:
        raise IngestionError("file is empty; expected a `year,count` header")

    header_line, header_raw = lines[0]
    header = tuple(field.strip().lower() for field in next(csv.reader([header_raw])))
    if header != HEADER:
        raise IngestionError(f"header must be `year,count`, got `{header_raw.strip()}`", line=header_line)

    counts = []
    expected = start_year
    last_line = header_line
    for number, row in zip((n for n, _ in lines[1:]), csv.reader(raw for _, raw in lines[1:])):
        last_line = number
        if len(row) != 2:
            raise IngestionError(f"expected 2 fields, found {len(row)}", line=number)
        year = _parse_int(row[0], 'year', number)
        count = _parse_int(row[1], 'count', number)

        if year < start_year or year > end_year:
            raise IngestionError(f"year {year} outside {start_year}-{end_year}", line=number)
        if year < expected:
            raise IngestionError(f"duplicate or out-of-order year {year}", line=number)
        if year > expected:
            raise IngestionError(f"year {expected} missing (next row is {year})", line=number)
        if count < 0:
            raise IngestionError(f"count {count} for {year} is negative", line=number)

        counts.append(count)
        expected += 1

    if expected <= end_year:
        raise IngestionError(f"year {expected} missing (file ends early)", line=last_line)

    series = CountSeries(annual_period(start_year, end_year), counts, label=label)
    logger.info(f"Ingested '{label}': {series.period.N} years, {series.total} events")
    return series


def ingest(path: Union[str, Path], start_year: int, end_year: int,
           label: Optional[str] = None) -> CountSeries:
    """Read a `year,count` file covering start_year..end_year inclusive."""
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"input file {path} does not exist")
    # utf-8-sig tolerates a byte-order mark from spreadsheet exports.
    with path.open('r', encoding='utf-8-sig', newline='') as handle:
        return read_series(handle, start_year, end_year, label=label or path.stem)


def render_series(series: CountSeries, header_lines: Iterable[str] = ()) -> str:
    """Series in ingestion format; header lines are written as `#` comments."""
    start_year = int(series.period.a)
    buffer = io.StringIO()
    for text in header_lines:
        buffer.write(f"# {text}\n")
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(HEADER)
    for offset, count in enumerate(series.counts.tolist()):
        writer.writerow((start_year + offset, count))
    return buffer.getvalue()


def frequency_table(series: CountSeries) -> Dict[int, int]:
    """Number of years with k events, for every observed k, in increasing k."""
    return dict(sorted(Counter(series.counts.tolist()).items()))
