"""
CycloneTrend - Output Files
===========================

Rendering of result tables as CSV or JSON, and atomic writing of a set of
files.

Every file carries the resolved run configuration: CSV files as leading
`# key=value` comment lines, JSON documents under a "config" key. Floats are
written with 17 significant digits, so rerunning the same configuration
reproduces every file byte for byte.
"""

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from core.exceptions import DomainError

logger = logging.getLogger(__name__)


def format_float(value: float) -> str:
    return format(float(value), '.17g')


def _plain(value):
    """Cell value as text; floats at full precision."""
    if isinstance(value, bool) or value is None:
        return '' if value is None else str(value).lower()
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def config_header(config: Dict) -> List[str]:
    """`key=value` lines in sorted key order."""
    return [f"{key}={_plain(config[key])}" for key in sorted(config)]


def render_records(kind: str, records: Iterable[Dict], config: Dict, fmt: str = 'csv',
                   summary: Optional[Dict] = None) -> str:
    """
    Render a table of records.

    CSV: `# kind=...`, the config lines, `# summary.key=value` lines, then a
    header row and one row per record. JSON: an object with kind, config,
    records and summary keys (keys sorted).
    """
    records = list(records)
    summary = summary or {}

    if fmt == 'json':
        document = {'kind': kind, 'config': config, 'records': records, 'summary': summary}
        return json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + '\n'
    if fmt != 'csv':
        raise DomainError(f"unknown output format '{fmt}'")

    buffer = io.StringIO()
    buffer.write(f"# kind={kind}\n")
    for line in config_header(config):
        buffer.write(f"# {line}\n")
    for key in sorted(summary):
        buffer.write(f"# summary.{key}={_plain(summary[key])}\n")
    if records:
        columns = list(records[0])
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(columns)
        for record in records:
            writer.writerow([_plain(record[column]) for column in columns])
    return buffer.getvalue()


class AtomicOutputSet:
    """
    Stage several files and publish them together.

        with AtomicOutputSet(output_dir) as outputs:
            outputs.add('a.csv', text_a)
            outputs.add('b.csv', text_b)

    Contents go to temporary files in the target directory; only when the
    block exits cleanly are they renamed into place. On error every staged
    file is removed and nothing is published.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self._staged: List = []
        self.published: List[Path] = []

    def __enter__(self) -> 'AtomicOutputSet':
        self.directory.mkdir(parents=True, exist_ok=True)
        return self

    def add(self, name: str, content: str) -> Path:
        target = self.directory / name
        if any(staged_target == target for _, staged_target in self._staged):
            raise DomainError(f"output {name} staged twice")
        fd, temp = tempfile.mkstemp(prefix=f".{name}.", suffix='.tmp', dir=self.directory)
        self._staged.append((Path(temp), target))
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            handle.write(content)
        return target

    def _discard(self):
        for temp, _ in self._staged:
            try:
                temp.unlink()
            except FileNotFoundError:
                pass
        self._staged.clear()

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            self._discard()
            return False
        for temp, target in self._staged:
            os.replace(temp, target)
            self.published.append(target)
        logger.debug(f"Published {len(self.published)} file(s) to {self.directory}")
        self._staged.clear()
        return False
