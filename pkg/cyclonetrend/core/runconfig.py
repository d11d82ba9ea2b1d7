"""
CycloneTrend - Run Configuration
================================

The resolved configuration of one command-line run. Command options take
precedence; anything not given falls back to the Django settings. The full
configuration is embedded in every output file.
"""

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Optional

from core.exceptions import DomainError

EMIT_FORMATS = ('csv', 'json')
TEST_VARIANTS = ('strict', 'inclusive')


@dataclass(frozen=True)
class RunConfig:
    input_path: Optional[Path]
    start_year: int
    end_year: int
    interior_knot_count: int = 9
    grid_points: int = 1001
    change_year: Optional[int] = None
    test_variant: str = 'strict'
    output_dir: Path = Path('output')
    seed: Optional[int] = None
    emit_format: str = 'csv'
    label: str = 'series'
    log_scale_band: bool = False

    def __post_init__(self):
        if self.start_year >= self.end_year:
            raise DomainError(f"start year {self.start_year} must precede end year {self.end_year}")
        if self.change_year is not None and not self.start_year < self.change_year < self.end_year:
            raise DomainError(
                f"change year {self.change_year} must lie strictly between "
                f"{self.start_year} and {self.end_year}"
            )
        if self.interior_knot_count < 0:
            raise DomainError(f"interior knot count must be nonnegative, got {self.interior_knot_count}")
        if self.grid_points < 2:
            raise DomainError(f"grid needs at least 2 points, got {self.grid_points}")
        if self.test_variant not in TEST_VARIANTS:
            raise DomainError(f"test variant must be one of {TEST_VARIANTS}, got '{self.test_variant}'")
        if self.emit_format not in EMIT_FORMATS:
            raise DomainError(f"emit format must be one of {EMIT_FORMATS}, got '{self.emit_format}'")
        if self.input_path is not None:
            object.__setattr__(self, 'input_path', Path(self.input_path))
        object.__setattr__(self, 'output_dir', Path(self.output_dir))

    @property
    def n_years(self) -> int:
        return self.end_year - self.start_year + 1

    @property
    def change_bin(self) -> Optional[int]:
        """K: the number of bins up to and including the change year."""
        if self.change_year is None:
            return None
        return self.change_year - self.start_year + 1

    def as_dict(self) -> Dict:
        """Plain values only, so the mapping serialises identically every run."""
        values = asdict(self)
        values['input_path'] = str(self.input_path) if self.input_path is not None else None
        values['output_dir'] = str(self.output_dir)
        return values

    @classmethod
    def from_options(cls, options: Dict) -> 'RunConfig':
        """Build from management command options, filling gaps from settings."""
        from django.conf import settings

        def pick(name, setting, default):
            value = options.get(name)
            return value if value is not None else getattr(settings, setting, default)

        input_path = options.get('input')
        label = options.get('label') or (Path(input_path).stem if input_path else 'series')
        return cls(
            input_path=Path(input_path) if input_path else None,
            start_year=options['start_year'],
            end_year=options['end_year'],
            interior_knot_count=pick('knots', 'INTENSITY_INTERIOR_KNOTS', 9),
            grid_points=pick('grid_points', 'INTENSITY_GRID_POINTS', 1001),
            change_year=options.get('change_year'),
            test_variant=pick('variant', 'CHANGEPOINT_TEST_VARIANT', 'strict'),
            output_dir=Path(pick('output_dir', 'OUTPUT_DIR', 'output')),
            seed=options.get('seed'),
            emit_format=pick('format', 'EMIT_FORMAT', 'csv'),
            label=label,
            log_scale_band=bool(options.get('log_scale_band', False)),
        )
