"""
CycloneTrend - Shared Command Options
=====================================

Argument groups and error handling shared by the management commands.
Flags mirror the RunConfig fields.
"""

import logging
from typing import Callable

from django.core.management.base import CommandError

from core.exceptions import CycloneTrendError
from core.runconfig import EMIT_FORMATS, TEST_VARIANTS, RunConfig

logger = logging.getLogger(__name__)


def add_period_arguments(parser):
    parser.add_argument('--start-year', type=int, required=True, help='First year of the record')
    parser.add_argument('--end-year', type=int, required=True, help='Last year of the record')


def add_input_arguments(parser):
    parser.add_argument('--input', required=True, help='Path to a `year,count` CSV file')
    parser.add_argument('--label', help='Name used for output files (default: input file stem)')


def add_output_arguments(parser):
    parser.add_argument('--output-dir', help='Directory for output files (default: OUTPUT_DIR)')
    parser.add_argument('--format', choices=EMIT_FORMATS, help='Output format (default: EMIT_FORMAT)')


def add_basis_arguments(parser):
    parser.add_argument('--knots', type=int, help='Interior knot count (default: INTENSITY_INTERIOR_KNOTS)')
    parser.add_argument('--grid-points', type=int, help='Evaluation grid size (default: INTENSITY_GRID_POINTS)')


def add_change_arguments(parser, required: bool = False):
    parser.add_argument('--change-year', type=int, required=required,
                        help='Last year before the suspected change')
    parser.add_argument('--variant', choices=TEST_VARIANTS,
                        help='Tail of the exact test (default: CHANGEPOINT_TEST_VARIANT)')


def execute_run(command, run: Callable, options: dict, *args):
    """
    Resolve the config, call `run(config, *args)` and report the outcome.

    Library errors become CommandError (nonzero exit) with their hint.
    """
    try:
        config = RunConfig.from_options(options)
        outcome = run(config, *args)
    except CycloneTrendError as exc:
        logger.error(exc.render())
        raise CommandError(exc.render()) from exc

    for path in outcome.paths:
        command.stdout.write(command.style.SUCCESS(f"  wrote {path}"))
    return config, outcome
