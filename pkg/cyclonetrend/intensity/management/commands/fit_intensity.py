"""
Django management command to fit the intensity of a yearly count series.
Usage: python manage.py fit_intensity --input depressions.csv --start-year 1891 --end-year 2015
       [--knots 9] [--grid-points 1001] [--change-year 2004] [--log-scale-band]
"""
from django.core.management.base import BaseCommand

from core.cli import (
    add_basis_arguments, add_input_arguments, add_output_arguments, add_period_arguments, execute_run,
)
from core.outputs import format_float
from core.runs import run_fit


class Command(BaseCommand):
    help = 'Fit a spline intensity to yearly counts and write lambda, lambda\' and lambda\'\' with 95% bands'

    def add_arguments(self, parser):
        add_input_arguments(parser)
        add_period_arguments(parser)
        add_basis_arguments(parser)
        add_output_arguments(parser)
        parser.add_argument(
            '--change-year', type=int,
            help='Also report fitted averages before and after this year',
        )
        parser.add_argument(
            '--log-scale-band', action='store_true',
            help='Build the lambda band on the log scale (always positive)',
        )

    def handle(self, *args, **options):
        self.stdout.write(f"Fitting {options['input']}...")
        _, outcome = execute_run(self, run_fit, options)
        summary = outcome.summary

        self.stdout.write(
            f"  L={summary['n_basis']}  log-likelihood={format_float(summary['log_likelihood'])}"
            f"  iterations={summary['iterations']}"
        )
        self.stdout.write(
            f"  fitted total {summary['fitted_total']:.6f} vs observed {summary['observed_total']}"
        )
        if 'fitted_average_before' in summary:
            self.stdout.write(
                f"  fitted averages: {summary['fitted_average_before']:.4f} before, "
                f"{summary['fitted_average_after']:.4f} after"
            )
        self.stdout.write(self.style.SUCCESS('Done.'))
