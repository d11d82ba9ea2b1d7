"""
Django management command to describe a yearly count series.
Usage: python manage.py summarize_counts --input depressions.csv --start-year 1891 --end-year 2015
       [--change-year 2004]
"""
from django.core.management.base import BaseCommand

from core.cli import add_input_arguments, add_output_arguments, add_period_arguments, execute_run
from core.runs import run_summarize


class Command(BaseCommand):
    help = 'Frequency table, mean, variance and dispersion index of a yearly count series'

    def add_arguments(self, parser):
        add_input_arguments(parser)
        add_period_arguments(parser)
        add_output_arguments(parser)
        parser.add_argument('--change-year', type=int, help='Also report averages before and after this year')

    def handle(self, *args, **options):
        _, outcome = execute_run(self, run_summarize, options)
        s = outcome.summary

        self.stdout.write(f"  N={s['N']}  total={s['total']}  mean={s['mean']:.4f}  variance={s['variance']:.4f}")
        if s['dispersion_index'] is not None:
            self.stdout.write(f"  dispersion index {s['dispersion_index']:.4f}")
        if 'average_before' in s:
            self.stdout.write(f"  averages: {s['average_before']:.4f} before, {s['average_after']:.4f} after")
