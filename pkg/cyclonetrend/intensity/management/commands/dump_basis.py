"""
Django management command to dump the spline basis and design matrix.
Usage: python manage.py dump_basis --start-year 1891 --end-year 2015 [--knots 9] [--format json]
"""
from django.core.management.base import BaseCommand

from core.cli import add_basis_arguments, add_output_arguments, add_period_arguments, execute_run
from core.runs import run_basis


class Command(BaseCommand):
    help = 'Write basis values on the grid and the integrated design matrix, for debugging'

    def add_arguments(self, parser):
        add_period_arguments(parser)
        add_basis_arguments(parser)
        add_output_arguments(parser)
        parser.add_argument('--label', default='basis', help='Prefix for output files')

    def handle(self, *args, **options):
        _, outcome = execute_run(self, run_basis, options)
        self.stdout.write(f"  {outcome.summary['n_basis']} basis functions")
