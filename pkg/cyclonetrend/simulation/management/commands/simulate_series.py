"""
Django management command to simulate a yearly count series from a known intensity.
Usage: python manage.py simulate_series --kind constant --rate 5 --seed 7 --start-year 1891 --end-year 2015
       python manage.py simulate_series --kind step --rate-before 5.6 --rate-after 3.9 --change-year 2004 --seed 7 ...
       python manage.py simulate_series --kind ramp --start-rate 6 --end-rate 3 --seed 7 ...
       python manage.py simulate_series --kind spline --beta 1.5,1.7,... --knots 9 --seed 7 ...
"""
from django.core.management.base import BaseCommand

from core.cli import add_output_arguments, add_period_arguments, execute_run
from core.exceptions import SpecError
from core.ingestion import annual_period
from core.runconfig import RunConfig
from core.runs import run_simulate
from intensity.basis import make_basis
from simulation.simulate import IntensityKind, IntensitySpec


def build_spec(config: RunConfig, options: dict) -> IntensitySpec:
    """Intensity specification from the command options."""
    period = annual_period(config.start_year, config.end_year)
    kind = IntensityKind(options['kind'])

    if kind is IntensityKind.CONSTANT:
        return IntensitySpec.constant(period, options['rate'])
    if kind is IntensityKind.STEP:
        if config.change_year is None:
            raise SpecError("a step intensity needs --change-year")
        # The new rate starts at the end of the change year.
        return IntensitySpec.step(period, options['rate_before'], options['rate_after'],
                                  float(config.change_year + 1))
    if kind is IntensityKind.RAMP:
        return IntensitySpec.ramp(period, options['start_rate'], options['end_rate'])

    if not options.get('beta'):
        raise SpecError("a spline intensity needs --beta")
    try:
        beta = [float(value) for value in options['beta'].split(',')]
    except ValueError:
        raise SpecError(f"--beta must be comma-separated numbers, got '{options['beta']}'") from None
    return IntensitySpec.spline(make_basis(period, config.interior_knot_count), beta)


class Command(BaseCommand):
    help = 'Simulate Poisson counts from a known intensity and write them in input format'

    def add_arguments(self, parser):
        add_period_arguments(parser)
        add_output_arguments(parser)
        parser.add_argument('--kind', choices=[k.value for k in IntensityKind], required=True,
                            help='Shape of the intensity')
        parser.add_argument('--seed', type=int, required=True, help='Seed for the PCG64 generator')
        parser.add_argument('--label', default='simulated', help='Output file name (without .csv)')
        parser.add_argument('--rate', type=float, help='constant: events per year')
        parser.add_argument('--rate-before', type=float, help='step: rate up to the change year')
        parser.add_argument('--rate-after', type=float, help='step: rate after the change year')
        parser.add_argument('--change-year', type=int, help='step: last year at the first rate')
        parser.add_argument('--start-rate', type=float, help='ramp: rate at the start of the record')
        parser.add_argument('--end-rate', type=float, help='ramp: rate at the end of the record')
        parser.add_argument('--beta', help='spline: comma-separated log-scale coefficients')
        parser.add_argument('--knots', type=int, help='spline: interior knot count')

    def handle(self, *args, **options):
        def run(config):
            return run_simulate(config, build_spec(config, options))

        _, outcome = execute_run(self, run, options)
        self.stdout.write(f"  {outcome.summary['kind']} intensity, {outcome.summary['total']} events")
