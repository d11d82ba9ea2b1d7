#!/usr/bin/env python
"""
CycloneTrend - Command Line Front Door
======================================

Short subcommand names on top of the Django management commands.

Usage:
    python cyclone.py fit --input depressions.csv --start-year 1891 --end-year 2015
    python cyclone.py test --input depressions.csv --start-year 1891 --end-year 2015 --change-year 2004
    python cyclone.py simulate --kind constant --rate 5 --seed 7 --start-year 1891 --end-year 2015
    python cyclone.py basis --start-year 1891 --end-year 2015
    python cyclone.py summarize --input depressions.csv --start-year 1891 --end-year 2015

`test` maps to `test_changepoint`; Django's own `test` command stays
reachable through manage.py.
"""
import os
import sys

SUBCOMMANDS = {
    'fit': 'fit_intensity',
    'test': 'test_changepoint',
    'simulate': 'simulate_series',
    'basis': 'dump_basis',
    'summarize': 'summarize_counts',
}


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')

    from django.core.management import execute_from_command_line

    if len(argv) < 2 or argv[1] not in SUBCOMMANDS:
        names = ', '.join(SUBCOMMANDS)
        sys.stderr.write(f"usage: {os.path.basename(argv[0])} {{{names}}} [options]\n")
        sys.exit(2)

    execute_from_command_line([argv[0], SUBCOMMANDS[argv[1]], *argv[2:]])


if __name__ == '__main__':
    main()
