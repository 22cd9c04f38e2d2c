"""Blueprint which registers general cli commands of the project. Domain command groups (`flask sim`,
`flask vault`) live with their packages.
"""
import sys
import unittest

import click
from flask import Blueprint
from flask import current_app

from . import logger

cli_commands = Blueprint('cli_commands', __name__, cli_group=None)


@cli_commands.cli.command('tests')
@click.option('--pattern', default='test*.py', show_default=True, help='Test modules to discover')
@click.option('--coverage', 'with_coverage', is_flag=True, help='Measure coverage of the app package')
def tests_command(pattern: str, with_coverage: bool):  # pragma: no cover
    """Run the test suites from tests/"""
    logger.info('Tests are starting')
    measurement = None
    if with_coverage:
        import coverage
        measurement = coverage.Coverage(source=['app'])
        measurement.start()

    tests = unittest.TestLoader().discover('tests', pattern=pattern)
    result = unittest.TextTestRunner(verbosity=2).run(tests)

    if measurement is not None:
        measurement.stop()
        measurement.report(show_missing=False)

    # the suites disable the configured loggers, so their state is restored from the config
    logger.disabled = not current_app.config.get('LOGGING', False)
    if result.wasSuccessful():
        logger.info('Tests were finished successfully')
        sys.exit(0)
    logger.warning(f'Tests were finished unsuccessfully: {len(result.failures)} failures, '
                   f'{len(result.errors)} errors')
    sys.exit(1)
