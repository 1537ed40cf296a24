import json
import logging

import click

from config import config
from errors import MuniclusterError
from extensions import Services
from services.analysis_runner import AnalysisRunner
from services.csv_ingestor import CsvIngestor
from services.report_writer import ReportWriter

# Configure logging (stderr; stdout carries command output)
logging.basicConfig(
    level=getattr(logging, str(config.LOG_LEVEL).upper(), logging.INFO),
    format=config.LOG_FORMAT
)
logger = logging.getLogger(__name__)

# Initialize services
services = Services(
    config=config,
    ingestor=CsvIngestor(config),
    runner=AnalysisRunner(config),
    writer=ReportWriter(config),
)


def _fail(ctx, title, message, exit_code):
    click.echo(json.dumps({'error': title, 'message': message}), err=True)
    ctx.exit(exit_code)


class MuniclusterGroup(click.Group):
    """Command group that turns escaped errors into an error document and an exit code"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except MuniclusterError as e:
            logger.debug(f"{type(e).__name__}: {e}")
            _fail(ctx, e.title, str(e), e.exit_code)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except Exception as e:
            logger.exception(f"Unexpected error: {e}")
            message = str(e) if config.DEBUG else 'An unexpected error occurred.'
            _fail(ctx, 'Internal error', message, config.EXIT_CODES['unexpected'])


@click.group(cls=MuniclusterGroup)
@click.option('--verbose', is_flag=True, help='Log at DEBUG level.')
@click.pass_context
def cli(ctx, verbose):
    """Clustering and correlation analysis of municipal indicators."""
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    ctx.obj = services


# Import and register commands
from commands import analysis, data, report  # noqa: E402

for command in data.COMMANDS + analysis.COMMANDS + report.COMMANDS:
    cli.add_command(command)


if __name__ == '__main__':
    cli(prog_name='municluster')
