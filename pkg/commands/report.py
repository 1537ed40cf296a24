import click

from models.report import RunReport
from extensions import pass_services
from services.report_writer import FORMATS


@click.command()
@click.option('--run', 'run_path', required=True, help='Run report JSON written by cluster/validate.')
@click.option('--format', 'fmt', type=click.Choice(FORMATS), required=True)
@click.option('--out', 'out_dir', required=True, help='Output directory.')
@pass_services
def report(services, run_path, fmt, out_dir):
    """Render a saved run report; prints the written files."""
    run = RunReport.load(run_path)
    for path in services.writer.emit_report(run, fmt, out_dir):
        click.echo(str(path))


COMMANDS = (report,)
