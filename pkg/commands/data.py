import logging

import click

from extensions import echo_json, pass_services
from services.statistics import describe as describe_columns
from services.synthesizer import synthesize_municipalities

logger = logging.getLogger(__name__)


@click.command()
@click.option('--input', 'input_path', required=True, help='Municipality CSV file.')
@click.option('--check', is_flag=True, help='Validate only and print OK.')
@pass_services
def ingest(services, input_path, check):
    """Load and validate a municipality CSV."""
    dataset = services.ingestor.ingest_csv(input_path)
    if check:
        click.echo('OK')
        return
    echo_json({
        'rows': dataset.matrix.n,
        'columns': list(dataset.matrix.column_names),
        'fingerprint': dataset.fingerprint['sha256'],
    })


@click.command()
@click.option('--input', 'input_path', required=True, help='Municipality CSV file.')
@pass_services
def describe(services, input_path):
    """Summary statistics of every column."""
    matrix, _ = services.ingestor.ingest_csv(input_path)
    echo_json([summary.to_dict() for summary in describe_columns(matrix)])


@click.command()
@click.option('--seed', type=int, required=True)
@click.option('--n', 'n', type=int, required=True, help='Number of municipalities.')
@click.option('--k', 'planted_k', type=int, required=True, help='Number of planted profiles.')
@click.option('--noise-fraction', type=float, default=0.0, show_default=True)
@click.option('--out', 'out_path', required=True, help='CSV file to write.')
@pass_services
def synth(services, seed, n, planted_k, noise_fraction, out_path):
    """Write a synthetic municipality CSV with planted clusters."""
    records, truth = synthesize_municipalities(seed, n, planted_k, noise_fraction)
    path = services.ingestor.write_csv(records, out_path)
    echo_json({
        'out': str(path),
        'rows': len(records),
        'planted_k': planted_k,
        'seed': seed,
        'labels': truth.tolist(),
    })


COMMANDS = (ingest, describe, synth)
