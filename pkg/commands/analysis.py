import logging

import click

from config import config
from extensions import echo_json, pass_services
from models.clustering import Linkage
from models.feature_matrix import DistanceMetric
from models.report import AnalysisConfig

logger = logging.getLogger(__name__)

ALGORITHM_CHOICES = ('kmeans', 'hier', 'hierarchical', 'dbscan', 'density')
METRIC_CHOICES = tuple(m.value for m in DistanceMetric)
LINKAGE_CHOICES = tuple(option.value for option in Linkage)


def _columns(value):
    if not value:
        return None
    return [name.strip() for name in value.split(',') if name.strip()]


def _finish(report, out_path, payload):
    """Save the full report when asked, then print the payload"""
    if out_path:
        report.save(out_path)
        logger.info(f"Run report saved to {out_path}")
        payload = {**payload, 'out': str(out_path)}
    echo_json(payload)


@click.command()
@click.option('--input', 'input_path', required=True, help='Municipality CSV file.')
@click.option('--target', default='MHR', show_default=True)
@click.option('--paper-data', is_flag=True,
              help='Compare POPULATION vs target Pearson with the published value.')
@pass_services
def correlate(services, input_path, target, paper_data):
    """Pearson, Spearman and Kendall of every variable against the target."""
    matrix, _ = services.ingestor.ingest_csv(input_path)
    reports = services.runner.correlate(matrix, target)
    payload = {
        'target': target,
        'correlations': [r.to_dict() for r in reports],
    }
    if paper_data:
        payload['reference_check'] = services.runner.reference_check(reports)
    echo_json(payload)


@click.command()
@click.option('--input', 'input_path', required=True, help='Municipality CSV file.')
@click.option('--x', 'x_name', required=True, help='Explanatory column (IDEB for the yearly mean).')
@click.option('--y', 'y_name', default='MHR', show_default=True)
@click.option('--lowess-frac', type=float, default=config.LOWESS_DEFAULTS['fraction'], show_default=True)
@click.option('--lowess-iterations', type=int, default=config.LOWESS_DEFAULTS['iterations'],
              show_default=True)
@pass_services
def regress(services, input_path, x_name, y_name, lowess_frac, lowess_iterations):
    """Least-squares line and LOWESS curve of y on x."""
    matrix, _ = services.ingestor.ingest_csv(input_path)
    echo_json(services.runner.regress(matrix, x_name, y_name, lowess_frac, lowess_iterations))


@click.command()
@click.option('--input', 'input_path', required=True, help='Municipality CSV file.')
@click.option('--algo', 'algorithm', type=click.Choice(ALGORITHM_CHOICES), default='kmeans',
              show_default=True)
@click.option('--k', type=int, default=None, help='Clusters (kmeans 4, hier 3 when omitted).')
@click.option('--metric', type=click.Choice(METRIC_CHOICES), default='euclidean', show_default=True)
@click.option('--linkage', type=click.Choice(LINKAGE_CHOICES),
              default=config.HIERARCHICAL_DEFAULTS['linkage'], show_default=True)
@click.option('--eps', type=float, default=config.DBSCAN_DEFAULTS['eps'], show_default=True)
@click.option('--min-pts', type=int, default=config.DBSCAN_DEFAULTS['min_pts'], show_default=True)
@click.option('--restarts', type=int, default=config.KMEANS_DEFAULTS['restarts'], show_default=True)
@click.option('--no-standardize', is_flag=True, help='Cluster the raw values.')
@click.option('--columns', default=None, help='Comma-separated subset of columns to cluster.')
@click.option('--seed', type=int, required=True)
@click.option('--out', 'out_path', default=None, help='Write the run report JSON here.')
@pass_services
def cluster(services, input_path, algorithm, k, metric, linkage, eps, min_pts, restarts,
            no_standardize, columns, seed, out_path):
    """Run the full analysis with one clustering algorithm."""
    analysis_config = AnalysisConfig(
        algorithm=algorithm,
        metric=metric,
        linkage=linkage,
        eps=eps,
        min_pts=min_pts,
        restarts=restarts,
        standardize=not no_standardize,
        columns=_columns(columns),
        seed=seed,
    )
    if k is not None:
        analysis_config.k = k
    elif analysis_config.algorithm == 'hierarchical':
        analysis_config.k = config.HIERARCHICAL_DEFAULTS['k']

    dataset = services.ingestor.ingest_csv(input_path)
    report = services.runner.run_analysis(analysis_config, dataset)
    _finish(report, out_path, report.to_dict())


@click.command()
@click.option('--input', 'input_path', required=True, help='Municipality CSV file.')
@click.option('--algo', 'algorithm', type=click.Choice(('kmeans', 'hier', 'hierarchical')),
              default='kmeans', show_default=True)
@click.option('--k-min', type=int, default=config.VALIDATION_DEFAULTS['k_min'], show_default=True)
@click.option('--k-max', type=int, default=config.VALIDATION_DEFAULTS['k_max'], show_default=True)
@click.option('--gap-b', type=int, default=config.VALIDATION_DEFAULTS['gap_b'], show_default=True)
@click.option('--metric', type=click.Choice(METRIC_CHOICES), default='euclidean', show_default=True)
@click.option('--linkage', type=click.Choice(LINKAGE_CHOICES),
              default=config.HIERARCHICAL_DEFAULTS['linkage'], show_default=True)
@click.option('--no-standardize', is_flag=True)
@click.option('--seed', type=int, required=True)
@click.option('--out', 'out_path', default=None, help='Write the run report JSON here.')
@pass_services
def validate(services, input_path, algorithm, k_min, k_max, gap_b, metric, linkage,
             no_standardize, seed, out_path):
    """Silhouette, GAP and SSW over a k range, and the k each rule selects."""
    analysis_config = AnalysisConfig(
        algorithm=algorithm,
        metric=metric,
        linkage=linkage,
        standardize=not no_standardize,
        k_min=k_min,
        k_max=k_max,
        gap_b=gap_b,
        seed=seed,
    )
    if analysis_config.algorithm == 'hierarchical':
        analysis_config.k = config.HIERARCHICAL_DEFAULTS['k']

    dataset = services.ingestor.ingest_csv(input_path)
    analysis_config.k = min(analysis_config.k, dataset.matrix.n)
    report = services.runner.run_analysis(analysis_config, dataset)
    _finish(report, out_path, {
        'config': report.config,
        'validation': report.validation,
        'selected_k': report.selected_k,
    })


COMMANDS = (correlate, regress, cluster, validate)
