import hashlib
import logging
import time
from contextlib import contextmanager

import numpy as np

from errors import MuniclusterError
from models.clustering import ClusterAssignment, DbscanConfig, KMeansConfig
from models.feature_matrix import FeatureMatrix
from models.municipality import CORRELATION_VARIABLES, IDEB_HEADERS, Dataset
from models.report import AnalysisConfig, RunReport
from models.validation import SswCurve, ValidationReport
from services import statistics, validation
from services.dbscan import dbscan
from services.hierarchical import cut_dendrogram, hierarchical
from services.kmeans import kmeans
from services.metric_space import distance_matrix, standardize

logger = logging.getLogger(__name__)


def matrix_fingerprint(matrix):
    """Fingerprint for data that never came from a file (synthetic runs)"""
    digest = hashlib.sha256()
    digest.update('\x1f'.join(matrix.row_ids).encode('utf-8'))
    digest.update('\x1f'.join(matrix.column_names).encode('utf-8'))
    digest.update(np.ascontiguousarray(matrix.values).tobytes())
    return {
        'rows': matrix.n,
        'columns': list(matrix.column_names),
        'sha256': digest.hexdigest(),
    }


@contextmanager
def _stage(name, timing):
    """Time a pipeline stage and prefix escaping errors with its name"""
    logger.info(f"Stage {name} started")
    started = time.perf_counter()
    try:
        yield
    except MuniclusterError as e:
        raise e.with_context(name) from e
    finally:
        timing[name] = time.perf_counter() - started
    logger.info(f"Stage {name} finished in {timing[name]:.3f}s")


class AnalysisRunner:
    """Runs correlate, regress, cluster and validate over one dataset"""

    def __init__(self, config):
        self.config = config

    # Variables

    def variable_series(self, matrix, name):
        """Column values by name; IDEB is the row mean of the yearly columns"""
        if name == 'IDEB' and 'IDEB' not in matrix.column_names:
            return np.mean([matrix.column(h) for h in IDEB_HEADERS], axis=0)
        return np.asarray(matrix.column(name), dtype=np.float64)

    def correlation_variables(self, matrix, target):
        names = set(matrix.column_names)
        if all(h in names for h in IDEB_HEADERS):
            names.add('IDEB')
        if all(v in names for v in CORRELATION_VARIABLES):
            return [v for v in CORRELATION_VARIABLES if v != target]
        return [c for c in matrix.column_names if c != target]

    # Stages

    def correlate(self, matrix, target='MHR'):
        """One CorrelationReport per variable against the target column"""
        y = self.variable_series(matrix, target)
        reports = []
        for variable in self.correlation_variables(matrix, target):
            try:
                reports.append(statistics.correlation_report(
                    variable, self.variable_series(matrix, variable), y))
            except MuniclusterError as e:
                raise e.with_context(f"{variable} vs {target}") from e
        logger.info(f"Correlated {len(reports)} variable(s) with {target}")
        return reports

    def reference_check(self, reports):
        """Compare the POPULATION-MHR Pearson coefficient with the published value"""
        reference = self.config.PUBLISHED_REFERENCE
        observed = next((r.pearson for r in reports if r.variable == 'POPULATION'), None)
        if observed is None:
            return {'status': 'unavailable', 'reason': 'POPULATION not among the correlated variables'}
        difference = abs(observed - reference['pearson_population_mhr'])
        return {
            'status': 'pass' if difference <= reference['tolerance'] else 'fail',
            'expected': reference['pearson_population_mhr'],
            'observed': observed,
            'difference': difference,
            'tolerance': reference['tolerance'],
        }

    def regress(self, matrix, x_name, y_name='MHR', fraction=None, iterations=None):
        """Linear and LOWESS fits of y on x, with the points sorted by x"""
        x = self.variable_series(matrix, x_name)
        y = self.variable_series(matrix, y_name)
        order = np.argsort(x, kind='mergesort')
        x_sorted, y_sorted = x[order], y[order]

        try:
            linear = statistics.linear_regression(x, y)
            smooth = statistics.lowess(x_sorted, y_sorted, fraction, iterations)
        except MuniclusterError as e:
            raise e.with_context(f"{y_name} on {x_name}") from e

        return {
            'variable': x_name,
            'target': y_name,
            'x': x_sorted.tolist(),
            'y': y_sorted.tolist(),
            'linear': linear.to_dict(),
            'lowess': smooth.to_dict(),
        }

    def prepare(self, analysis_config, matrix):
        """Column subset and standardization applied before clustering"""
        if analysis_config.columns:
            matrix = matrix.select_columns(analysis_config.columns)
        if analysis_config.standardize:
            matrix = standardize(matrix)
        return matrix

    def cluster(self, analysis_config, X, D):
        """Primary clustering run; returns (section, fitted object)"""
        section = {
            'algorithm': analysis_config.algorithm,
            'metric': analysis_config.metric,
            'columns': list(X.column_names),
            'row_ids': list(X.row_ids),
        }

        if analysis_config.algorithm == 'kmeans':
            result = kmeans(X, self._kmeans_config(analysis_config, analysis_config.k))
            section.update(result.to_dict())
            fitted = result
        elif analysis_config.algorithm == 'hierarchical':
            tree = hierarchical(D, analysis_config.linkage)
            assignment = cut_dendrogram(tree, analysis_config.k)
            section['assignment'] = assignment.to_dict()
            section['dendrogram'] = tree.to_dict()
            section['leaf_order'] = tree.leaf_order()
            fitted = tree
        else:
            db_config = DbscanConfig(eps=analysis_config.eps, min_pts=analysis_config.min_pts,
                                     metric=analysis_config.metric)
            assignment = dbscan(D, db_config)
            section['assignment'] = assignment.to_dict()
            section['noise_count'] = int(assignment.noise_indices.size)
            fitted = assignment

        return section, fitted

    def validate(self, analysis_config, X, D, fitted=None):
        """Validity series over the configured k range and the k each rule picks"""
        algorithm = analysis_config.algorithm
        if algorithm == 'kmeans':
            return self._validate_kmeans(analysis_config, X, D)
        if algorithm == 'hierarchical':
            tree = fitted if fitted is not None else hierarchical(D, analysis_config.linkage)
            return self._validate_hierarchical(analysis_config, X, D, tree)
        assignment = fitted if fitted is not None else dbscan(D, DbscanConfig(
            eps=analysis_config.eps, min_pts=analysis_config.min_pts, metric=analysis_config.metric))
        return self._validate_dbscan(X, D, assignment, analysis_config.silhouette_orientation)

    def silhouette_profile(self, D, assignment, orientation='standard'):
        """Per-point silhouette of the primary partition; noise points are left out"""
        if assignment.k < 2:
            return None
        kept, clean = assignment.without_noise()
        result = validation.silhouette(D.subset(kept), clean, orientation)
        return {
            **result.to_dict(),
            'labels': clean.labels.tolist(),
            'row_ids': [D.row_ids[i] for i in kept],
        }

    # Validation per algorithm

    def _kmeans_config(self, analysis_config, k):
        return KMeansConfig(
            k=int(k),
            metric=analysis_config.metric,
            max_iterations=int(analysis_config.max_iterations),
            restarts=int(analysis_config.restarts),
            seed=int(analysis_config.seed),
            tolerance=float(analysis_config.tolerance),
        )

    def _k_values(self, analysis_config, n):
        return list(range(int(analysis_config.k_min), min(int(analysis_config.k_max), n) + 1))

    def _validate_kmeans(self, analysis_config, X, D):
        k_values = self._k_values(analysis_config, X.n)
        assignments = {}
        ssw_values = []
        for k in k_values:
            result = kmeans(X, self._kmeans_config(analysis_config, k))
            assignments[k] = result.assignment
            ssw_values.append(validation.ssw(X, result))

        clusterer = validation.kmeans_clusterer(
            metric=analysis_config.metric,
            restarts=int(analysis_config.gap_restarts),
            max_iterations=int(analysis_config.max_iterations),
            seed=int(analysis_config.seed),
            tolerance=float(analysis_config.tolerance),
        )
        report = ValidationReport(algorithm='kmeans', k_values=k_values)
        return self._finish_sweep(report, analysis_config, X, D, assignments,
                                  SswCurve(k_values=tuple(k_values), ssw=ssw_values), clusterer)

    def _validate_hierarchical(self, analysis_config, X, D, tree):
        k_values = self._k_values(analysis_config, X.n)
        assignments = {k: cut_dendrogram(tree, k) for k in k_values}
        curve = SswCurve(
            k_values=tuple(k_values),
            ssw=[validation.ssw_for_assignment(X, assignments[k]) for k in k_values],
        )
        clusterer = validation.hierarchical_clusterer(analysis_config.metric, analysis_config.linkage)
        report = ValidationReport(algorithm='hierarchical', k_values=k_values)
        return self._finish_sweep(report, analysis_config, X, D, assignments, curve, clusterer)

    def _finish_sweep(self, report, analysis_config, X, D, assignments, curve, clusterer):
        report.ssw = curve
        report.silhouette = {
            k: validation.silhouette(D, assignment, analysis_config.silhouette_orientation).overall
            for k, assignment in assignments.items()
            if assignment.k >= 2
        }

        # W is zero once every point is its own cluster
        gap_k = [k for k in report.k_values if k < X.n]
        if len(gap_k) >= 2:
            report.gap = validation.gap_statistic(
                X, gap_k, int(analysis_config.gap_b), int(analysis_config.seed), clusterer)
        else:
            report.notes.append(f"gap statistic skipped: needs two k values below n={X.n}")

        if len(report.silhouette) >= 2:
            report.selections['silhouette'] = validation.select_k_silhouette(report.silhouette)
        else:
            report.notes.append("silhouette rule skipped: needs two k values >= 2")
        if report.gap is not None:
            report.selections['gap'] = validation.select_k_gap(report.gap)
        if len(curve.k_values) >= 3:
            report.selections['elbow'] = validation.select_k_elbow(curve)
        else:
            report.notes.append("elbow rule skipped: needs three k values")

        if not curve.is_non_increasing():
            report.notes.append("SSW curve is not monotone")
        return report

    def _validate_dbscan(self, X, D, assignment, orientation='standard'):
        if assignment.k == 0:
            logger.warning("DBSCAN labelled every point as noise; validation not applicable")
            return ValidationReport.not_applicable('dbscan', 'all points are noise')
        if assignment.k == 1 and not assignment.has_noise:
            logger.warning("DBSCAN found one cluster and no noise; validation not applicable")
            return ValidationReport.not_applicable('dbscan', 'single cluster without noise')

        report = ValidationReport(algorithm='dbscan', k_values=[assignment.k])
        if assignment.k >= 2:
            subset, clean = validation.exclude_noise(D, assignment)
            score = validation.silhouette(subset, clean, orientation).overall
            report.notes.append('noise_treatment: excluded')
        else:
            grouped = validation.noise_as_group(assignment)
            score = validation.silhouette(D, ClusterAssignment(grouped, 'dbscan'), orientation).overall
            report.notes.append('noise_treatment: as-group')

        report.silhouette = {assignment.k: score}
        report.ssw = SswCurve(k_values=(assignment.k,),
                              ssw=[validation.ssw_for_assignment(X, assignment)])
        report.notes.append('k is fixed by eps and min_pts; selection rules do not apply')
        return report

    # Whole pipeline

    def run_analysis(self, analysis_config, data):
        """
        correlate -> regress -> cluster -> validate on one dataset.

        data is a Dataset or a bare FeatureMatrix. The returned report echoes
        analysis_config, so AnalysisConfig.from_dict(report.config) re-runs it.
        """
        if isinstance(analysis_config, dict):
            analysis_config = AnalysisConfig.from_dict(analysis_config)
        if isinstance(data, FeatureMatrix):
            data = Dataset(matrix=data)
        matrix = data.matrix
        analysis_config.ensure_valid(matrix.n)

        fingerprint = data.fingerprint or matrix_fingerprint(matrix)
        timing = {}
        notes = []
        logger.info(f"Running {analysis_config.algorithm} analysis on {matrix.n}x{matrix.p} data "
                    f"(seed {analysis_config.seed})")

        with _stage('describe', timing):
            summary = [s.to_dict() for s in statistics.describe(matrix)]

        target = analysis_config.target
        correlations, regressions = [], []
        if target in matrix.column_names:
            with _stage('correlate', timing):
                correlations = self.correlate(matrix, target)
            with _stage('regress', timing):
                regressions = [
                    self.regress(matrix, report.variable, target,
                                 analysis_config.lowess_fraction, analysis_config.lowess_iterations)
                    for report in correlations
                ]
        else:
            notes.append(f"target column {target} absent; correlation and regression skipped")
            logger.warning(notes[-1])

        with _stage('cluster', timing):
            X = self.prepare(analysis_config, matrix)
            D = distance_matrix(X, analysis_config.metric)
            clustering, fitted = self.cluster(analysis_config, X, D)
            clustering['notes'] = notes

        column_distances = None
        if X.p >= 2:
            with _stage('column distances', timing):
                column_distances = distance_matrix(X, analysis_config.metric, axis='columns').to_dict()

        with _stage('validate', timing):
            report = self.validate(analysis_config, X, D, fitted)
            clustering['silhouette'] = self.silhouette_profile(
                D, ClusterAssignment.from_dict(clustering['assignment']),
                analysis_config.silhouette_orientation)

        return RunReport(
            fingerprint=fingerprint,
            config=analysis_config.to_dict(),
            summary=summary,
            correlations=[c.to_dict() for c in correlations],
            regressions=regressions,
            column_distances=column_distances,
            clustering=clustering,
            validation=report.to_dict(),
            selected_k={rule: sel.to_dict() for rule, sel in report.selections.items()},
            timing=timing,
        )
