"""
Internal validity indices (silhouette, GAP statistic, SSW) and the three
rules that turn their per-k series into a chosen number of clusters.
"""
import logging
from dataclasses import replace

import numpy as np

from errors import InputValidationError, NumericError
from models.clustering import KMeansConfig, NOISE
from models.feature_matrix import DistanceMetric
from models.validation import GapResult, KSelection, SilhouetteResult, SswCurve
from services.hierarchical import cut_dendrogram, hierarchical
from services.kmeans import kmeans, kmeans_objective
from services.metric_space import distance_matrix

logger = logging.getLogger(__name__)


def _check_labels(assignment, n):
    if assignment.n != n:
        raise InputValidationError(f"{assignment.n} labels for {n} points")
    if assignment.has_noise:
        raise InputValidationError("NOISE points must be excluded before validation")


def silhouette(D, assignment, orientation='standard'):
    """
    Per-point silhouette widths and their two-level mean.

    a(i) is the mean distance to the other members of i's cluster, b(i) the
    smallest mean distance to the members of another cluster. Points in
    singleton clusters score 0. The cluster score is the mean over its members
    and the overall score the mean of the cluster scores.

    orientation='literal' scores (a - b)/max(a, b) instead of (b - a)/max(a, b).
    """
    if orientation not in ('standard', 'literal'):
        raise InputValidationError(f"orientation must be 'standard' or 'literal', got {orientation}")
    _check_labels(assignment, D.n)
    k = assignment.k
    if k < 2:
        raise NumericError(f"silhouette needs at least 2 clusters, got {k}")

    labels = assignment.labels
    sizes = np.bincount(labels, minlength=k).astype(np.float64)
    totals = np.zeros((D.n, k), dtype=np.float64)
    for cluster in range(k):
        totals[:, cluster] = D.values[:, labels == cluster].sum(axis=1)

    idx = np.arange(D.n)
    own_size = sizes[labels]
    singleton = own_size == 1
    a = np.where(singleton, 0.0, totals[idx, labels] / np.maximum(own_size - 1, 1))

    means = totals / sizes
    means[idx, labels] = np.inf
    b = means.min(axis=1)

    denominator = np.maximum(a, b)
    numerator = b - a if orientation == 'standard' else a - b
    safe = ~singleton & (denominator > 0)
    per_point = np.zeros(D.n, dtype=np.float64)
    per_point[safe] = numerator[safe] / denominator[safe]

    per_cluster = np.array([per_point[labels == c].mean() for c in range(k)])
    overall = float(per_cluster.mean())

    return SilhouetteResult(
        per_point=per_point,
        per_cluster=per_cluster,
        overall=overall,
        a=a,
        b=b,
        orientation=orientation,
    )


def pooled_within_dispersion(D, assignment):
    """W = sum over clusters r of (1 / 2 n_r) * sum over i, j in r of d(i, j)^2"""
    _check_labels(assignment, D.n)
    squared = D.values * D.values
    total = 0.0
    for cluster in range(assignment.k):
        members = assignment.members(cluster)
        if members.size == 0:
            raise NumericError(f"cluster {cluster} is empty")
        total += float(squared[np.ix_(members, members)].sum()) / (2.0 * members.size)
    return total


def within_dispersion(points, labels):
    """Pairwise-form W computed straight from coordinates (squared Euclidean)"""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    total = 0.0
    for cluster in np.unique(labels):
        members = points[labels == cluster]
        diff = members[:, None, :] - members[None, :, :]
        total += float(np.sum(diff * diff)) / (2.0 * members.shape[0])
    return total


def uniform_reference(X, rng):
    """Uniform draws over each column's observed [min, max]"""
    low = X.values.min(axis=0)
    high = X.values.max(axis=0)
    return rng.uniform(low, high, size=X.values.shape)


def kmeans_clusterer(metric=DistanceMetric.EUCLIDEAN, restarts=10, max_iterations=100,
                     seed=0, tolerance=1e-8):
    """Clusterer callable (X, k) -> ClusterAssignment backed by kmeans"""
    template = KMeansConfig(k=1, metric=metric, restarts=restarts,
                            max_iterations=max_iterations, seed=seed, tolerance=tolerance)

    def cluster(X, k):
        return kmeans(X, replace(template, k=int(k))).assignment

    cluster.description = {'algorithm': 'kmeans', **template.to_dict()}
    del cluster.description['k']
    return cluster


def hierarchical_clusterer(metric=DistanceMetric.EUCLIDEAN, linkage='single'):
    """Clusterer callable (X, k) -> ClusterAssignment cutting one cached dendrogram per dataset"""
    cached = {}

    def cluster(X, k):
        if cached.get('data') is not X:
            cached['data'] = X
            cached['tree'] = hierarchical(distance_matrix(X, metric), linkage)
        return cut_dendrogram(cached['tree'], k)

    cluster.description = {
        'algorithm': 'hierarchical',
        'metric': DistanceMetric.parse(metric).value,
        'linkage': str(getattr(linkage, 'value', linkage)),
    }
    return cluster


def _log_dispersion(values, labels, k):
    w = within_dispersion(values, labels)
    if w <= 0:
        raise NumericError(f"within-cluster dispersion is zero at k={k}; log undefined")
    return float(np.log(w))


def gap_statistic(X, k_values, b_copies, seed, clusterer, reference_sampler=uniform_reference):
    """
    GAP(k) = mean over B reference datasets of log W_ref(k) - log W_obs(k).

    Reference copy b is drawn with a generator seeded by (seed, b). The spread
    term is s(k) = sd_b(log W_ref(k)) * sqrt(1 + 1/B), with sd over B (so 0 at B=1).
    """
    k_values = [int(k) for k in k_values]
    if not k_values:
        raise InputValidationError("k_values must not be empty")
    if int(b_copies) < 1:
        raise InputValidationError(f"B must be >= 1, got {b_copies}")
    for k in k_values:
        if not 1 <= k <= X.n:
            raise InputValidationError(f"k={k} outside [1, {X.n}]")

    ranges = X.values.max(axis=0) - X.values.min(axis=0)
    for name, width in zip(X.column_names, ranges):
        if width == 0:
            raise NumericError(f"degenerate column range: {name}")

    observed = np.array([
        _log_dispersion(X.values, clusterer(X, k).labels, k) for k in k_values
    ])

    reference = np.empty((int(b_copies), len(k_values)), dtype=np.float64)
    for copy in range(int(b_copies)):
        rng = np.random.default_rng([int(seed), copy])
        reference_X = X.with_values(reference_sampler(X, rng))
        for j, k in enumerate(k_values):
            labels = clusterer(reference_X, k).labels
            reference[copy, j] = _log_dispersion(reference_X.values, labels, k)
        logger.debug(f"GAP reference copy {copy}: log W = {np.round(reference[copy], 6).tolist()}")

    reference_mean = reference.mean(axis=0)
    spread = reference.std(axis=0) * np.sqrt(1.0 + 1.0 / int(b_copies))
    gap = reference_mean - observed

    logger.info(f"GAP statistic over k={k_values} with B={b_copies}: "
                f"{np.round(gap, 4).tolist()}")

    return GapResult(
        k_values=tuple(k_values),
        gap=gap,
        s=spread,
        log_w_observed=observed,
        log_w_reference=reference_mean,
        b_copies=int(b_copies),
        seed=int(seed),
    )


def ssw(X, result):
    """Sum of squared Euclidean distances from each point to its K-means centroid"""
    return kmeans_objective(X, result.assignment, result.centroids)


def ssw_for_assignment(X, assignment):
    """SSW of any partition, using member means as centroids; NOISE points are left out"""
    if assignment.n != X.n:
        raise InputValidationError(f"{assignment.n} labels for {X.n} rows")
    total = 0.0
    for cluster in range(assignment.k):
        members = X.values[assignment.labels == cluster]
        diff = members - members.mean(axis=0)
        total += float(np.sum(diff * diff))
    return total


def ssw_curve(X, k_values, config):
    """Best-of-restarts K-means SSW for each k, using config for everything but k"""
    k_values = [int(k) for k in k_values]
    values = [ssw(X, kmeans(X, replace(config, k=k))) for k in k_values]
    curve = SswCurve(k_values=tuple(k_values), ssw=values)

    if not curve.is_non_increasing():
        if config.restarts == 1:
            logger.warning("SSW curve is not monotone; single-restart sweep, increase restarts")
        else:
            logger.warning(f"SSW curve is not monotone with {config.restarts} restarts")
    return curve


def _check_consecutive(k_values, minimum, rule):
    if len(k_values) < minimum:
        raise InputValidationError(f"{rule} rule needs at least {minimum} k values, got {len(k_values)}")
    for previous, current in zip(k_values, k_values[1:]):
        if current != previous + 1:
            raise InputValidationError(f"{rule} rule needs consecutive k values, got {list(k_values)}")


def select_k_silhouette(overall_sil_by_k):
    """The k whose overall silhouette drops most to its successor; ties go to the smaller k"""
    k_values = sorted(int(k) for k in overall_sil_by_k)
    _check_consecutive(k_values, 2, 'silhouette')
    values = {int(k): float(v) for k, v in overall_sil_by_k.items()}

    best_k, best_drop = None, None
    for k in k_values[:-1]:
        drop = values[k] - values[k + 1]
        if best_drop is None or drop > best_drop:
            best_k, best_drop = k, drop

    logger.info(f"silhouette rule selects k={best_k} (drop {best_drop:.4g})")
    return KSelection(rule='silhouette', k=best_k)


def select_k_gap(gap):
    """Smallest k with GAP(k) > GAP(k+1) - s(k+1); the largest k, flagged, when none qualifies"""
    k_values = list(gap.k_values)
    _check_consecutive(k_values, 2, 'gap')

    for j in range(len(k_values) - 1):
        if gap.gap[j] > gap.gap[j + 1] - gap.s[j + 1]:
            logger.info(f"GAP rule selects k={k_values[j]}")
            return KSelection(rule='gap', k=k_values[j])

    logger.warning(f"GAP rule satisfied for no k; falling back to k={k_values[-1]}")
    return KSelection(rule='gap', k=k_values[-1], fallback=True)


def select_k_elbow(curve):
    """
    Knee of an SSW curve: the interior point farthest from the chord joining
    the first and last points. Distances within 1e-9 (relative) of the
    maximum count as ties and go to the smallest k.
    """
    k_values = list(curve.k_values)
    _check_consecutive(k_values, 3, 'elbow')

    x = np.asarray(k_values, dtype=np.float64)
    y = np.asarray(curve.ssw, dtype=np.float64)
    dx, dy = x[-1] - x[0], y[-1] - y[0]
    chord = np.hypot(dx, dy)
    distances = np.abs(dx * (y - y[0]) - dy * (x - x[0])) / chord

    interior = distances[1:-1]
    tolerance = 1e-9 * max(1.0, chord)
    best = interior.max()
    position = int(np.flatnonzero(interior >= best - tolerance)[0]) + 1

    logger.info(f"elbow rule selects k={k_values[position]}")
    return KSelection(rule='elbow', k=k_values[position])


def silhouette_series(D, assignments):
    """Overall silhouette per k for a {k: assignment} mapping, skipping k < 2"""
    return {
        k: silhouette(D, assignment).overall
        for k, assignment in sorted(assignments.items())
        if assignment.k >= 2
    }


def exclude_noise(D, assignment):
    """(distance matrix, assignment) restricted to non-noise points"""
    kept, clean = assignment.without_noise()
    return D.subset(kept), clean


def noise_as_group(assignment):
    """Labels with the NOISE set turned into one extra cluster"""
    labels = assignment.labels.copy()
    labels[labels == NOISE] = assignment.k
    return labels
