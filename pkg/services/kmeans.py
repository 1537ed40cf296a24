import logging

import numpy as np

from errors import InputValidationError
from models.clustering import ClusterAssignment, KMeansResult, NOISE
from models.feature_matrix import DistanceMetric
from services.metric_space import pairwise_to_centers

logger = logging.getLogger(__name__)


def _squared_error(points, labels, centroids):
    diff = points - centroids[labels]
    return float(np.sum(diff * diff))


def _repair_empty_clusters(points, labels, centroids, metric):
    """
    Give every empty cluster a member so exactly k groups survive.

    The point farthest from its own centroid (in a cluster that keeps at least
    one member) moves into the empty cluster, which is reseeded on it.
    """
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return 0

    moved = np.zeros(labels.size, dtype=bool)
    for cluster in empty:
        own = pairwise_to_centers(points, centroids, metric)[np.arange(labels.size), labels]
        eligible = (counts[labels] >= 2) & ~moved
        candidates = np.flatnonzero(eligible)
        farthest = candidates[np.argmax(own[candidates])]

        counts[labels[farthest]] -= 1
        labels[farthest] = cluster
        counts[cluster] = 1
        centroids[cluster] = points[farthest]
        moved[farthest] = True

    logger.debug(f"Repaired {empty.size} empty cluster(s)")
    return int(empty.size)


def _update_centroids(points, labels, k):
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    for cluster in range(k):
        centroids[cluster] = points[labels == cluster].mean(axis=0)
    return centroids


def _single_run(points, config, rng):
    n = points.shape[0]
    k = int(config.k)
    centroids = points[rng.choice(n, size=k, replace=False)].copy()

    labels = np.argmin(pairwise_to_centers(points, centroids, config.metric), axis=1)
    _repair_empty_clusters(points, labels, centroids, config.metric)
    history = [_squared_error(points, labels, centroids)]

    converged = False
    iterations = 0
    for iterations in range(1, int(config.max_iterations) + 1):
        new_centroids = _update_centroids(points, labels, k)
        shift = float(np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1))))

        new_labels = np.argmin(pairwise_to_centers(points, new_centroids, config.metric), axis=1)
        _repair_empty_clusters(points, new_labels, new_centroids, config.metric)
        history.append(_squared_error(points, new_labels, new_centroids))

        unchanged = np.array_equal(new_labels, labels)
        centroids, labels = new_centroids, new_labels
        if unchanged or shift < config.tolerance:
            converged = True
            break

    # the last relabelling may have moved points away from the centroids that placed them
    final_centroids = _update_centroids(points, labels, k)
    if not np.array_equal(final_centroids, centroids):
        centroids = final_centroids
        history[-1] = _squared_error(points, labels, centroids)

    return labels, centroids, history, iterations, converged


def kmeans(X, config):
    """
    Lloyd iteration with the configured assignment metric, best of several restarts.

    The centroid update is always the component-wise mean. Restart r draws its
    initial centroids from a generator seeded with (seed, r), so the result is
    fixed by the seed alone.
    """
    if config.k > X.n:
        raise InputValidationError(f"k={config.k} exceeds the number of rows n={X.n}")

    points = X.values
    best = None
    restart_objectives = []
    for restart in range(int(config.restarts)):
        rng = np.random.default_rng([int(config.seed), restart])
        labels, centroids, history, iterations, converged = _single_run(points, config, rng)
        objective = history[-1]
        restart_objectives.append(objective)
        logger.debug(f"k-means restart {restart}: objective={objective:.6g} "
                     f"iterations={iterations} converged={converged}")

        if best is None or objective < best[2][-1]:
            best = (labels, centroids, history, iterations, converged)

    labels, centroids, history, iterations, converged = best

    # Canonical label order: clusters numbered by first appearance
    order = []
    for label in labels:
        if label not in order:
            order.append(int(label))
    remap = np.empty(len(order), dtype=np.int64)
    remap[order] = np.arange(len(order))

    assignment = ClusterAssignment(remap[labels], 'kmeans', config.to_dict())
    centroids = centroids[order]
    objective = kmeans_objective(X, assignment, centroids)

    if config.metric is not DistanceMetric.EUCLIDEAN:
        logger.debug(f"k-means with {config.metric.value} assignment; objective is squared Euclidean")

    logger.info(f"k-means k={config.k} metric={config.metric.value}: objective={objective:.6g} "
                f"after {iterations} iteration(s), converged={converged}")

    return KMeansResult(
        assignment=assignment,
        centroids=centroids,
        objective=objective,
        iterations_used=iterations,
        converged=converged,
        objective_history=tuple(history),
        restart_objectives=tuple(restart_objectives),
    )


def kmeans_objective(X, assignment, centroids):
    """Sum over clusters of squared Euclidean distances from members to their centroid"""
    centroids = np.asarray(centroids, dtype=np.float64)
    labels = assignment.labels
    if labels.size != X.n:
        raise InputValidationError(f"{labels.size} labels for {X.n} rows")
    if centroids.ndim != 2 or centroids.shape[1] != X.p:
        raise InputValidationError(f"centroids must be k x {X.p}, got shape {centroids.shape}")
    if np.any(labels == NOISE):
        raise InputValidationError("objective undefined for NOISE labels")
    if np.any(labels >= centroids.shape[0]):
        raise InputValidationError(f"label {int(labels.max())} out of range for "
                                   f"{centroids.shape[0]} centroids")

    total = 0.0
    for cluster in range(centroids.shape[0]):
        diff = X.values[labels == cluster] - centroids[cluster]
        total += float(np.sum(diff * diff))
    return total
