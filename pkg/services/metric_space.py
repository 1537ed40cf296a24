"""
Distance kernels, pairwise distance matrices and column standardization.

All arithmetic is float64. distance_matrix fills each entry with exactly the
value distance() returns for that pair, so a naive double loop reproduces it.
"""
import logging

import numpy as np

from errors import InputValidationError, NumericError
from models.feature_matrix import DistanceMatrix, DistanceMetric, FeatureMatrix

logger = logging.getLogger(__name__)


def _as_vector(values, name):
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1:
        raise InputValidationError(f"{name} must be a 1-dimensional vector")
    return vector


def _euclidean(a, b):
    diff = a - b
    return float(np.sqrt(np.sum(diff * diff)))


def _manhattan(a, b):
    return float(np.sum(np.abs(a - b)))


def _canberra(a, b):
    numerator = np.abs(a - b)
    denominator = np.abs(a) + np.abs(b)
    # 0/0 terms contribute nothing
    terms = np.divide(numerator, denominator, out=np.zeros_like(numerator), where=denominator != 0)
    return float(np.sum(terms))


def _pearson_distance(a, b):
    if a.size < 2:
        raise NumericError("pearson distance needs vectors of length >= 2")
    ac = a - a.mean()
    bc = b - b.mean()
    saa = np.sum(ac * ac)
    sbb = np.sum(bc * bc)
    if saa == 0 or sbb == 0:
        raise NumericError("pearson distance undefined: constant vector")
    if np.array_equal(a, b):
        return 0.0
    r = np.sum(ac * bc) / np.sqrt(saa * sbb)
    return float(1.0 - np.clip(r, -1.0, 1.0))


_KERNELS = {
    DistanceMetric.EUCLIDEAN: _euclidean,
    DistanceMetric.MANHATTAN: _manhattan,
    DistanceMetric.CANBERRA: _canberra,
    DistanceMetric.PEARSON: _pearson_distance,
}


def distance(a, b, metric):
    """Dissimilarity between two equal-length vectors under metric"""
    metric = DistanceMetric.parse(metric)
    a = _as_vector(a, 'a')
    b = _as_vector(b, 'b')
    if a.size != b.size:
        raise InputValidationError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 1:
        raise InputValidationError("vectors must not be empty")
    return _KERNELS[metric](a, b)


def distance_matrix(X, metric, axis='rows'):
    """
    Pairwise distances between the rows (entities) or the columns (variables) of X.

    Each entry is computed once for i < j and mirrored, so the result is
    exactly symmetric with a zero diagonal.
    """
    metric = DistanceMetric.parse(metric)
    if axis == 'rows':
        points, ids = X.values, X.row_ids
    elif axis == 'columns':
        if X.p < 2:
            raise InputValidationError("column distances need at least 2 columns")
        points, ids = X.values.T, X.column_names
    else:
        raise InputValidationError(f"axis must be 'rows' or 'columns', got {axis}")

    n = points.shape[0]
    values = np.zeros((n, n), dtype=np.float64)
    kernel = _KERNELS[metric]
    for i in range(n):
        for j in range(i + 1, n):
            try:
                d = kernel(points[i], points[j])
            except NumericError as e:
                raise NumericError(f"distance({ids[i]}, {ids[j]}): {e}") from None
            values[i, j] = d
            values[j, i] = d

    logger.debug(f"Computed {metric.value} distance matrix over {n} {axis}")
    return DistanceMatrix(values, metric, ids)


def pairwise_to_centers(points, centers, metric):
    """
    n x k distances from every point to every center.

    Vectorized counterpart of distance() used by the K-means assignment step.
    """
    metric = DistanceMetric.parse(metric)
    points = np.asarray(points, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    diff = points[:, None, :] - centers[None, :, :]

    if metric is DistanceMetric.EUCLIDEAN:
        return np.sqrt(np.sum(diff * diff, axis=2))
    if metric is DistanceMetric.MANHATTAN:
        return np.sum(np.abs(diff), axis=2)
    if metric is DistanceMetric.CANBERRA:
        numerator = np.abs(diff)
        denominator = np.abs(points)[:, None, :] + np.abs(centers)[None, :, :]
        terms = np.divide(numerator, denominator, out=np.zeros_like(numerator), where=denominator != 0)
        return np.sum(terms, axis=2)

    if points.shape[1] < 2:
        raise NumericError("pearson distance needs at least 2 columns")
    pc = points - points.mean(axis=1, keepdims=True)
    cc = centers - centers.mean(axis=1, keepdims=True)
    spp = np.sum(pc * pc, axis=1)
    scc = np.sum(cc * cc, axis=1)
    if np.any(spp == 0):
        raise NumericError(f"pearson distance undefined: constant row {int(np.flatnonzero(spp == 0)[0])}")
    if np.any(scc == 0):
        raise NumericError("pearson distance undefined: constant centroid")
    r = (pc @ cc.T) / np.sqrt(np.outer(spp, scc))
    return 1.0 - np.clip(r, -1.0, 1.0)


def standardize(X):
    """Center each column and scale it to unit sample standard deviation"""
    means = X.values.mean(axis=0)
    centered = X.values - means
    sds = np.sqrt(np.sum(centered * centered, axis=0) / (X.n - 1))

    for name, sd in zip(X.column_names, sds):
        if sd == 0:
            raise NumericError(f"zero variance: {name}")

    return X.with_values(centered / sds)
