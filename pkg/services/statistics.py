"""
Correlation battery, strength labels, simple linear regression and LOWESS.
"""
import logging
import math

import numpy as np

from config import config
from errors import InputValidationError, NumericError
from models.statistics import ColumnSummary, CorrelationReport, LowessFit, RegressionFit

logger = logging.getLogger(__name__)


def _pair(x, y, minimum=2):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise InputValidationError("inputs must be 1-dimensional")
    if x.size != y.size:
        raise InputValidationError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < minimum:
        raise InputValidationError(f"need at least {minimum} observations, got {x.size}")
    return x, y


def pearson(x, y):
    """Sample product-moment correlation"""
    x, y = _pair(x, y)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = np.sum(xc * xc)
    syy = np.sum(yc * yc)
    if sxx == 0 or syy == 0:
        raise NumericError("undefined correlation: constant input")
    r = np.sum(xc * yc) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def rank(x):
    """1-based ranks; tied values share the average of their positions"""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind='mergesort')
    ordered = x[order]
    ranks = np.empty(x.size, dtype=np.float64)

    start = 0
    while start < x.size:
        end = start + 1
        while end < x.size and ordered[end] == ordered[start]:
            end += 1
        # positions start..end-1 hold one tie group; ranks are start+1..end
        ranks[order[start:end]] = (start + 1 + end) / 2.0
        start = end
    return ranks


def spearman(x, y):
    """Pearson correlation of the average-rank transforms"""
    x, y = _pair(x, y)
    return pearson(rank(x), rank(y))


def kendall(x, y):
    """
    Kendall tau-b by enumerating all pairs.

    tau_b = (concordant - discordant) / sqrt((n0 - n1)(n0 - n2)) where n0 is
    the number of pairs and n1, n2 the pairs tied in x and in y.
    """
    x, y = _pair(x, y)
    n = x.size
    upper = np.triu_indices(n, 1)
    sx = np.sign(x[:, None] - x[None, :])[upper]
    sy = np.sign(y[:, None] - y[None, :])[upper]

    n0 = n * (n - 1) // 2
    n1 = int(np.sum(sx == 0))
    n2 = int(np.sum(sy == 0))
    if n1 == n0 or n2 == n0:
        raise NumericError("undefined correlation: all pairs tied")

    score = float(np.sum(sx * sy))
    tau = score / math.sqrt((n0 - n1) * (n0 - n2))
    return float(np.clip(tau, -1.0, 1.0))


def strength_label(r):
    """Verbal strength of |r|; each band includes its lower bound"""
    if not -1.0 <= r <= 1.0:
        raise InputValidationError(f"correlation {r} outside [-1, 1]")
    magnitude = abs(r)
    thresholds = config.STRENGTH_THRESHOLDS
    if magnitude > thresholds['very strong']:
        return 'very strong'
    if magnitude >= thresholds['strong']:
        return 'strong'
    if magnitude >= thresholds['moderate']:
        return 'moderate'
    return 'weak'


def correlation_report(variable, x, y):
    """All three coefficients of x against y, each with its strength label"""
    values = {
        'pearson': pearson(x, y),
        'spearman': spearman(x, y),
        'kendall': kendall(x, y),
    }
    return CorrelationReport(
        variable=variable,
        strength={name: strength_label(value) for name, value in values.items()},
        **values,
    )


def linear_regression(x, y):
    """Ordinary least squares y = intercept + slope * x"""
    x, y = _pair(x, y)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = np.sum(xc * xc)
    if sxx == 0:
        raise NumericError("regression undefined: constant x")
    sxy = np.sum(xc * yc)
    syy = np.sum(yc * yc)

    slope = float(sxy / sxx)
    intercept = float(y.mean() - slope * x.mean())
    r_squared = float(np.clip(sxy * sxy / (sxx * syy), 0.0, 1.0)) if syy > 0 else 0.0
    return RegressionFit(slope=slope, intercept=intercept, r_squared=r_squared)


def _tricube(u):
    u = np.clip(np.abs(u), 0.0, 1.0)
    return (1.0 - u ** 3) ** 3


def _local_fit(x, y, weights, at):
    """Weighted least-squares line evaluated at one x; weighted mean when x has no spread"""
    mass = np.sum(weights)
    if mass <= 0:
        raise NumericError(f"zero local weight mass at x={at:g}")
    x_mean = np.sum(weights * x) / mass
    y_mean = np.sum(weights * y) / mass
    xc = x - x_mean
    sxx = np.sum(weights * xc * xc)
    if sxx <= 0:
        return float(y_mean)
    slope = np.sum(weights * xc * (y - y_mean)) / sxx
    return float(y_mean + slope * (at - x_mean))


def lowess(x, y, fraction=None, robustness_iterations=None):
    """
    Locally weighted linear regression with robustifying passes.

    Each point gets a line fitted over its ceil(fraction * n) nearest
    neighbours, weighted by the tricube of distance scaled to the farthest of
    them. Every robustness pass multiplies those weights by bisquare weights of
    the residuals scaled by six median absolute residuals.
    x must already be sorted ascending; fitted values come back in input order.
    """
    if fraction is None:
        fraction = config.LOWESS_DEFAULTS['fraction']
    if robustness_iterations is None:
        robustness_iterations = config.LOWESS_DEFAULTS['iterations']

    x, y = _pair(x, y, minimum=3)
    if not 0 < fraction <= 1:
        raise InputValidationError(f"fraction must be in (0, 1], got {fraction}")
    if int(robustness_iterations) < 0:
        raise InputValidationError(f"robustness iterations must be >= 0, got {robustness_iterations}")
    if np.any(np.diff(x) < 0):
        raise InputValidationError("lowess needs x sorted ascending")

    n = x.size
    window = int(math.ceil(fraction * n))
    if window < 2:
        raise InputValidationError(f"lowess window of {window} point(s) is too small")

    local_weights = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        d = np.abs(x - x[i])
        h = np.sort(d)[window - 1]
        local_weights[i] = _tricube(d / h) if h > 0 else (d == 0).astype(np.float64)

    robustness = np.ones(n, dtype=np.float64)
    fitted = np.empty(n, dtype=np.float64)
    tolerance = 1e-12 * max(1.0, float(np.mean(np.abs(y))))
    for iteration in range(int(robustness_iterations) + 1):
        for i in range(n):
            weights = local_weights[i] * robustness
            if iteration > 0 and np.sum(weights) <= 0:
                # every neighbour was rejected; keep the previous pass's value
                continue
            fitted[i] = _local_fit(x, y, weights, x[i])

        if iteration == int(robustness_iterations):
            break
        residuals = y - fitted
        if np.max(np.abs(residuals)) <= tolerance:
            logger.debug(f"lowess residuals vanished after pass {iteration}; stopping")
            break
        # a zero median still rejects the points that are not fitted exactly
        scale = max(float(np.median(np.abs(residuals))), tolerance)
        robustness = (1.0 - np.clip(residuals / (6.0 * scale), -1.0, 1.0) ** 2) ** 2

    return LowessFit(
        x=x.copy(),
        fitted=fitted,
        fraction=float(fraction),
        robustness_iterations=int(robustness_iterations),
    )


def describe(X):
    """Count, mean, sample sd, min, median and max of every column"""
    summaries = []
    for j, name in enumerate(X.column_names):
        column = X.values[:, j]
        summaries.append(ColumnSummary(
            name=name,
            count=int(column.size),
            mean=float(column.mean()),
            sd=float(column.std(ddof=1)),
            minimum=float(column.min()),
            median=float(np.median(column)),
            maximum=float(column.max()),
        ))
    return summaries
