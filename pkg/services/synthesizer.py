"""
Seeded synthetic datasets with planted clusters, used as test oracles and
as stand-in input when the real municipality file is not at hand.
"""
import logging
import math

import numpy as np

from config import config
from errors import InputValidationError
from models.clustering import NOISE
from models.feature_matrix import FeatureMatrix
from models.municipality import IDEB_HEADERS, MunicipalityRecord

logger = logging.getLogger(__name__)


def _cluster_sizes(total, k):
    base, extra = divmod(total, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def planted_centers(planted_k, separation, p):
    """
    Centers on a regular polygon in the first two coordinates whose
    neighbouring vertices lie exactly `separation` apart.
    """
    centers = np.zeros((planted_k, p), dtype=np.float64)
    if planted_k == 1:
        return centers
    if planted_k == 2:
        centers[1, 0] = separation
        return centers
    radius = separation / (2.0 * math.sin(math.pi / planted_k))
    for j in range(planted_k):
        angle = 2.0 * math.pi * j / planted_k
        centers[j, 0] = radius * math.cos(angle)
        centers[j, 1] = radius * math.sin(angle)
    return centers


def synthesize(seed, n, planted_k, separation, noise_fraction=0.0, p=2, sd=1.0):
    """
    Gaussian blobs plus uniform noise.

    Returns (FeatureMatrix, true labels); noise rows carry NOISE in the truth.
    Rows are shuffled, so cluster membership cannot be read off the row order.
    """
    n, planted_k, p = int(n), int(planted_k), int(p)
    if planted_k < 1:
        raise InputValidationError(f"planted_k must be >= 1, got {planted_k}")
    if not separation > 0:
        raise InputValidationError(f"separation must be > 0, got {separation}")
    if not 0 <= noise_fraction < 1:
        raise InputValidationError(f"noise_fraction must be in [0, 1), got {noise_fraction}")
    if p < 2 and planted_k > 2:
        raise InputValidationError(f"{planted_k} planted clusters need p >= 2")
    if sd <= 0:
        raise InputValidationError(f"sd must be > 0, got {sd}")

    noise_count = int(round(noise_fraction * n))
    clustered = n - noise_count
    if clustered < planted_k:
        raise InputValidationError(f"n={n} with noise_fraction={noise_fraction} leaves "
                                   f"{clustered} points for {planted_k} clusters")

    rng = np.random.default_rng(int(seed))
    centers = planted_centers(planted_k, separation, p)

    blocks, truth = [], []
    for label, size in enumerate(_cluster_sizes(clustered, planted_k)):
        blocks.append(centers[label] + rng.normal(0.0, sd, size=(size, p)))
        truth.extend([label] * size)

    if noise_count:
        low = centers.min(axis=0) - 4.0 * sd
        high = centers.max(axis=0) + 4.0 * sd
        blocks.append(rng.uniform(low, high, size=(noise_count, p)))
        truth.extend([NOISE] * noise_count)

    order = rng.permutation(n)
    values = np.vstack(blocks)[order]
    truth = np.asarray(truth, dtype=np.int64)[order]

    matrix = FeatureMatrix(
        values=values,
        row_ids=[f"s{i:04d}" for i in range(n)],
        column_names=[f"x{j + 1}" for j in range(p)],
    )
    logger.debug(f"Synthesized {n} points: k={planted_k}, separation={separation:g}, "
                 f"noise={noise_count}")
    return matrix, truth


def _scale(unit, bounds):
    low, high = bounds
    return low + unit * (high - low)


def synthesize_municipalities(seed, n, planted_k, noise_fraction=0.0, spread=0.04, ranges=None):
    """
    Municipality records whose profiles come from planted_k prototypes.

    Every value respects the record schema: counts are whole numbers,
    indices stay inside their ranges. Returns (records, true labels).
    """
    ranges = ranges or config.SYNTH_RANGES
    n, planted_k = int(n), int(planted_k)
    if planted_k < 1 or n < 2:
        raise InputValidationError(f"need n >= 2 and planted_k >= 1, got n={n}, k={planted_k}")
    if not 0 <= noise_fraction < 1:
        raise InputValidationError(f"noise_fraction must be in [0, 1), got {noise_fraction}")
    noise_count = int(round(noise_fraction * n))
    if n - noise_count < planted_k:
        raise InputValidationError(f"n={n} leaves too few points for {planted_k} clusters")

    rng = np.random.default_rng(int(seed))
    base_variables = list(ranges)
    prototypes = rng.uniform(0.15, 0.85, size=(planted_k, len(base_variables)))

    units, truth = [], []
    for label, size in enumerate(_cluster_sizes(n - noise_count, planted_k)):
        block = prototypes[label] + rng.normal(0.0, spread, size=(size, len(base_variables)))
        units.append(np.clip(block, 0.0, 1.0))
        truth.extend([label] * size)
    if noise_count:
        units.append(rng.uniform(0.0, 1.0, size=(noise_count, len(base_variables))))
        truth.extend([NOISE] * noise_count)

    order = rng.permutation(n)
    units = np.vstack(units)[order]
    truth = np.asarray(truth, dtype=np.int64)[order]

    records = []
    for i, row in enumerate(units):
        unit = dict(zip(base_variables, row))
        population = max(1.0, round(_scale(unit['POPULATION'], ranges['POPULATION'])))
        # homicides track population size
        mhr_unit = float(np.clip(0.8 * unit['POPULATION'] + 0.2 * unit['MHR'], 0.0, 1.0))
        ideb = _scale(unit['IDEB'], ranges['IDEB'])
        ideb_years = np.clip(ideb + rng.normal(0.0, 0.2, size=len(IDEB_HEADERS)), 0.0, 10.0)
        mhdi = _scale(unit['MHDI'], ranges['MHDI'])
        dimensions = np.clip(mhdi + rng.normal(0.0, 0.03, size=3), 0.0, 1.0)

        records.append(MunicipalityRecord(
            name=f"Municipality {i + 1:03d}",
            mhr=float(round(_scale(mhr_unit, ranges['MHR']))),
            population=float(population),
            demog_density=round(_scale(unit['DEMOGDENSITY'], ranges['DEMOGDENSITY']), 2),
            ideb_2005=round(float(ideb_years[0]), 1),
            ideb_2007=round(float(ideb_years[1]), 1),
            ideb_2009=round(float(ideb_years[2]), 1),
            ideb_2011=round(float(ideb_years[3]), 1),
            ideb_2013=round(float(ideb_years[4]), 1),
            life_expect=round(_scale(unit['LIFEEXPECT'], ranges['LIFEEXPECT']), 2),
            gini=round(_scale(unit['GINI'], ranges['GINI']), 4),
            in_richest10=round(_scale(unit['INRICHEST10'], ranges['INRICHEST10']), 2),
            educ_level=round(_scale(unit['EDUCLEVEL'], ranges['EDUCLEVEL']), 2),
            mhdi=round(mhdi, 3),
            mhdi_e=round(float(dimensions[0]), 3),
            mhdi_l=round(float(dimensions[1]), 3),
            mhdi_i=round(float(dimensions[2]), 3),
        ))

    logger.info(f"Synthesized {n} municipalities from {planted_k} profile(s), {noise_count} noise")
    return records, truth
