from dataclasses import dataclass
from enum import Enum

import numpy as np

from errors import InputValidationError


class DistanceMetric(str, Enum):
    """Dissimilarities available to clustering and validation"""

    EUCLIDEAN = 'euclidean'
    MANHATTAN = 'manhattan'
    CANBERRA = 'canberra'
    PEARSON = 'pearson'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            allowed = ', '.join(m.value for m in cls)
            raise InputValidationError(f"unknown metric: {value} (allowed: {allowed})") from None


def _frozen_array(values, name):
    try:
        array = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InputValidationError(f"{name} must be numeric: {e}") from None
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """n x p table of entities (rows) by variables (columns)"""

    values: np.ndarray
    row_ids: tuple
    column_names: tuple

    def __post_init__(self):
        values = _frozen_array(self.values, 'values')
        if values.ndim != 2:
            raise InputValidationError(f"feature matrix must be 2-dimensional, got {values.ndim}")
        n, p = values.shape
        if n < 2 or p < 1:
            raise InputValidationError(f"feature matrix needs n >= 2 and p >= 1, got {n}x{p}")
        if not np.all(np.isfinite(values)):
            raise InputValidationError("feature matrix contains missing or non-finite values")

        row_ids = tuple(str(r) for r in self.row_ids)
        column_names = tuple(str(c) for c in self.column_names)
        if len(row_ids) != n:
            raise InputValidationError(f"{len(row_ids)} row ids for {n} rows")
        if len(column_names) != p:
            raise InputValidationError(f"{len(column_names)} column names for {p} columns")
        if len(set(row_ids)) != n:
            raise InputValidationError("row ids must be unique")
        if len(set(column_names)) != p:
            raise InputValidationError("column names must be unique")

        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'row_ids', row_ids)
        object.__setattr__(self, 'column_names', column_names)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def column(self, name):
        """Return one column by name"""
        try:
            index = self.column_names.index(name)
        except ValueError:
            raise InputValidationError(f"unknown column: {name}") from None
        return self.values[:, index]

    def select_columns(self, names):
        """Return a new matrix restricted to the given columns, in the given order"""
        indices = []
        for name in names:
            if name not in self.column_names:
                raise InputValidationError(f"unknown column: {name}")
            indices.append(self.column_names.index(name))
        return FeatureMatrix(self.values[:, indices], self.row_ids, tuple(names))

    def with_values(self, values):
        """Same ids and names, new numbers"""
        return FeatureMatrix(values, self.row_ids, self.column_names)

    def to_dict(self):
        return {
            'row_ids': list(self.row_ids),
            'column_names': list(self.column_names),
            'values': self.values.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            values=data['values'],
            row_ids=data['row_ids'],
            column_names=data['column_names'],
        )


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric pairwise dissimilarities with a zero diagonal"""

    values: np.ndarray
    metric: DistanceMetric
    row_ids: tuple

    def __post_init__(self):
        values = _frozen_array(self.values, 'distances')
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise InputValidationError(f"distance matrix must be square, got shape {values.shape}")
        n = values.shape[0]
        if n < 1:
            raise InputValidationError("distance matrix is empty")
        if not np.array_equal(values, values.T):
            raise InputValidationError("distance matrix is not symmetric")
        if np.any(np.diag(values) != 0.0):
            raise InputValidationError("distance matrix diagonal is not zero")
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise InputValidationError("distance matrix entries must be finite and non-negative")

        row_ids = tuple(str(r) for r in self.row_ids)
        if len(row_ids) != n:
            raise InputValidationError(f"{len(row_ids)} row ids for {n} rows")

        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'metric', DistanceMetric.parse(self.metric))
        object.__setattr__(self, 'row_ids', row_ids)

    @property
    def n(self):
        return self.values.shape[0]

    def subset(self, indices):
        """Restrict to the given rows/columns, e.g. to drop noise points"""
        indices = list(indices)
        return DistanceMatrix(
            self.values[np.ix_(indices, indices)],
            self.metric,
            tuple(self.row_ids[i] for i in indices),
        )

    def to_dict(self):
        return {
            'metric': self.metric.value,
            'row_ids': list(self.row_ids),
            'values': self.values.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            values=data['values'],
            metric=data['metric'],
            row_ids=data['row_ids'],
        )
