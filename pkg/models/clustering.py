from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np

from errors import InputValidationError
from models.feature_matrix import DistanceMetric

NOISE = -1


class Linkage(str, Enum):
    SINGLE = 'single'
    COMPLETE = 'complete'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InputValidationError(f"unknown linkage: {value} (allowed: single, complete)") from None


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN
    max_iterations: int = 100
    restarts: int = 25
    seed: int = 0
    tolerance: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, 'metric', DistanceMetric.parse(self.metric))
        if int(self.k) < 1:
            raise InputValidationError(f"k must be >= 1, got {self.k}")
        if int(self.restarts) < 1:
            raise InputValidationError(f"restarts must be >= 1, got {self.restarts}")
        if int(self.max_iterations) < 1:
            raise InputValidationError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InputValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.tolerance < 0:
            raise InputValidationError(f"tolerance must be >= 0, got {self.tolerance}")

    def to_dict(self):
        data = asdict(self)
        data['metric'] = self.metric.value
        return data


@dataclass(frozen=True)
class DbscanConfig:
    eps: float
    min_pts: int
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, 'metric', DistanceMetric.parse(self.metric))
        if not self.eps > 0:
            raise InputValidationError(f"eps must be > 0, got {self.eps}")
        if int(self.min_pts) < 1:
            raise InputValidationError(f"min_pts must be >= 1, got {self.min_pts}")

    def to_dict(self):
        data = asdict(self)
        data['metric'] = self.metric.value
        return data


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Per-entity labels; NOISE only ever comes from DBSCAN"""

    labels: np.ndarray
    algorithm: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise InputValidationError("labels must be a non-empty 1-dimensional sequence")
        if np.any(labels < NOISE):
            raise InputValidationError(f"invalid label {labels.min()}")
        if np.any(labels == NOISE) and self.algorithm != 'dbscan':
            raise InputValidationError(f"NOISE labels are only valid for dbscan, not {self.algorithm}")

        clustered = labels[labels != NOISE]
        k = int(clustered.max()) + 1 if clustered.size else 0
        occupied = np.unique(clustered)
        if occupied.size != k:
            missing = sorted(set(range(k)) - set(occupied.tolist()))
            raise InputValidationError(f"cluster labels must be contiguous from 0, missing {missing}")

        labels.setflags(write=False)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'parameters', dict(self.parameters))

    @property
    def k(self):
        clustered = self.labels[self.labels != NOISE]
        return int(clustered.max()) + 1 if clustered.size else 0

    @property
    def n(self):
        return self.labels.size

    @property
    def noise_indices(self):
        return np.flatnonzero(self.labels == NOISE)

    @property
    def has_noise(self):
        return bool(np.any(self.labels == NOISE))

    def members(self, cluster):
        return np.flatnonzero(self.labels == cluster)

    def sizes(self):
        return [int(np.sum(self.labels == c)) for c in range(self.k)]

    def groups(self):
        """Clusters as lists of indices, in label order"""
        return [self.members(c).tolist() for c in range(self.k)]

    def without_noise(self):
        """(kept indices, assignment over those indices only)"""
        kept = np.flatnonzero(self.labels != NOISE)
        return kept, ClusterAssignment(self.labels[kept], self.algorithm, self.parameters)

    @classmethod
    def from_labels(cls, labels, algorithm, parameters=None):
        """Relabel arbitrary non-negative ids by order of first appearance"""
        mapping = {}
        canonical = []
        for label in labels:
            label = int(label)
            if label == NOISE:
                canonical.append(NOISE)
                continue
            if label not in mapping:
                mapping[label] = len(mapping)
            canonical.append(mapping[label])
        return cls(np.array(canonical, dtype=np.int64), algorithm, parameters or {})

    def to_dict(self):
        return {
            'algorithm': self.algorithm,
            'parameters': self.parameters,
            'k': self.k,
            'labels': self.labels.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            labels=data['labels'],
            algorithm=data['algorithm'],
            parameters=data.get('parameters', {}),
        )


@dataclass(frozen=True, eq=False)
class KMeansResult:
    assignment: ClusterAssignment
    centroids: np.ndarray
    objective: float
    iterations_used: int
    converged: bool
    objective_history: tuple = ()
    restart_objectives: tuple = ()

    def to_dict(self):
        return {
            'assignment': self.assignment.to_dict(),
            'centroids': np.asarray(self.centroids).tolist(),
            'objective': float(self.objective),
            'iterations_used': int(self.iterations_used),
            'converged': bool(self.converged),
            'objective_history': [float(v) for v in self.objective_history],
            'restart_objectives': [float(v) for v in self.restart_objectives],
        }


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Dendrogram:
    """
    Agglomerative merge tree over n leaves.

    Leaves are nodes 0..n-1; merge i creates node n + i. Heights are the
    linkage dissimilarities at which the merges happened.
    """

    merges: tuple
    linkage: Linkage
    metric: DistanceMetric

    def __post_init__(self):
        merges = tuple(m if isinstance(m, Merge) else Merge(**m) for m in self.merges)
        object.__setattr__(self, 'merges', merges)
        object.__setattr__(self, 'linkage', Linkage.parse(self.linkage))
        object.__setattr__(self, 'metric', DistanceMetric.parse(self.metric))

        n = len(merges) + 1
        sizes = {leaf: 1 for leaf in range(n)}
        used = set()
        for i, merge in enumerate(merges):
            node = n + i
            for child in (merge.left, merge.right):
                if child not in sizes or child in used:
                    raise InputValidationError(f"merge {i} references unavailable node {child}")
                used.add(child)
            if merge.size != sizes[merge.left] + sizes[merge.right]:
                raise InputValidationError(f"merge {i} has size {merge.size}, expected "
                                           f"{sizes[merge.left] + sizes[merge.right]}")
            if i > 0 and merge.height < merges[i - 1].height:
                raise InputValidationError(f"merge heights decrease at merge {i}")
            sizes[node] = merge.size

    @property
    def n(self):
        return len(self.merges) + 1

    def heights(self):
        return [m.height for m in self.merges]

    def leaf_order(self):
        """Leaves left to right as a dendrogram drawing lays them out"""
        n = self.n
        if n == 1:
            return [0]
        children = {n + i: (m.left, m.right) for i, m in enumerate(self.merges)}
        order = []
        stack = [n + len(self.merges) - 1]
        while stack:
            node = stack.pop()
            if node < n:
                order.append(node)
            else:
                left, right = children[node]
                stack.append(right)
                stack.append(left)
        return order

    def to_dict(self):
        return {
            'linkage': self.linkage.value,
            'metric': self.metric.value,
            'merges': [m.to_dict() for m in self.merges],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            merges=tuple(Merge(**m) for m in data['merges']),
            linkage=data['linkage'],
            metric=data['metric'],
        )
