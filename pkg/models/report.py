import json
from dataclasses import dataclass, field, asdict, fields

from config import config
from errors import InputValidationError
from models.clustering import Linkage
from models.feature_matrix import DistanceMetric

ALGORITHMS = ('kmeans', 'hierarchical', 'dbscan')
ALGORITHM_ALIASES = {'hier': 'hierarchical', 'density': 'dbscan'}


@dataclass
class AnalysisConfig:
    """Everything a run depends on; echoed into the report so it can be re-run"""

    algorithm: str = 'kmeans'
    metric: str = 'euclidean'
    standardize: bool = True
    seed: int = 0
    k: int = config.KMEANS_DEFAULTS['k']
    restarts: int = config.KMEANS_DEFAULTS['restarts']
    max_iterations: int = config.KMEANS_DEFAULTS['max_iterations']
    tolerance: float = config.KMEANS_DEFAULTS['tolerance']
    linkage: str = config.HIERARCHICAL_DEFAULTS['linkage']
    eps: float = config.DBSCAN_DEFAULTS['eps']
    min_pts: int = config.DBSCAN_DEFAULTS['min_pts']
    k_min: int = config.VALIDATION_DEFAULTS['k_min']
    k_max: int = config.VALIDATION_DEFAULTS['k_max']
    gap_b: int = config.VALIDATION_DEFAULTS['gap_b']
    gap_restarts: int = config.VALIDATION_DEFAULTS['gap_restarts']
    target: str = 'MHR'
    columns: list = None
    ideb_aggregation: str = 'mean'
    lowess_fraction: float = config.LOWESS_DEFAULTS['fraction']
    lowess_iterations: int = config.LOWESS_DEFAULTS['iterations']
    silhouette_orientation: str = 'standard'

    def __post_init__(self):
        self.algorithm = ALGORITHM_ALIASES.get(self.algorithm, self.algorithm)
        self.metric = DistanceMetric.parse(self.metric).value
        self.linkage = Linkage.parse(self.linkage).value
        if self.columns is not None:
            self.columns = list(self.columns)

    def validate(self, n=None):
        """Validate against the data size when known"""
        errors = []

        if self.algorithm not in ALGORITHMS:
            errors.append(f"unknown algorithm: {self.algorithm}")
        if self.seed is None or not 0 <= int(self.seed) < 2 ** 64:
            errors.append(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.k < 1:
            errors.append(f"k must be >= 1, got {self.k}")
        if self.k_min < 1 or self.k_max < self.k_min:
            errors.append(f"invalid k range [{self.k_min}, {self.k_max}]")
        # the validation sweep stops at n, so only its lower end must fit
        if n is not None and self.k_min > n:
            errors.append(f"k_min={self.k_min} exceeds n={n}")
        if n is not None and self.algorithm != 'dbscan' and self.k > n:
            errors.append(f"k={self.k} exceeds n={n}")
        if self.gap_b < 1:
            errors.append(f"gap B must be >= 1, got {self.gap_b}")
        if self.restarts < 1 or self.gap_restarts < 1:
            errors.append("restarts must be >= 1")
        if not self.eps > 0:
            errors.append(f"eps must be > 0, got {self.eps}")
        if self.min_pts < 1:
            errors.append(f"min_pts must be >= 1, got {self.min_pts}")
        if self.ideb_aggregation != 'mean':
            errors.append(f"unsupported IDEB aggregation: {self.ideb_aggregation}")
        if self.silhouette_orientation not in ('standard', 'literal'):
            errors.append(f"unknown silhouette orientation: {self.silhouette_orientation}")

        return len(errors) == 0, errors

    def ensure_valid(self, n=None):
        is_valid, errors = self.validate(n)
        if not is_valid:
            raise InputValidationError('; '.join(errors))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InputValidationError(f"unknown config fields: {', '.join(unknown)}")
        return cls(**data)


@dataclass
class RunReport:
    """
    Self-contained result of one analysis run.

    Every section is plain JSON data; `timing` is the only field that differs
    between two runs of the same config on the same file.
    """

    fingerprint: dict
    config: dict
    summary: list = field(default_factory=list)
    correlations: list = field(default_factory=list)
    regressions: list = field(default_factory=list)
    column_distances: dict = None
    clustering: dict = None
    validation: dict = None
    selected_k: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def to_dict(self, include_timing=True):
        data = asdict(self)
        if not include_timing:
            data.pop('timing')
        return data

    def to_json(self, include_timing=True):
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2) + '\n'

    def save(self, file_path):
        """Save report to a JSON file"""
        try:
            with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(self.to_json())
        except OSError as e:
            raise InputValidationError(f"cannot write run report {file_path}: {e.strerror or e}") from None

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        missing = {'fingerprint', 'config'} - set(data)
        if missing:
            raise InputValidationError(f"run report is missing: {', '.join(sorted(missing))}")
        return cls(**{key: value for key, value in data.items() if key in known})

    @classmethod
    def from_json(cls, json_str):
        try:
            data = json.loads(json_str)
        except json.JSONDecodeError as e:
            raise InputValidationError(f"run report is not valid JSON: {e}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, file_path):
        """Load a report from a JSON file"""
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                return cls.from_json(f.read())
        except OSError as e:
            raise InputValidationError(f"cannot read run report {file_path}: {e}") from None
