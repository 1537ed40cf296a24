from dataclasses import dataclass, asdict

import numpy as np


@dataclass(frozen=True)
class CorrelationReport:
    variable: str
    pearson: float
    spearman: float
    kendall: float
    strength: dict

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float

    def predict(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=np.float64)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True, eq=False)
class LowessFit:
    x: np.ndarray
    fitted: np.ndarray
    fraction: float
    robustness_iterations: int

    @property
    def pairs(self):
        return list(zip(self.x.tolist(), self.fitted.tolist()))

    def to_dict(self):
        return {
            'fraction': float(self.fraction),
            'robustness_iterations': int(self.robustness_iterations),
            'x': [float(v) for v in self.x],
            'fitted': [float(v) for v in self.fitted],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            x=np.asarray(data['x'], dtype=np.float64),
            fitted=np.asarray(data['fitted'], dtype=np.float64),
            fraction=data['fraction'],
            robustness_iterations=data['robustness_iterations'],
        )


@dataclass(frozen=True)
class ColumnSummary:
    name: str
    count: int
    mean: float
    sd: float
    minimum: float
    median: float
    maximum: float

    def to_dict(self):
        return asdict(self)
