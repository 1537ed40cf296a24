from dataclasses import dataclass, field

import numpy as np

from errors import InputValidationError


def _floats(values):
    return [float(v) for v in values]


@dataclass(frozen=True, eq=False)
class SilhouetteResult:
    per_point: np.ndarray
    per_cluster: np.ndarray
    overall: float
    a: np.ndarray
    b: np.ndarray
    orientation: str = 'standard'

    def to_dict(self):
        return {
            'orientation': self.orientation,
            'overall': float(self.overall),
            'per_cluster': _floats(self.per_cluster),
            'per_point': _floats(self.per_point),
        }


@dataclass(frozen=True, eq=False)
class GapResult:
    k_values: tuple
    gap: np.ndarray
    s: np.ndarray
    log_w_observed: np.ndarray
    log_w_reference: np.ndarray
    b_copies: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, 'k_values', tuple(int(k) for k in self.k_values))
        length = len(self.k_values)
        for name in ('gap', 's', 'log_w_observed', 'log_w_reference'):
            array = np.asarray(getattr(self, name), dtype=np.float64)
            if array.shape != (length,):
                raise InputValidationError(f"{name} has {array.size} entries for {length} k values")
            object.__setattr__(self, name, array)
        if np.any(self.s < 0):
            raise InputValidationError("gap spread s must be non-negative")

    def to_dict(self):
        return {
            'k_values': list(self.k_values),
            'gap': _floats(self.gap),
            's': _floats(self.s),
            'log_w_observed': _floats(self.log_w_observed),
            'log_w_reference': _floats(self.log_w_reference),
            'b_copies': self.b_copies,
            'seed': self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            k_values=tuple(data['k_values']),
            gap=data['gap'],
            s=data['s'],
            log_w_observed=data['log_w_observed'],
            log_w_reference=data['log_w_reference'],
            b_copies=data['b_copies'],
            seed=data['seed'],
        )


@dataclass(frozen=True, eq=False)
class SswCurve:
    k_values: tuple
    ssw: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'k_values', tuple(int(k) for k in self.k_values))
        ssw = np.asarray(self.ssw, dtype=np.float64)
        if ssw.shape != (len(self.k_values),):
            raise InputValidationError(f"{ssw.size} SSW values for {len(self.k_values)} k values")
        if np.any(ssw < 0):
            raise InputValidationError("SSW values must be non-negative")
        object.__setattr__(self, 'ssw', ssw)

    def is_non_increasing(self, tolerance=1e-9):
        return bool(np.all(np.diff(self.ssw) <= tolerance))

    def to_dict(self):
        return {'k_values': list(self.k_values), 'ssw': _floats(self.ssw)}

    @classmethod
    def from_dict(cls, data):
        return cls(k_values=tuple(data['k_values']), ssw=data['ssw'])


@dataclass(frozen=True)
class KSelection:
    """k chosen by one selection rule; fallback marks a rule that found no k"""

    rule: str
    k: int
    fallback: bool = False

    def to_dict(self):
        return {'rule': self.rule, 'k': self.k, 'fallback': self.fallback}


@dataclass
class ValidationReport:
    """Per-k validity series of one clustering algorithm plus the selected k"""

    algorithm: str
    status: str = 'ok'
    reason: str = None
    k_values: list = field(default_factory=list)
    silhouette: dict = field(default_factory=dict)
    gap: GapResult = None
    ssw: SswCurve = None
    selections: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @classmethod
    def not_applicable(cls, algorithm, reason):
        return cls(algorithm=algorithm, status='not-applicable', reason=reason)

    def to_dict(self):
        return {
            'algorithm': self.algorithm,
            'status': self.status,
            'reason': self.reason,
            'k_values': list(self.k_values),
            'silhouette': {str(k): float(v) for k, v in self.silhouette.items()},
            'gap': self.gap.to_dict() if self.gap is not None else None,
            'ssw': self.ssw.to_dict() if self.ssw is not None else None,
            'selections': {rule: sel.to_dict() for rule, sel in self.selections.items()},
            'notes': list(self.notes),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            algorithm=data['algorithm'],
            status=data.get('status', 'ok'),
            reason=data.get('reason'),
            k_values=list(data.get('k_values', [])),
            silhouette={int(k): v for k, v in data.get('silhouette', {}).items()},
            gap=GapResult.from_dict(data['gap']) if data.get('gap') else None,
            ssw=SswCurve.from_dict(data['ssw']) if data.get('ssw') else None,
            selections={rule: KSelection(**sel) for rule, sel in data.get('selections', {}).items()},
            notes=list(data.get('notes', [])),
        )
