import json
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import jsonschema

from hsvd.models.cost import CostEstimate

SIGMA_HEAD = 64

_METRICS = (
    'recovered_rank', 'wall_time_mat_s', 'wall_time_full_svd_s', 'speedup',
    'rel_error', 'u_cosine_min', 'sigma_head', 'predicted',
)
_REFINED_METRICS = (
    'wall_time_mat_refined_s', 'speedup_refined', 'rel_error_refined',
    'refine_iterations', 'refine_converged', 'u_cosine_min_refined', 'sigma_head_refined',
)

_NUMBER = {'type': 'number'}
_NONNEGATIVE = {'type': 'number', 'minimum': 0}
_SIGMAS = {'type': 'array', 'items': _NONNEGATIVE, 'maxItems': SIGMA_HEAD}
_PREDICTED = {
    'type': 'object',
    'required': ['flops_full', 'flops_mat', 'bound', 'P', 's', 'k', 'predicted_speedup'],
    'properties': {
        'flops_full': _NONNEGATIVE,
        'flops_mat': _NONNEGATIVE,
        'bound': _NONNEGATIVE,
        'P': {'type': 'integer', 'minimum': 1},
        's': _NONNEGATIVE,
        'k': {'type': 'integer', 'minimum': 1},
        'predicted_speedup': _NONNEGATIVE,
    },
}
_NULLS = {name: {'type': 'null'} for name in _METRICS + _REFINED_METRICS}

_ENTRY_OK = {
    'properties': {
        'error': {'type': 'null'},
        'recovered_rank': {'type': 'integer', 'minimum': 1},
        'wall_time_mat_s': _NONNEGATIVE,
        'wall_time_full_svd_s': _NONNEGATIVE,
        'speedup': _NONNEGATIVE,
        'rel_error': _NONNEGATIVE,
        'u_cosine_min': _NUMBER,
        'sigma_head': _SIGMAS,
        'predicted': _PREDICTED,
    },
    'oneOf': [
        {'properties': {
            'wall_time_mat_refined_s': _NONNEGATIVE,
            'speedup_refined': _NONNEGATIVE,
            'rel_error_refined': _NONNEGATIVE,
            'refine_iterations': {'type': 'integer', 'minimum': 1},
            'refine_converged': {'type': 'boolean'},
            'u_cosine_min_refined': _NUMBER,
            'sigma_head_refined': _SIGMAS,
        }},
        {'properties': {name: {'type': 'null'} for name in _REFINED_METRICS}},
    ],
}
_ENTRY_FAILED = {
    'properties': dict(_NULLS, error={'type': 'string', 'minLength': 1}),
}

REPORT_SCHEMA = {
    '$schema': 'https://json-schema.org/draft/2020-12/schema',
    'title': 'hsvd benchmark report',
    'type': 'object',
    'required': [
        'matrix_dims', 'gamma', 'epsilon', 'repeats', 'refine', 'gram',
        'workers', 'kernel_threads', 'grid',
    ],
    'properties': {
        'matrix_dims': {
            'type': 'array', 'items': {'type': 'integer', 'minimum': 1},
            'minItems': 2, 'maxItems': 2,
        },
        'gamma': {'type': 'number', 'minimum': 0, 'maximum': 1},
        'epsilon': {'type': 'number', 'exclusiveMinimum': 0},
        'repeats': {'type': 'integer', 'minimum': 1},
        'refine': {'type': 'boolean'},
        'gram': {'type': 'boolean'},
        'workers': {'type': 'integer', 'minimum': 1},
        'kernel_threads': {
            'type': 'object', 'additionalProperties': {'type': ['string', 'null']},
        },
        'grid': {
            'type': 'array',
            'minItems': 1,
            'items': {
                'type': 'object',
                'required': ['block_rows', 'block_cols', 'error', *_METRICS, *_REFINED_METRICS],
                'properties': {
                    'block_rows': {'type': 'integer', 'minimum': 1},
                    'block_cols': {'type': 'integer', 'minimum': 1},
                },
                'oneOf': [_ENTRY_OK, _ENTRY_FAILED],
            },
        },
    },
}


def predicted_dict(cost: CostEstimate) -> dict:
    return dict(asdict(cost), predicted_speedup=cost.predicted_speedup)


@dataclass
class GridEntry:
    """Metrics for one (d, c) block configuration; all-or-nothing."""
    block_rows: int
    block_cols: int
    recovered_rank: Optional[int] = None
    wall_time_mat_s: Optional[float] = None
    wall_time_mat_refined_s: Optional[float] = None
    wall_time_full_svd_s: Optional[float] = None
    speedup: Optional[float] = None
    speedup_refined: Optional[float] = None
    rel_error: Optional[float] = None
    rel_error_refined: Optional[float] = None
    refine_iterations: Optional[int] = None
    refine_converged: Optional[bool] = None
    u_cosine_min: Optional[float] = None
    u_cosine_min_refined: Optional[float] = None
    sigma_head: Optional[List[float]] = None
    sigma_head_refined: Optional[List[float]] = None
    predicted: Optional[Dict[str, float]] = None
    error: Optional[str] = None

    @classmethod
    def failed(cls, block_rows, block_cols, error):
        return cls(block_rows=block_rows, block_cols=block_cols, error=error or 'unknown error')

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class BenchReport:
    matrix_dims: Tuple[int, int]
    gamma: float
    epsilon: float
    repeats: int
    refine: bool
    gram: bool = False
    workers: int = 1
    kernel_threads: Dict[str, Optional[str]] = field(default_factory=dict)
    grid: List[GridEntry] = field(default_factory=list)

    def to_dict(self) -> dict:
        document = asdict(self)
        document['matrix_dims'] = list(self.matrix_dims)
        return document

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


@dataclass
class GammaSweepRow:
    """Best grid point for one merge parameter value."""
    gamma: float
    best_speedup: Optional[float]
    block_rows: Optional[int]
    block_cols: Optional[int]
    rel_error: Optional[float]
    recovered_rank: Optional[int]


def validate_report(document: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``document`` breaks the schema."""
    jsonschema.validate(instance=document, schema=REPORT_SCHEMA)
