"""Synthetic low-rank matrices with a prescribed singular spectrum."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from hsvd.errors import ContractViolation
from hsvd.kernels import qr_thin
from hsvd.models.matrix import as_dense

logger = logging.getLogger(__name__)


class SpectrumKind(Enum):
    EXPONENTIAL = "exp"
    POWER_LAW = "pow"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class SpectrumSpec:
    """Leading ``rank`` values follow ``kind`` with sigma_1 = 1; every later
    index sits at ``noise_floor``."""
    kind: SpectrumKind
    rank: int
    ratio: float = 0.5
    exponent: float = 1.0
    values: Tuple[float, ...] = ()
    noise_floor: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind is SpectrumKind.EXPLICIT:
            if not self.values or any(v <= 0 for v in self.values):
                raise ContractViolation("explicit spectrum needs positive values")
            object.__setattr__(self, 'rank', len(self.values))
        if self.rank < 1:
            raise ContractViolation(f"rank must be >= 1, got {self.rank}")
        if self.kind is SpectrumKind.EXPONENTIAL and not 0.0 < self.ratio < 1.0:
            raise ContractViolation(f"ratio must lie in (0, 1), got {self.ratio}")
        if self.kind is SpectrumKind.POWER_LAW and not self.exponent > 0:
            raise ContractViolation(f"exponent must be positive, got {self.exponent}")
        if self.noise_floor < 0:
            raise ContractViolation(f"noise_floor must be >= 0, got {self.noise_floor}")
        if not 0 <= self.seed < 2 ** 64:
            raise ContractViolation(f"seed must be an unsigned 64-bit value, got {self.seed}")

    @classmethod
    def parse_decay(cls, decay: str, **kwargs) -> 'SpectrumSpec':
        """``exp:RHO``, ``pow:ALPHA`` or ``explicit:S1;S2;...``."""
        name, _, argument = decay.partition(':')
        try:
            kind = SpectrumKind(name)
            if kind is SpectrumKind.EXPONENTIAL:
                return cls(kind=kind, ratio=float(argument), **kwargs)
            if kind is SpectrumKind.POWER_LAW:
                return cls(kind=kind, exponent=float(argument), **kwargs)
            kwargs.pop('rank', None)
            values = tuple(float(v) for v in argument.split(';'))
            return cls(kind=kind, rank=len(values), values=values, **kwargs)
        except ValueError as e:
            raise ContractViolation(f"bad decay '{decay}': {e}") from None

    def leading(self) -> np.ndarray:
        index = np.arange(self.rank, dtype=np.float64)
        if self.kind is SpectrumKind.EXPONENTIAL:
            return self.ratio ** index
        if self.kind is SpectrumKind.POWER_LAW:
            return (index + 1.0) ** -self.exponent
        values = np.asarray(self.values, dtype=np.float64)
        return values / values.max()


def gen_low_rank(m: int, n: int, spec: SpectrumSpec):
    """``X = U diag(sigma) Vᵀ`` with Haar-like orthonormal ``U``, ``V``.

    Returns ``(X, true_sigma)``; ``true_sigma`` is sorted nonincreasing and
    has ``min(m, n)`` entries. Deterministic in ``spec.seed``.
    """
    p = min(m, n)
    if spec.rank > p:
        raise ContractViolation(f"rank {spec.rank} exceeds min(m, n) = {p}")
    sigma = np.full(p, spec.noise_floor)
    sigma[:spec.rank] = spec.leading()
    rng = np.random.default_rng(spec.seed)
    u, _ = qr_thin(rng.standard_normal((m, p)))
    v, _ = qr_thin(rng.standard_normal((n, p)))
    x = as_dense((u * sigma) @ v.T)
    logger.info(f"generated {m}x{n} matrix, {spec.kind.value} spectrum, rank {spec.rank}, seed {spec.seed}")
    return x, np.sort(sigma)[::-1]


def explicit(values: Sequence[float], **kwargs) -> SpectrumSpec:
    return SpectrumSpec(kind=SpectrumKind.EXPLICIT, rank=len(values), values=tuple(values), **kwargs)
