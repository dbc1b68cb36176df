from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from hsvd.errors import ContractViolation

# LAPACK returns sorted values; this only absorbs rounding in hand-built factors.
_ORDER_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class SvdFactor:
    """A possibly one-sided factorization ``u @ diag(sigma) @ v.T``.

    Merges propagate only the side they need, so either ``u`` or ``v`` may be
    absent, never both. ``degenerate`` marks the rank-1 zero factor produced
    from an all-zero block.
    """
    sigma: np.ndarray
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    degenerate: bool = False

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=np.float64).reshape(-1)
        object.__setattr__(self, 'sigma', sigma)
        if sigma.size == 0:
            raise ContractViolation("sigma must be nonempty")
        if self.u is None and self.v is None:
            raise ContractViolation("a factor needs at least one of u, v")
        if np.any(sigma < 0):
            raise ContractViolation("singular values must be nonnegative")
        if np.any(np.diff(sigma) > _ORDER_SLACK * max(sigma[0], 1.0)):
            raise ContractViolation("singular values must be nonincreasing")
        for name in ('u', 'v'):
            side = getattr(self, name)
            if side is not None and (side.ndim != 2 or side.shape[1] != sigma.size):
                raise ContractViolation(
                    f"{name} has shape {side.shape}, expected {sigma.size} columns"
                )

    @property
    def rank(self) -> int:
        return self.sigma.size

    @property
    def shape(self):
        if self.u is None or self.v is None:
            raise ContractViolation("shape needs both u and v")
        return self.u.shape[0], self.v.shape[0]

    def leading(self, k: int) -> 'SvdFactor':
        """First ``k`` singular triplets."""
        if not 1 <= k <= self.rank:
            raise ContractViolation(f"cannot take {k} of {self.rank} singular triplets")
        return SvdFactor(
            sigma=self.sigma[:k],
            u=None if self.u is None else self.u[:, :k],
            v=None if self.v is None else self.v[:, :k],
            degenerate=self.degenerate,
        )

    def without_u(self) -> 'SvdFactor':
        return replace(self, u=None)

    def without_v(self) -> 'SvdFactor':
        return replace(self, v=None)

    def transpose(self) -> 'SvdFactor':
        return replace(self, u=self.v, v=self.u)

    def __repr__(self):
        sides = ''.join(name for name in ('u', 'v') if getattr(self, name) is not None)
        return f'<SvdFactor rank={self.rank} sides="{sides}" sigma1={self.sigma[0]:.6g}>'
