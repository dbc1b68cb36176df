from dataclasses import dataclass, replace
from typing import Optional

from hsvd.config import Config
from hsvd.errors import ContractViolation


@dataclass(frozen=True)
class MatConfig:
    """Parameters of the merge-and-truncate pipeline.

    ``row_block_rows`` (d) and ``col_block_cols`` (c) are block sizes, not
    block counts; the plan uses ceil(m/d) row slices and ceil(n/c) column
    slices. Left at ``None`` a block spans the whole dimension.
    """
    gamma: float = 1e-2
    row_block_rows: Optional[int] = None
    col_block_cols: Optional[int] = None
    epsilon: float = 1e-3
    max_iters: int = 10
    max_rank: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ContractViolation(f"gamma must lie in [0, 1], got {self.gamma}")
        if not self.epsilon > 0:
            raise ContractViolation(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise ContractViolation(f"max_iters must be >= 1, got {self.max_iters}")
        if any(size is not None and size < 1 for size in (self.row_block_rows, self.col_block_cols)):
            raise ContractViolation(
                f"block size must be >= 1, got ({self.row_block_rows}, {self.col_block_cols})"
            )
        if self.max_rank is not None and self.max_rank < 1:
            raise ContractViolation(f"max_rank must be >= 1, got {self.max_rank}")
        if self.workers < 1:
            raise ContractViolation(f"workers must be >= 1, got {self.workers}")

    @classmethod
    def from_config(cls, shape, config_class=Config, **overrides):
        """Defaults from ``config_class`` for an ``m x n`` matrix.

        A zero block size in the config means the whole dimension; ``None``
        overrides are ignored so CLI flags can be passed through unchanged.
        """
        m, n = shape
        values = dict(
            gamma=config_class.GAMMA,
            row_block_rows=min(config_class.ROW_BLOCK or m, m),
            col_block_cols=min(config_class.COL_BLOCK or n, n),
            epsilon=config_class.EPSILON,
            max_iters=config_class.MAX_ITERS,
            max_rank=config_class.MAX_RANK,
            workers=config_class.WORKERS,
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def with_blocks(self, d, c):
        return replace(self, row_block_rows=d, col_block_cols=c)

    def blocks_for(self, m: int, n: int):
        """``(d, c)`` for an ``m x n`` matrix, whole dimensions filled in."""
        return self.row_block_rows or m, self.col_block_cols or n
