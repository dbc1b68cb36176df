"""Block-partitioned SVD: slice, factor the leaves, merge up a binary tree."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from hsvd.errors import ContractViolation, DecompositionError
from hsvd.factorization import truncate_factor
from hsvd.kernels import full_svd, orthonormality_defect
from hsvd import merge as merge_ops
from hsvd.merge import MergeOrientation
from hsvd.models.config import MatConfig
from hsvd.models.factor import SvdFactor

logger = logging.getLogger(__name__)

ORTHONORMAL_TOL = 1e-6


def _slices(total: int, size: int) -> List[Tuple[int, int]]:
    count = math.ceil(total / size)
    return [(start, min(size, total - start)) for start in range(0, count * size, size)]


@dataclass(frozen=True)
class BlockPlan:
    row_slices: List[Tuple[int, int]]
    col_slices: List[Tuple[int, int]]

    @classmethod
    def for_shape(cls, m: int, n: int, d: int, c: int) -> 'BlockPlan':
        if d < 1 or c < 1:
            raise ContractViolation(f"block size must be >= 1, got ({d}, {c})")
        return cls(row_slices=_slices(m, d), col_slices=_slices(n, c))

    @property
    def grid(self) -> Tuple[int, int]:
        return len(self.row_slices), len(self.col_slices)


def _map(executor, fn, items):
    if executor is None:
        return [fn(item) for item in items]
    return list(executor.map(fn, items))


def tree_merge(factors: List[SvdFactor], orient: MergeOrientation, gamma: float,
               max_rank: Optional[int] = None, executor=None,
               merge: Optional[Callable] = None) -> SvdFactor:
    """Reduce ``factors`` pairwise, (0,1), (2,3), ..., until one remains.

    An odd trailing factor moves up a level unmerged, so exactly
    ``len(factors) - 1`` merges run. Merges of one level may run on
    ``executor``; the pairing never depends on it.
    """
    if not factors:
        raise ContractViolation("tree_merge needs at least one factor")
    merge = merge or merge_ops.merge_pair_qr
    level = list(factors)
    depth = 0
    while len(level) > 1:
        pairs = [(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        merged = _map(executor, lambda pair: merge(pair[0], pair[1], orient, gamma, max_rank), pairs)
        if len(level) % 2:
            merged.append(level[-1])
        depth += 1
        logger.debug(
            f"{orient.value} merge level {depth}: {len(level)} -> {len(merged)} factors, "
            f"ranks {[f.rank for f in merged]}"
        )
        level = merged
    return level[0]


def svd_of_col_slices(x_slice, c: int, gamma: float, max_rank: Optional[int] = None,
                      executor=None) -> SvdFactor:
    """Left factor and singular values of one row slice, merged column-wise."""
    if c < 1:
        raise ContractViolation(f"column block size must be >= 1, got {c}")
    blocks = [x_slice[:, start:start + count] for start, count in _slices(x_slice.shape[1], c)]

    def leaf(block):
        return truncate_factor(full_svd(block), gamma, max_rank).without_v()

    leaves = _map(executor, leaf, blocks)
    return tree_merge(leaves, MergeOrientation.COLUMN_CONCAT, gamma, max_rank, executor)


def hierarchical_svd(x, cfg: MatConfig) -> SvdFactor:
    """Approximate singular values and right singular vectors of ``x``.

    Each row slice is merged column-wise to ``(U_j, S_j)``; its right factor
    comes from the SVD of ``U_jᵀ X_j``, whose values replace ``S_j``. The
    per-slice ``(S_j, V_j)`` are then merged row-wise.
    """
    m, n = x.shape
    d, c = cfg.blocks_for(m, n)
    plan = BlockPlan.for_shape(m, n, d, c)
    logger.info(
        f"hierarchical SVD of {m}x{n} with blocks ({d}, {c}), "
        f"grid {plan.grid[0]}x{plan.grid[1]}, gamma={cfg.gamma}"
    )
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else nullcontext()
    with pool as executor:
        row_factors = []
        for index, (start, count) in enumerate(plan.row_slices):
            x_j = x[start:start + count]
            try:
                u_j = svd_of_col_slices(x_j, c, cfg.gamma, cfg.max_rank, executor)
                recovered = full_svd(u_j.u.T @ x_j)
            except DecompositionError as e:
                logger.error(f"row slice {index} failed: {e}")
                raise e.in_slice(index) from e
            row_factors.append(truncate_factor(recovered, cfg.gamma, cfg.max_rank).without_u())
        result = tree_merge(row_factors, MergeOrientation.ROW_CONCAT, cfg.gamma, cfg.max_rank, executor)
    logger.info(f"hierarchical SVD recovered rank {result.rank}")
    return result


def recover_left_vectors(x, v_r) -> SvdFactor:
    """Exact SVD of the projection ``x v_r v_rᵀ``."""
    if v_r.ndim != 2 or v_r.shape[0] != x.shape[1]:
        raise ContractViolation(f"v_r of shape {v_r.shape} does not match {x.shape[1]} columns")
    defect = orthonormality_defect(v_r)
    if defect > ORTHONORMAL_TOL:
        raise ContractViolation(f"v_r columns are not orthonormal (defect {defect:.3e})")
    projected = full_svd(x @ v_r)
    return SvdFactor(sigma=projected.sigma, u=projected.u, v=v_r @ projected.v)


def mat_svd(x, cfg: MatConfig, full_factors: bool = True) -> SvdFactor:
    """``hierarchical_svd`` completed into ``(U, S, V)`` unless told otherwise."""
    partial = hierarchical_svd(x, cfg)
    if not full_factors:
        return partial
    return recover_left_vectors(x, partial.v)
