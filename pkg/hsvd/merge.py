"""Pairwise merge-and-truncate of two one-sided factors.

A column merge combines the left factors of side-by-side blocks
``[X1 X2]``; a row merge combines the right factors of stacked blocks
``[X1; X2]``. The row case is the column case applied to ``v``, so both
paths below work on a generic orthonormal ``basis`` plus its ``sigma``.
"""
import logging
from enum import Enum
from typing import Optional

import numpy as np

from hsvd.errors import ContractViolation
from hsvd.factorization import truncate_factor
from hsvd.kernels import full_svd, qr_thin
from hsvd.models.factor import SvdFactor

logger = logging.getLogger(__name__)

# Merged singular values at or below this fraction of sigma_1 are numerically zero.
RANK_FLOOR = 1e-13
# Threshold on max |U_o^T U_1| that triggers one re-projection pass.
REORTH_TOL = 1e-8


class MergeOrientation(Enum):
    COLUMN_CONCAT = "column"
    ROW_CONCAT = "row"

    @property
    def side(self) -> str:
        return 'u' if self is MergeOrientation.COLUMN_CONCAT else 'v'


def _bases(f1: SvdFactor, f2: SvdFactor, orient: MergeOrientation):
    side = orient.side
    b1, b2 = getattr(f1, side), getattr(f2, side)
    if b1 is None or b2 is None:
        raise ContractViolation(f"{orient.value} merge needs '{side}' on both factors")
    if b1.shape[0] != b2.shape[0]:
        raise ContractViolation(
            f"{orient.value} merge dimension mismatch: {b1.shape[0]} vs {b2.shape[0]}"
        )
    return b1, b2


def _finish(basis, sigma, orient, gamma, max_rank):
    merged = SvdFactor(sigma=sigma, **{orient.side: basis})
    if sigma[0] > 0.0:
        numerical = max(1, int(np.count_nonzero(sigma > RANK_FLOOR * sigma[0])))
        if numerical < merged.rank:
            merged = merged.leading(numerical)
    return truncate_factor(merged, gamma, max_rank)


def merge_pair_naive(f1: SvdFactor, f2: SvdFactor, orient: MergeOrientation,
                     gamma: float, max_rank: Optional[int] = None) -> SvdFactor:
    """Merge by a full SVD of ``[B1 S1 | B2 S2]``; the reference path."""
    b1, b2 = _bases(f1, f2, orient)
    stacked = np.hstack((b1 * f1.sigma, b2 * f2.sigma))
    merged = full_svd(stacked)
    return _finish(merged.u, merged.sigma, orient, gamma, max_rank)


def merge_pair_qr(f1: SvdFactor, f2: SvdFactor, orient: MergeOrientation,
                  gamma: float, max_rank: Optional[int] = None) -> SvdFactor:
    """Merge through the orthogonal complement of ``B2`` against ``B1``.

    With ``W = B1ᵀB2`` and ``B2 − B1 W = B_o R`` the concatenation equals
    ``[B1 B_o] E`` for the small ``E = [[S1, W S2], [0, R S2]]``, so only
    ``E`` needs an SVD.
    """
    b1, b2 = _bases(f1, f2, orient)
    k, l = b1.shape[1], b2.shape[1]
    if k + l > b1.shape[0]:
        logger.debug(f"k+l={k + l} exceeds dimension {b1.shape[0]}, using stacked merge")
        return merge_pair_naive(f1, f2, orient, gamma, max_rank)

    w = b1.T @ b2
    b_o, r = qr_thin(b2 - b1 @ w)
    leak = b1.T @ b_o
    if np.max(np.abs(leak)) > REORTH_TOL:
        logger.debug(f"re-orthogonalizing complement, leak={np.max(np.abs(leak)):.3e}")
        b_o, r2 = qr_thin(b_o - b1 @ leak)
        w = w + leak @ r
        r = r2 @ r

    e = np.zeros((k + r.shape[0], k + l))
    e[:k, :k] = np.diag(f1.sigma)
    e[:k, k:] = w * f2.sigma
    e[k:, k:] = r * f2.sigma
    small = full_svd(e)
    basis = np.hstack((b1, b_o)) @ small.u
    return _finish(basis, small.sigma, orient, gamma, max_rank)
