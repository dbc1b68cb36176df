import logging
from typing import Optional

import numpy as np

from hsvd.errors import ContractViolation, UndefinedMetricError
from hsvd.kernels import frobenius_norm, full_svd
from hsvd.models.factor import SvdFactor

logger = logging.getLogger(__name__)


def truncate_factor(f: SvdFactor, gamma: float, max_rank: Optional[int] = None) -> SvdFactor:
    """Keep the leading triplets with ``sigma_i >= gamma * sigma_1``.

    ``sigma_1`` is the factor's own largest value. Ties at the threshold are
    kept; ``max_rank`` caps the result afterwards. An all-zero spectrum gives
    a rank-1 zero factor flagged as degenerate.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ContractViolation(f"gamma must lie in [0, 1], got {gamma}")
    if max_rank is not None and max_rank < 1:
        raise ContractViolation(f"max_rank must be >= 1, got {max_rank}")
    sigma1 = f.sigma[0]
    if sigma1 <= 0.0:
        zero = f.leading(1)
        return SvdFactor(sigma=np.zeros(1), u=zero.u, v=zero.v, degenerate=True)
    keep = int(np.count_nonzero(f.sigma >= gamma * sigma1))
    if max_rank is not None:
        keep = min(keep, max_rank)
    if keep == f.rank:
        return f
    return f.leading(keep)


def reconstruct(f: SvdFactor):
    if f.u is None or f.v is None:
        raise ContractViolation("reconstruct needs both u and v")
    return (f.u * f.sigma) @ f.v.T


def rank_k_error(x, approx: SvdFactor, k: int, reference: Optional[SvdFactor] = None) -> float:
    """Relative Frobenius distance between the rank-``k`` truncations of the
    full SVD of ``x`` and of ``approx``.

    ``reference`` may carry a precomputed ``full_svd(x)``.
    """
    if approx.u is None or approx.v is None:
        raise ContractViolation("rank_k_error needs an approximation with u and v")
    if not 1 <= k <= approx.rank:
        raise ContractViolation(f"k={k} outside 1..{approx.rank}")
    if reference is None:
        reference = full_svd(x)
    x_k = reconstruct(reference.leading(min(k, reference.rank)))
    norm = frobenius_norm(x_k)
    if norm == 0.0:
        raise UndefinedMetricError(f"rank-{k} truncation of the reference is zero")
    return frobenius_norm(x_k - reconstruct(approx.leading(k))) / norm


def singular_vector_cosines(reference: SvdFactor, approx: SvdFactor, k: int):
    """|cos| of the angle between matching left singular vectors, 1..k."""
    if reference.u is None or approx.u is None:
        raise ContractViolation("cosines need left singular vectors on both factors")
    k = min(k, reference.rank, approx.rank)
    return np.abs(np.einsum('ij,ij->j', reference.u[:, :k], approx.u[:, :k]))
