"""Idealized single-level flop model for a column partition of a matrix.

Blocks are uniform with ``s = n/P`` columns and every merge keeps rank
``k``; ``s`` may be fractional. This predicts cost, it does not time
anything.
"""
import math

from hsvd.errors import ContractViolation
from hsvd.models.cost import CostEstimate


def flops_full_svd(m: int, n: int) -> float:
    if not m >= n >= 1:
        raise ContractViolation(f"expected m >= n >= 1, got ({m}, {n})")
    return float(6 * m * n ** 2 + 16 * n ** 3)


def flops_mat_partition(m: int, n: int, P: int, k: int) -> float:
    if P < 1:
        raise ContractViolation(f"P must be >= 1, got {P}")
    s = n / P
    if s < 1:
        raise ContractViolation(f"s = n/P = {s} is below one column")
    if k > s:
        raise ContractViolation(f"k={k} exceeds s={s}")
    leaves = P * (6 * m * s ** 2 + 16 * s ** 3)
    merges = (P - 1) * (14 * m * k ** 2 + 176 * k ** 3)
    return float(leaves + merges)


def speedup_bound(m: int, n: int, P: int) -> float:
    if P < 1:
        raise ContractViolation(f"P must be >= 1, got {P}")
    return 20 * m * n ** 2 / P + 192 * n ** 3 / P ** 2


def estimate_cost(m: int, n: int, c: int, k: int) -> CostEstimate:
    """Model for blocks of ``c`` columns and retained rank ``k``.

    The partition is always over the ``n`` columns the pipeline splits, so
    ``P`` matches the column grid of the run; only the full-SVD baseline
    of a wide matrix is taken on its transpose. ``k`` is clamped to ``s``.
    """
    P = max(1, min(math.ceil(n / max(1, c)), n))
    s = n / P
    k = max(1, min(k, math.floor(s)))
    return CostEstimate(
        flops_full=flops_full_svd(max(m, n), min(m, n)),
        flops_mat=flops_mat_partition(m, n, P, k),
        bound=speedup_bound(m, n, P),
        P=P,
        s=s,
        k=k,
    )
