import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from hsvd.errors import ContractViolation
from hsvd.kernels import full_svd, orthonormality_defect
from hsvd.models.factor import SvdFactor

logger = logging.getLogger(__name__)

ORTHONORMAL_TOL = 1e-6


@dataclass(frozen=True)
class RefineResult:
    factor: SvdFactor
    iterations: int
    final_error: float
    converged: bool
    sigma1_history: List[float] = field(default_factory=list)


def sigma_change(previous, current) -> float:
    """‖prev − cur‖₂ / ‖prev‖₂ with the shorter vector zero-padded."""
    size = max(previous.size, current.size)
    a = np.zeros(size)
    b = np.zeros(size)
    a[:previous.size] = previous
    b[:current.size] = current
    numerator = float(np.linalg.norm(a - b))
    denominator = float(np.linalg.norm(a))
    if denominator == 0.0:
        return 0.0 if numerator == 0.0 else float('inf')
    return numerator / denominator


def refine_factors(x, v_hat, sigma_hat, epsilon: float, max_iters: int) -> RefineResult:
    """Subspace iteration on ``(v_hat, sigma_hat)`` against ``x``.

    Each pass takes the SVD of ``X V`` and then of ``U_iᵀ X``; ``V`` and
    ``sigma`` are replaced until the relative change in ``sigma`` drops to
    ``epsilon`` or ``max_iters`` passes have run. Hitting the cap is reported
    through ``converged``, not raised.
    """
    sigma_hat = np.asarray(sigma_hat, dtype=np.float64).reshape(-1)
    if epsilon <= 0:
        raise ContractViolation(f"epsilon must be positive, got {epsilon}")
    if max_iters < 1:
        raise ContractViolation(f"max_iters must be >= 1, got {max_iters}")
    if v_hat.ndim != 2 or v_hat.shape[0] != x.shape[1]:
        raise ContractViolation(f"v_hat of shape {v_hat.shape} does not match {x.shape[1]} columns")
    if sigma_hat.size != v_hat.shape[1]:
        raise ContractViolation(
            f"sigma_hat has {sigma_hat.size} values for {v_hat.shape[1]} vectors"
        )
    defect = orthonormality_defect(v_hat)
    if defect > ORTHONORMAL_TOL:
        raise ContractViolation(f"v_hat columns are not orthonormal (defect {defect:.3e})")

    v = v_hat
    history = []
    for iteration in range(1, max_iters + 1):
        left = full_svd(x @ v)
        inner = full_svd(left.u.T @ x)
        error = sigma_change(sigma_hat, inner.sigma)
        sigma_hat, v = inner.sigma, inner.v
        history.append(float(sigma_hat[0]))
        logger.debug(f"refinement pass {iteration}: sigma change {error:.3e}")
        if error <= epsilon:
            break

    converged = error <= epsilon
    if not converged:
        logger.warning(f"refinement stopped after {max_iters} passes with change {error:.3e} > {epsilon}")
    factor = SvdFactor(sigma=sigma_hat, u=left.u @ inner.u, v=v)
    return RefineResult(
        factor=factor, iterations=iteration, final_error=error,
        converged=converged, sigma1_history=history,
    )
