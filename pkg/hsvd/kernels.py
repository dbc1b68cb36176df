"""Dense kernels shared by every stage: thin SVD, thin QR and norms."""
import logging

import numpy as np
import scipy.linalg as la

from hsvd.errors import ContractViolation, DecompositionError
from hsvd.models.factor import SvdFactor

logger = logging.getLogger(__name__)


def full_svd(a) -> SvdFactor:
    """Thin SVD with ``p = min(rows, cols)`` triplets.

    Tries the divide-and-conquer driver first and falls back to the QR
    iteration driver, which converges on inputs where gesdd gives up.
    """
    if a.ndim != 2 or a.size == 0:
        raise ContractViolation(f"full_svd needs a nonempty 2-D matrix, got shape {a.shape}")
    try:
        u, s, vt = la.svd(a, full_matrices=False, lapack_driver='gesdd', check_finite=False)
    except la.LinAlgError as e:
        logger.warning(f"gesdd failed on {a.shape[0]}x{a.shape[1]} matrix, retrying with gesvd: {e}")
        try:
            u, s, vt = la.svd(a, full_matrices=False, lapack_driver='gesvd', check_finite=False)
        except la.LinAlgError as e2:
            raise DecompositionError(a.shape, reason=str(e2)) from e2
    return SvdFactor(sigma=s, u=u, v=vt.T)


def qr_thin(a):
    """Economic QR with a nonnegative diagonal in ``R``.

    ``Q`` is ``rows x p`` and ``R`` is ``p x cols`` (square when
    ``rows >= cols``).
    """
    if a.ndim != 2 or a.shape[0] < 1:
        raise ContractViolation(f"qr_thin needs at least one row, got shape {a.shape}")
    try:
        q, r = la.qr(a, mode='economic', check_finite=False)
    except la.LinAlgError as e:
        raise DecompositionError(a.shape, reason=str(e)) from e
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs, r * signs[:, None]


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(a))


def normalize_signs(f: SvdFactor) -> SvdFactor:
    """Flip each singular pair so the largest-magnitude entry of its left
    vector (or right vector, for a one-sided factor) is positive."""
    pivot = f.u if f.u is not None else f.v
    rows = np.argmax(np.abs(pivot), axis=0)
    signs = np.sign(pivot[rows, np.arange(pivot.shape[1])])
    signs[signs == 0] = 1.0
    return SvdFactor(
        sigma=f.sigma,
        u=None if f.u is None else f.u * signs,
        v=None if f.v is None else f.v * signs,
        degenerate=f.degenerate,
    )


def orthonormality_defect(basis) -> float:
    """max |BᵀB − I|"""
    gram = basis.T @ basis
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
