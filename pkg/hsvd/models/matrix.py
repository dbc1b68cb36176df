import numpy as np
import numpy.typing as npt

from hsvd.errors import ContractViolation, MatrixValidationError

# Read-only, C-contiguous (row-major) 2-D float64 array.
DenseMatrix = npt.NDArray[np.float64]


def as_dense(values, check_finite=True) -> DenseMatrix:
    """Copy ``values`` into an immutable row-major float64 matrix."""
    matrix = np.array(values, dtype=np.float64, order='C', copy=True)
    if matrix.ndim != 2:
        raise ContractViolation(f"expected a 2-D matrix, got {matrix.ndim} dimension(s)")
    if matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise ContractViolation(f"empty matrix {matrix.shape[0]}x{matrix.shape[1]}")
    if check_finite and not np.isfinite(matrix).all():
        bad = np.argwhere(~np.isfinite(matrix))[0]
        raise MatrixValidationError(f"non-finite entry at row {bad[0]}, col {bad[1]}")
    matrix.flags.writeable = False
    return matrix
