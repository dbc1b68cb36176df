class HsvdError(Exception):
    """Base class for every error raised by hsvd."""


class ContractViolation(HsvdError, ValueError):
    """A precondition of an operation does not hold."""


class DecompositionError(HsvdError):
    """A LAPACK kernel failed to converge."""

    def __init__(self, shape, slice_index=None, reason=None):
        self.shape = tuple(shape)
        self.slice_index = slice_index
        self.reason = reason
        message = f"decomposition failed for {self.shape[0]}x{self.shape[1]} matrix"
        if slice_index is not None:
            message += f" in row slice {slice_index}"
        if reason:
            message += f": {reason}"
        super().__init__(message)

    def in_slice(self, slice_index):
        return DecompositionError(self.shape, slice_index=slice_index, reason=self.reason)


class UndefinedMetricError(HsvdError):
    """The relative error is undefined because the reference is zero."""


class MatrixFormatError(HsvdError):
    pass


class MatrixParseError(MatrixFormatError):

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class MatrixValidationError(HsvdError, ValueError):
    pass


class MatrixIOError(HsvdError):

    def __init__(self, path, cause):
        self.path = str(path)
        super().__init__(f"{self.path}: {cause}")
