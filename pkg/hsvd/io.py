"""Matrix files: headerless CSV and the HSVD1 binary layout.

HSVD1 is little-endian: 6-byte magic ``HSVD1\\0``, rows and cols as
unsigned 64-bit integers, then ``rows * cols`` float64 values row-major.
"""
import csv
import logging
import struct
from enum import Enum
from pathlib import Path

import numpy as np

from hsvd.errors import MatrixFormatError, MatrixIOError, MatrixParseError
from hsvd.models.matrix import as_dense

logger = logging.getLogger(__name__)

MAGIC = b'HSVD1\x00'
_DIMS = struct.Struct('<QQ')
HEADER_SIZE = len(MAGIC) + _DIMS.size


class MatrixFormat(Enum):
    CSV = "csv"
    HSVD_BINARY = "hsvd-binary"

    @classmethod
    def infer(cls, path) -> 'MatrixFormat':
        return cls.CSV if Path(path).suffix.lower() == '.csv' else cls.HSVD_BINARY


def _coerce(fmt, path):
    if fmt is None:
        return MatrixFormat.infer(path)
    try:
        return MatrixFormat(fmt)
    except ValueError:
        raise MatrixFormatError(f"unknown matrix format '{fmt}'") from None


def load_matrix(path, fmt=None):
    """Read a matrix; ``fmt`` defaults to the file extension's format."""
    fmt = _coerce(fmt, path)
    try:
        if fmt is MatrixFormat.CSV:
            with open(path, encoding='utf-8', newline='') as f:
                matrix = _read_csv(f)
        else:
            matrix = _read_binary(Path(path).read_bytes())
    except UnicodeDecodeError as e:
        raise MatrixFormatError(f"{path}: not UTF-8 CSV text ({e.reason})") from None
    except OSError as e:
        raise MatrixIOError(path, e) from e
    logger.info(f"loaded {matrix.shape[0]}x{matrix.shape[1]} matrix from {path}")
    return matrix


def save_matrix(x, path, fmt=None) -> None:
    fmt = _coerce(fmt, path)
    try:
        if fmt is MatrixFormat.CSV:
            with open(path, 'w', newline='') as f:
                writer = csv.writer(f, lineterminator='\n')
                # repr() is the shortest decimal that round-trips
                writer.writerows([repr(float(value)) for value in row] for row in x)
        else:
            rows, cols = x.shape
            with open(path, 'wb') as f:
                f.write(MAGIC)
                f.write(_DIMS.pack(rows, cols))
                f.write(np.ascontiguousarray(x, dtype='<f8').tobytes())
    except OSError as e:
        raise MatrixIOError(path, e) from e
    logger.debug(f"saved {x.shape[0]}x{x.shape[1]} matrix to {path}")


def _read_csv(f):
    rows = []
    width = None
    reader = csv.reader(f)
    try:
        records = list(reader)
    except csv.Error as e:
        raise MatrixParseError(reader.line_num, str(e)) from None
    for line, record in enumerate(records, start=1):
        if not record:
            continue
        try:
            values = [float(field) for field in record]
        except ValueError as e:
            raise MatrixParseError(line, str(e)) from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise MatrixParseError(line, f"expected {width} values, found {len(values)}")
        rows.append(values)
    if not rows:
        raise MatrixFormatError("CSV file holds no rows")
    return as_dense(rows)


def _read_binary(payload: bytes):
    if len(payload) < HEADER_SIZE:
        raise MatrixFormatError(f"truncated header: {len(payload)} bytes")
    if payload[:len(MAGIC)] != MAGIC:
        raise MatrixFormatError("bad magic, not an HSVD1 file")
    rows, cols = _DIMS.unpack_from(payload, len(MAGIC))
    if rows == 0 or cols == 0:
        raise MatrixFormatError(f"empty {rows}x{cols} matrix")
    expected = HEADER_SIZE + 8 * rows * cols
    if len(payload) != expected:
        raise MatrixFormatError(f"expected {expected} bytes for {rows}x{cols}, found {len(payload)}")
    values = np.frombuffer(payload, dtype='<f8', offset=HEADER_SIZE)
    return as_dense(values.reshape(rows, cols))
