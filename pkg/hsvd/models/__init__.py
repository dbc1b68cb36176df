from hsvd.models.config import MatConfig
from hsvd.models.cost import CostEstimate
from hsvd.models.factor import SvdFactor
from hsvd.models.matrix import DenseMatrix, as_dense
from hsvd.models.report import BenchReport, GammaSweepRow, GridEntry, REPORT_SCHEMA, validate_report

__all__ = [
    'BenchReport', 'CostEstimate', 'DenseMatrix', 'GammaSweepRow', 'GridEntry',
    'MatConfig', 'REPORT_SCHEMA', 'SvdFactor', 'as_dense', 'validate_report',
]
