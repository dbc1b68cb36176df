import os

from dotenv import load_dotenv

basedir = os.path.abspath(os.path.dirname(__file__))
load_dotenv(os.path.join(basedir, os.pardir, '.env'))


def _optional_int(name):
    value = os.environ.get(name)
    return int(value) if value else None


class Config:
    GAMMA = float(os.environ.get('HSVD_GAMMA') or 1e-2)
    EPSILON = float(os.environ.get('HSVD_EPSILON') or 1e-3)
    MAX_ITERS = int(os.environ.get('HSVD_MAX_ITERS') or 10)
    # 0 means the whole dimension
    ROW_BLOCK = int(os.environ.get('HSVD_ROW_BLOCK') or 0)
    COL_BLOCK = int(os.environ.get('HSVD_COL_BLOCK') or 16)
    MAX_RANK = _optional_int('HSVD_MAX_RANK')
    WORKERS = int(os.environ.get('HSVD_WORKERS') or 1)
    BENCH_REPEATS = int(os.environ.get('HSVD_BENCH_REPEATS') or 5)
    LOG_LEVEL = os.environ.get('HSVD_LOG_LEVEL') or 'INFO'
    KERNEL_THREADS = {
        name: os.environ.get(name)
        for name in ('OMP_NUM_THREADS', 'OPENBLAS_NUM_THREADS', 'MKL_NUM_THREADS')
    }
