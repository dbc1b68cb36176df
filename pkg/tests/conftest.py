import numpy as np
import pytest

from hsvd.config import Config
from hsvd.datagen import SpectrumKind, SpectrumSpec, gen_low_rank
from hsvd.kernels import qr_thin


class TestConfig(Config):
    __test__ = False

    LOG_LEVEL = 'WARNING'
    ROW_BLOCK = 0
    COL_BLOCK = 16
    BENCH_REPEATS = 1
    WORKERS = 1
    MAX_RANK = None
    KERNEL_THREADS = {'OMP_NUM_THREADS': '1', 'OPENBLAS_NUM_THREADS': '1', 'MKL_NUM_THREADS': '1'}


def orthonormal(rng, rows, cols):
    q, _ = qr_thin(rng.standard_normal((rows, cols)))
    return q


def decreasing(rng, size, low=0.1, high=10.0):
    return np.sort(rng.uniform(low, high, size))[::-1]


def sharp_decay(m, n, seed=3, rank=25, ratio=0.7, noise_floor=1e-6):
    """Fast-decaying spectrum standing in for the velocity snapshots."""
    spec = SpectrumSpec(kind=SpectrumKind.EXPONENTIAL, rank=rank, ratio=ratio,
                        noise_floor=noise_floor, seed=seed)
    return gen_low_rank(m, n, spec)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def test_config():
    return TestConfig


@pytest.fixture(scope='module')
def velocity_like():
    return sharp_decay(1024, 128)
