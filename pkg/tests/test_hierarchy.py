import numpy as np
import pytest
from scipy.linalg import subspace_angles

from conftest import decreasing, orthonormal, sharp_decay
from hsvd import hierarchy
from hsvd.errors import ContractViolation, DecompositionError
from hsvd.factorization import reconstruct, truncate_factor
from hsvd.hierarchy import (BlockPlan, hierarchical_svd, mat_svd, recover_left_vectors,
                            svd_of_col_slices, tree_merge)
from hsvd.kernels import full_svd, normalize_signs, orthonormality_defect
from hsvd.merge import MergeOrientation
from hsvd.models.config import MatConfig
from hsvd.models.factor import SvdFactor

COLUMN = MergeOrientation.COLUMN_CONCAT


def low_rank(rng, m, n, r):
    return (orthonormal(rng, m, r) * decreasing(rng, r)) @ orthonormal(rng, n, r).T


class TestBlockPlan:

    def test_ragged_last_block(self):
        plan = BlockPlan.for_shape(10, 7, 4, 3)
        assert plan.row_slices == [(0, 4), (4, 4), (8, 2)]
        assert plan.col_slices == [(0, 3), (3, 3), (6, 1)]
        assert plan.grid == (3, 3)

    def test_oversized_blocks_give_one_slice(self):
        assert BlockPlan.for_shape(5, 5, 100, 100).grid == (1, 1)

    def test_zero_block_rejected(self):
        with pytest.raises(ContractViolation):
            BlockPlan.for_shape(5, 5, 0, 2)


class TestTreeMerge:

    @pytest.fixture
    def merge_log(self, monkeypatch):
        calls = []

        def fake_merge(f1, f2, orient, gamma, max_rank=None):
            calls.append((f1.sigma[0], f2.sigma[0]))
            return SvdFactor(sigma=[f1.sigma[0] + f2.sigma[0]], u=f1.u)

        monkeypatch.setattr('hsvd.merge.merge_pair_qr', fake_merge)
        return calls

    @staticmethod
    def tagged(values):
        return [SvdFactor(sigma=[v], u=np.eye(3)[:, :1]) for v in values]

    def test_single_factor_is_returned(self, merge_log):
        f = self.tagged([1.0])[0]
        assert tree_merge([f], COLUMN, 0.0) is f
        assert merge_log == []

    def test_three_factors_carry_the_last(self, merge_log):
        result = tree_merge(self.tagged([1.0, 2.0, 4.0]), COLUMN, 0.0)
        assert merge_log == [(1.0, 2.0), (3.0, 4.0)]
        assert result.sigma[0] == 7.0

    @pytest.mark.parametrize('count', [2, 5, 8, 13])
    def test_merge_count(self, merge_log, count):
        tree_merge(self.tagged(range(1, count + 1)), COLUMN, 0.0)
        assert len(merge_log) == count - 1

    def test_empty_rejected(self):
        with pytest.raises(ContractViolation):
            tree_merge([], COLUMN, 0.0)

    def test_column_blocks_match_full_svd(self, rng):
        x = rng.standard_normal((40, 64))
        leaves = [full_svd(x[:, i:i + 8]).without_v() for i in range(0, 64, 8)]
        merged = tree_merge(leaves, COLUMN, 0.0)
        expected = full_svd(x).sigma
        np.testing.assert_allclose(merged.sigma, expected, rtol=0, atol=1e-9 * expected[0])


class TestColumnSlices:

    def test_one_slice(self, rng):
        x = rng.standard_normal((12, 5))
        f = svd_of_col_slices(x, 5, 1e-3)
        expected = truncate_factor(full_svd(x), 1e-3)
        np.testing.assert_array_equal(f.sigma, expected.sigma)
        assert f.v is None

    def test_rank_two(self, rng):
        x = low_rank(rng, 16, 8, 2)
        f = svd_of_col_slices(x, 2, 1e-6)
        np.testing.assert_allclose(f.sigma[:2], full_svd(x).sigma[:2], rtol=1e-8)

    def test_zero_slice(self):
        f = svd_of_col_slices(np.zeros((6, 4)), 2, 1e-2)
        assert f.rank == 1 and f.sigma[0] == 0.0
        assert f.degenerate


class TestHierarchicalSvd:

    def test_single_block(self, rng):
        x = rng.standard_normal((30, 10))
        f = hierarchical_svd(x, MatConfig(gamma=1e-3, row_block_rows=30, col_block_cols=10))
        expected = truncate_factor(full_svd(x), 1e-3)
        assert f.u is None
        np.testing.assert_allclose(f.sigma, expected.sigma, rtol=1e-12)
        assert subspace_angles(f.v, expected.v).max() < 1e-8

    def test_default_blocks_span_matrix(self, rng):
        x = rng.standard_normal((30, 10))
        assert MatConfig().blocks_for(30, 10) == (30, 10)
        assert MatConfig(col_block_cols=4).blocks_for(30, 10) == (30, 4)
        default = hierarchical_svd(x, MatConfig(gamma=1e-3))
        single = hierarchical_svd(x, MatConfig(gamma=1e-3, row_block_rows=30, col_block_cols=10))
        np.testing.assert_array_equal(default.sigma, single.sigma)

    def test_zero_block_size_rejected(self):
        with pytest.raises(ContractViolation):
            MatConfig(row_block_rows=0)

    def test_exact_low_rank(self):
        x, true_sigma = sharp_decay(256, 64, seed=5, rank=10, ratio=0.6, noise_floor=0.0)
        f = hierarchical_svd(x, MatConfig(gamma=1e-8, row_block_rows=64, col_block_cols=16))
        assert f.rank == 10
        np.testing.assert_allclose(f.sigma, true_sigma[:10], rtol=1e-7)

    def test_exact_without_truncation(self, rng):
        for _ in range(20):
            n = int(rng.integers(16, 65))
            m = int(rng.integers(n, 201))
            x = rng.standard_normal((m, n))
            expected = full_svd(x).sigma
            for d, c in ((m, n), (m // 2, n // 2), (max(1, m // 4), max(1, n // 8)), (64, 8)):
                cfg = MatConfig(gamma=1e-12, row_block_rows=min(d, m), col_block_cols=min(c, n))
                f = mat_svd(x, cfg)
                np.testing.assert_allclose(f.sigma, expected, rtol=1e-8, atol=1e-8 * expected[0])
                assert np.linalg.norm(reconstruct(f) - x) <= 1e-8 * np.linalg.norm(x)

    def test_block_plan_does_not_change_exact_result(self, rng):
        x = low_rank(rng, 120, 40, 6)
        spectra = [
            hierarchical_svd(x, MatConfig(gamma=1e-10, row_block_rows=d, col_block_cols=c)).sigma
            for d, c in ((120, 40), (60, 10), (30, 5), (17, 7))
        ]
        for sigma in spectra[1:]:
            np.testing.assert_allclose(sigma[:6], spectra[0][:6], rtol=1e-9)

    def test_values_never_exceed_full_svd(self):
        x, _ = sharp_decay(512, 96, seed=8)
        expected = full_svd(x).sigma
        f = hierarchical_svd(x, MatConfig(gamma=1e-2, row_block_rows=128, col_block_cols=16))
        assert np.all(f.sigma <= expected[:f.rank] * (1 + 1e-10))

    def test_parallel_matches_serial(self):
        x, _ = sharp_decay(256, 64, seed=9)
        serial = hierarchical_svd(x, MatConfig(gamma=1e-2, row_block_rows=64, col_block_cols=8))
        parallel = hierarchical_svd(x, MatConfig(gamma=1e-2, row_block_rows=64, col_block_cols=8, workers=4))
        np.testing.assert_allclose(parallel.sigma, serial.sigma, rtol=1e-12)
        assert subspace_angles(parallel.v, serial.v).max() < 1e-8

    def test_max_rank_caps_result(self, rng):
        x = rng.standard_normal((60, 20))
        f = hierarchical_svd(x, MatConfig(gamma=0.0, row_block_rows=20, col_block_cols=5, max_rank=3))
        assert f.rank == 3

    def test_failing_slice_is_reported(self, rng, monkeypatch):
        x = rng.standard_normal((40, 8))
        x[25, 3] = 99.0
        real_svd = hierarchy.full_svd

        def flaky_svd(a):
            if np.any(a == 99.0):
                raise DecompositionError(a.shape, reason='no convergence')
            return real_svd(a)

        monkeypatch.setattr('hsvd.hierarchy.full_svd', flaky_svd)
        with pytest.raises(DecompositionError) as exc:
            hierarchical_svd(x, MatConfig(gamma=0.0, row_block_rows=10, col_block_cols=4))
        assert exc.value.slice_index == 2
        assert 'row slice 2' in str(exc.value)


class TestRecoverLeftVectors:

    def test_exact_subspace(self, rng):
        x = rng.standard_normal((30, 12))
        expected = normalize_signs(full_svd(x).leading(5))
        f = normalize_signs(recover_left_vectors(x, expected.v))
        np.testing.assert_allclose(f.sigma, expected.sigma, rtol=1e-12)
        np.testing.assert_allclose(f.u, expected.u, atol=1e-9)
        np.testing.assert_allclose(f.v, expected.v, atol=1e-9)

    def test_identity_projection(self, rng):
        x = rng.standard_normal((9, 9))
        f = recover_left_vectors(x, np.eye(9))
        np.testing.assert_allclose(f.sigma, full_svd(x).sigma, rtol=1e-12)

    def test_reconstructs_projection(self, rng):
        x = rng.standard_normal((50, 20))
        v_r = hierarchical_svd(x, MatConfig(gamma=0.2, row_block_rows=25, col_block_cols=5)).v
        f = recover_left_vectors(x, v_r)
        assert orthonormality_defect(f.u) < 1e-10
        residual = np.linalg.norm(reconstruct(f) - x @ v_r @ v_r.T)
        assert residual <= 1e-10 * np.linalg.norm(x)

    def test_rejects_non_orthonormal(self, rng):
        with pytest.raises(ContractViolation):
            recover_left_vectors(rng.standard_normal((10, 4)), rng.standard_normal((4, 2)))

    def test_rejects_wrong_rows(self, rng):
        with pytest.raises(ContractViolation):
            recover_left_vectors(rng.standard_normal((10, 4)), orthonormal(rng, 5, 2))


def test_mat_svd_partial(rng):
    x = rng.standard_normal((20, 6))
    assert mat_svd(x, MatConfig(gamma=0.0, row_block_rows=10, col_block_cols=3), full_factors=False).u is None
