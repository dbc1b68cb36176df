import numpy as np
import pytest
from scipy.linalg import subspace_angles

from conftest import decreasing, orthonormal
from hsvd.errors import ContractViolation
from hsvd.kernels import full_svd, orthonormality_defect
from hsvd.merge import MergeOrientation, merge_pair_naive, merge_pair_qr
from hsvd.models.factor import SvdFactor

COLUMN = MergeOrientation.COLUMN_CONCAT
ROW = MergeOrientation.ROW_CONCAT


def left(sigma, u):
    return SvdFactor(sigma=sigma, u=u)


def right(sigma, v):
    return SvdFactor(sigma=sigma, v=v)


def basis_of(f, orient):
    return f.u if orient is COLUMN else f.v


def random_pair(rng, orient, m, k, l):
    make = left if orient is COLUMN else right
    return (make(decreasing(rng, k), orthonormal(rng, m, k)),
            make(decreasing(rng, l), orthonormal(rng, m, l)))


class TestNaiveMerge:

    def test_repeated_column(self):
        e1 = np.eye(4)[:, :1]
        f = merge_pair_naive(left([1.0], e1), left([1.0], e1), COLUMN, 0.0)
        np.testing.assert_allclose(f.sigma, [np.sqrt(2.0)])
        np.testing.assert_allclose(np.abs(f.u), e1, atol=1e-15)
        assert f.v is None

    def test_orthogonal_directions(self):
        e = np.eye(4)
        f = merge_pair_naive(left([1.0], e[:, :1]), left([1.0], e[:, 1:2]), COLUMN, 0.0)
        np.testing.assert_allclose(f.sigma, [1.0, 1.0])

    def test_matches_concatenation(self, rng):
        x1, x2 = rng.standard_normal((20, 6)), rng.standard_normal((20, 6))
        f = merge_pair_naive(full_svd(x1).without_v(), full_svd(x2).without_v(), COLUMN, 0.0)
        expected = full_svd(np.hstack((x1, x2))).sigma
        np.testing.assert_allclose(f.sigma, expected, rtol=0, atol=1e-10 * expected[0])

    def test_row_merge_matches_stacking(self, rng):
        x1, x2 = rng.standard_normal((5, 12)), rng.standard_normal((4, 12))
        f = merge_pair_naive(full_svd(x1).without_u(), full_svd(x2).without_u(), ROW, 0.0)
        expected = full_svd(np.vstack((x1, x2)))
        assert f.u is None
        np.testing.assert_allclose(f.sigma, expected.sigma, rtol=0, atol=1e-10 * expected.sigma[0])
        assert subspace_angles(f.v, expected.v).max() < 1e-8

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ContractViolation):
            merge_pair_naive(left([1.0], orthonormal(rng, 5, 1)), left([1.0], orthonormal(rng, 6, 1)), COLUMN, 0.0)

    def test_missing_side(self, rng):
        with pytest.raises(ContractViolation):
            merge_pair_naive(right([1.0], orthonormal(rng, 5, 1)), right([1.0], orthonormal(rng, 5, 1)), COLUMN, 0.0)


class TestQrMerge:

    def test_identical_subspace(self, rng):
        u1 = orthonormal(rng, 30, 4)
        f1 = left([4.0, 3.0, 2.0, 1.0], u1)
        f2 = left([1.0, 0.5, 0.25, 0.1], u1)
        fast = merge_pair_qr(f1, f2, COLUMN, 0.0)
        naive = merge_pair_naive(f1, f2, COLUMN, 0.0)
        assert fast.rank <= 4
        np.testing.assert_allclose(fast.sigma, naive.sigma, rtol=0, atol=1e-10 * naive.sigma[0])
        assert orthonormality_defect(fast.u) < 1e-8

    def test_orthogonal_subspaces_give_union(self, rng):
        q = orthonormal(rng, 30, 7)
        s1, s2 = [5.0, 2.0, 0.5], [3.0, 1.0, 0.7, 0.2]
        f = merge_pair_qr(left(s1, q[:, :3]), left(s2, q[:, 3:]), COLUMN, 0.0)
        np.testing.assert_allclose(f.sigma, sorted(s1 + s2, reverse=True), atol=1e-12)

    def test_nearly_nested_subspace_stays_orthonormal(self, rng):
        u1 = orthonormal(rng, 40, 5)
        tilt = u1 @ rng.standard_normal((5, 3)) + 1e-9 * rng.standard_normal((40, 3))
        u2 = np.linalg.qr(tilt)[0]
        f = merge_pair_qr(left(decreasing(rng, 5), u1), left(decreasing(rng, 3), u2), COLUMN, 0.0)
        assert orthonormality_defect(f.u) < 1e-8

    @pytest.mark.parametrize('orient', [COLUMN, ROW])
    def test_agrees_with_naive_merge(self, rng, orient):
        for _ in range(100):
            m = int(rng.integers(12, 51))
            k, l = (int(v) for v in rng.integers(1, 7, size=2))
            f1, f2 = random_pair(rng, orient, m, k, l)
            fast = merge_pair_qr(f1, f2, orient, 0.0)
            naive = merge_pair_naive(f1, f2, orient, 0.0)
            np.testing.assert_allclose(fast.sigma, naive.sigma, rtol=1e-9)
            assert subspace_angles(basis_of(fast, orient), basis_of(naive, orient)).max() < 1e-7

    def test_row_orientation_keeps_only_v(self, rng):
        f1, f2 = random_pair(rng, ROW, 20, 3, 2)
        f = merge_pair_qr(f1, f2, ROW, 0.0)
        assert f.u is None and f.v.shape == (20, 5)

    def test_falls_back_when_ranks_fill_dimension(self, rng):
        f1, f2 = random_pair(rng, COLUMN, 6, 4, 4)
        fast = merge_pair_qr(f1, f2, COLUMN, 0.0)
        naive = merge_pair_naive(f1, f2, COLUMN, 0.0)
        np.testing.assert_array_equal(fast.sigma, naive.sigma)

    def test_gamma_truncates_merged_block(self, rng):
        q = orthonormal(rng, 20, 4)
        f = merge_pair_qr(left([1.0, 1e-3], q[:, :2]), left([0.5, 1e-4], q[:, 2:]), COLUMN, 1e-2)
        np.testing.assert_allclose(f.sigma, [1.0, 0.5])


class TestMergeProperties:

    def test_output_orthonormal(self, rng):
        for _ in range(30):
            f1, f2 = random_pair(rng, COLUMN, 25, 4, 5)
            assert orthonormality_defect(merge_pair_qr(f1, f2, COLUMN, 0.0).u) < 1e-8

    def test_top_value_never_shrinks(self, rng):
        for _ in range(30):
            f1, f2 = random_pair(rng, COLUMN, 25, 3, 3)
            merged = merge_pair_qr(f1, f2, COLUMN, 0.1)
            assert merged.sigma[0] >= max(f1.sigma[0], f2.sigma[0]) - 1e-10

    def test_energy_is_additive(self, rng):
        x1, x2 = rng.standard_normal((20, 6)), rng.standard_normal((20, 6))
        f = merge_pair_qr(full_svd(x1).without_v(), full_svd(x2).without_v(), COLUMN, 0.0)
        energy = np.linalg.norm(x1) ** 2 + np.linalg.norm(x2) ** 2
        assert np.sum(f.sigma ** 2) == pytest.approx(energy, rel=1e-8)

    def test_commutative_up_to_order(self, rng):
        for _ in range(20):
            f1, f2 = random_pair(rng, COLUMN, 30, 4, 3)
            np.testing.assert_allclose(
                merge_pair_qr(f1, f2, COLUMN, 0.0).sigma,
                merge_pair_qr(f2, f1, COLUMN, 0.0).sigma,
                rtol=0, atol=1e-10 * f1.sigma[0],
            )
