import numpy as np
import pytest
from scipy import stats

from lrpslab.linalg import (
    CovarianceSnapshot,
    RankDeficiencyError,
    gram_schmidt,
    sample_covariance,
    sample_unit_ball,
    sample_unit_sphere,
)


class TestCovariance:
    def test_three_points_by_hand(self):
        pts = [[0.0, 0.0], [2.0, 0.0], [1.0, 3.0]]
        # mean (1, 1); deviations (-1,-1), (1,-1), (0,2)
        expected = np.array([[2.0, 0.0], [0.0, 6.0]]) / 2
        snap = sample_covariance(pts)
        np.testing.assert_allclose(snap.matrix, expected)
        np.testing.assert_allclose(snap.eigenvalues, [3.0, 1.0])

    def test_matches_numpy_cov(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(50, 5))
        np.testing.assert_allclose(sample_covariance(pts).matrix, np.cov(pts, rowvar=False))

    def test_identity_exact(self):
        snap = CovarianceSnapshot.from_matrix(np.eye(4))
        np.testing.assert_array_equal(snap.eigenvalues, np.ones(4))
        np.testing.assert_allclose(snap.sqrt_map, np.eye(4), atol=1e-15)

    def test_ball_points_isotropic(self):
        d = 8
        rng = np.random.default_rng(1)
        pts = np.array([sample_unit_ball(d, rng) for _ in range(20_000)])
        evals = sample_covariance(pts).eigenvalues
        # uniform unit ball: covariance I / (d + 2)
        np.testing.assert_allclose(evals, 1.0 / (d + 2), rtol=0.2)

    def test_sqrt_map_of_ball_recovers_covariance(self):
        d = 3
        target = np.array([[4.0, 1.0, 0.0], [1.0, 2.0, 0.5], [0.0, 0.5, 1.0]])
        snap = CovarianceSnapshot.from_matrix(target)
        rng = np.random.default_rng(2)
        draws = np.array([snap.sqrt_map @ sample_unit_ball(d, rng) for _ in range(50_000)])
        emp = np.cov(draws, rowvar=False) * (d + 2)
        np.testing.assert_allclose(emp, target, rtol=0.05, atol=0.05 * 4)

    def test_eigen_consistency(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(6, 6))
        m = a @ a.T
        snap = CovarianceSnapshot.from_matrix(m)
        np.testing.assert_allclose(snap.sqrt_map @ snap.sqrt_map, m, rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(snap.axes @ snap.axes.T, m, rtol=1e-9, atol=1e-9)
        assert np.all(np.diff(snap.eigenvalues) <= 0)

    def test_eigenvalue_floor(self):
        snap = CovarianceSnapshot.from_matrix(np.diag([1.0, 0.0]))
        assert snap.eigenvalues[1] == pytest.approx(1e-12)

    def test_read_only(self):
        snap = sample_covariance(np.random.default_rng(0).normal(size=(10, 3)))
        with pytest.raises(ValueError):
            snap.matrix[0, 0] = 5.0

    def test_zero_matrix(self):
        with pytest.raises(RankDeficiencyError):
            CovarianceSnapshot.from_matrix(np.zeros((3, 3)))

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            sample_covariance([[1.0, 2.0]])


class TestGramSchmidt:
    def test_example(self):
        out = gram_schmidt([[1.0, 1.0], [1.0, 0.0]])
        s = np.sqrt(0.5)
        np.testing.assert_allclose(out, [[s, s], [s, -s]])

    def test_first_parallel(self):
        out = gram_schmidt([[3.0, 0.0, 4.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]])
        np.testing.assert_allclose(out[0], [0.6, 0.0, 0.8])

    def test_orthonormal_over_seeds(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            d = int(rng.integers(2, 30))
            q = gram_schmidt(rng.normal(size=(d, d)))
            np.testing.assert_allclose(q @ q.T, np.eye(d), atol=1e-10)

    def test_dependent(self):
        with pytest.raises(RankDeficiencyError):
            gram_schmidt([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])

    def test_zero_vector(self):
        with pytest.raises(RankDeficiencyError):
            gram_schmidt([[0.0, 0.0], [1.0, 0.0]])


class TestSphereBall:
    def test_unit_norm(self):
        rng = np.random.default_rng(0)
        for d in (1, 2, 7, 100):
            assert np.linalg.norm(sample_unit_sphere(d, rng)) == pytest.approx(1.0)

    def test_sphere_sign_balance(self):
        rng = np.random.default_rng(1)
        pos = sum(sample_unit_sphere(5, rng)[2] > 0 for _ in range(4000))
        assert stats.binomtest(pos, 4000, 0.5).pvalue > 0.001

    def test_sphere_coordinate_distribution(self):
        # one coordinate of a uniform direction in 3-d is uniform on [-1, 1]
        rng = np.random.default_rng(2)
        z = np.array([sample_unit_sphere(3, rng)[0] for _ in range(5000)])
        assert stats.kstest(z, stats.uniform(-1, 2).cdf).pvalue > 0.001

    def test_ball_radius_distribution(self):
        d = 6
        rng = np.random.default_rng(3)
        r = np.array([np.linalg.norm(sample_unit_ball(d, rng)) for _ in range(5000)])
        assert r.max() <= 1.0
        assert stats.kstest(r**d, "uniform").pvalue > 0.001
