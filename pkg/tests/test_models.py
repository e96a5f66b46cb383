import math

import numpy as np
import pytest

from spud.models import (
    Seed,
    SparseModel,
    abs_moment,
    gen_dense_gaussian,
    gen_dense_rademacher,
    gen_sparse,
    synth_instance,
    truncate,
)


class TestSeed:
    def test_same_path_same_stream(self):
        a = Seed(42, (1, 2)).generator().random(100)
        b = Seed(42, (1, 2)).generator().random(100)
        assert np.array_equal(a, b)

    def test_derive_extends_path(self):
        s = Seed(7).derive(3).derive(1, 4)
        assert s.path == (3, 1, 4)
        assert str(s) == "7:3:1:4"

    def test_different_paths_differ(self):
        a = gen_dense_gaussian(50, 50, Seed(1, (0,)))
        b = gen_dense_gaussian(50, 50, Seed(1, (1,)))
        assert np.mean(a != b) > 0.99


class TestGenSparse:
    def test_theta_one_rademacher(self):
        X = gen_sparse(SparseModel(m=6, p=9, theta=1.0, law="rademacher", seed=Seed(0)))
        assert set(np.unique(X)) <= {-1.0, 1.0}

    def test_theta_zero(self):
        X = gen_sparse(SparseModel(m=5, p=7, theta=0.0, seed=Seed(0)))
        assert np.array_equal(X, np.zeros((5, 7)))

    def test_fill_fraction(self):
        # Bin(5e5, 0.1) puts the fill in [0.09, 0.11] except with prob < 1e-6
        X = gen_sparse(SparseModel(m=50, p=10_000, theta=0.1, seed=Seed(123)))
        fill = np.mean(X != 0)
        assert 0.09 <= fill <= 0.11

    def test_exact_k_column_counts(self):
        X = gen_sparse(SparseModel(m=9, p=40, law="gaussian", exact_k=3, seed=Seed(5)))
        assert np.array_equal((X != 0).sum(axis=0), np.full(40, 3))

    def test_determinism_bitwise(self):
        m = SparseModel(m=20, p=30, theta=0.3, law="gaussian", seed=Seed(9, (2,)))
        assert np.array_equal(gen_sparse(m), gen_sparse(m))

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            SparseModel(m=5, p=5, theta=1.5)
        with pytest.raises(ValueError):
            SparseModel(m=5, p=5, exact_k=6)
        with pytest.raises(ValueError):
            SparseModel(m=5, p=5, law="cauchy")


class TestDenseGaussian:
    def test_determinism(self):
        a = gen_dense_gaussian(10, 10, Seed(4))
        b = gen_dense_gaussian(10, 10, Seed(4))
        assert np.array_equal(a, b)

    def test_sample_mean(self):
        # 5 sigma for the mean of 1e4 standard normals is 0.05
        a = gen_dense_gaussian(100, 100, Seed(11))
        assert abs(a.mean()) < 0.05

    def test_rademacher_values(self):
        b = gen_dense_rademacher(8, 8, Seed(2))
        assert set(np.unique(b)) <= {-1.0, 1.0}


class TestTruncate:
    def test_large_tau_is_noop(self):
        m = np.array([[3.0, -1.0], [0.5, -4.0]])
        assert np.array_equal(truncate(m, 100.0), m)
        assert np.array_equal(truncate(m, np.inf), m)

    def test_tau_zero(self):
        m = np.array([[3.0, 0.0], [0.5, -4.0]])
        assert np.array_equal(truncate(m, 0.0), np.array([[0.0, 0.0], [0.0, 0.0]]))

    def test_hand_example(self):
        m = np.array([[3.0, -1.0], [0.5, -4.0]])
        assert np.array_equal(truncate(m, 1.0), np.array([[0.0, -1.0], [0.5, 0.0]]))

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((6, 6))
        once = truncate(m, 0.8)
        assert np.array_equal(truncate(once, 0.8), once)

    def test_negative_tau_rejected(self):
        with pytest.raises(ValueError):
            truncate(np.eye(2), -1.0)


class TestAbsMoment:
    def test_rademacher_exact(self):
        # |xi| = 1 always, so the empirical mean is exactly 1
        X = gen_sparse(SparseModel(m=100, p=1000, theta=1.0, law="rademacher", seed=Seed(8)))
        assert np.abs(X).mean() == 1.0
        assert abs_moment("rademacher") == 1.0

    def test_gaussian_monte_carlo(self):
        # E|xi| = sqrt(2/pi); sd(|xi|) ~ 0.6, 3 sigma at 1e5 samples ~ 0.006
        vals = gen_dense_gaussian(100, 1000, Seed(10))
        est = np.abs(vals).mean()
        expected = math.sqrt(2 / math.pi)
        assert abs(est - expected) < 3 * 0.603 / math.sqrt(vals.size)
        assert 0.1 <= est <= 1.0


def test_synth_instance_shapes_and_product():
    model = SparseModel(m=6, p=30, theta=0.3, law="gaussian")
    A, X, Y = synth_instance(8, 6, 30, model, Seed(3))
    assert A.shape == (8, 6) and X.shape == (6, 30) and Y.shape == (8, 30)
    assert np.allclose(Y, A @ X)
