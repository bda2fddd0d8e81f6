import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scalebench import scaling
from scalebench.classifiers import (
    train_gnb,
    train_knn,
    train_lda,
    train_perceptron,
    train_tree,
)
from tests.conftest import make_dataset


class TestKnn:
    def test_zero_distance_neighbour_wins(self):
        d = make_dataset([[0.0, 0.0], [5.0, 5.0]], [0, 1])
        model = train_knn(d, k=1)
        assert model.predict([[5.0, 5.0]])[0] == 1

    def test_unanimous_vote(self):
        X = [[i, 0.0] for i in range(5)] + [[i + 100.0, 0.0] for i in range(5)]
        d = make_dataset(X, [1] * 5 + [0] * 5)
        assert train_knn(d, k=5).predict([[2.0, 0.0]])[0] == 1

    def test_vote_tie_broken_by_summed_distance(self):
        # k=2: neighbour at distance 0.5 (class 0) and 1.0 (class 1)
        d = make_dataset([[0.5], [-1.0]], [0, 1])
        assert train_knn(d, k=2).predict([[0.0]])[0] == 0

    def test_vote_and_distance_tie_falls_to_lower_class(self):
        d = make_dataset([[1.0], [-1.0]], [1, 0])
        assert train_knn(d, k=2).predict([[0.0]])[0] == 0

    def test_neighbour_tie_at_kth_distance_prefers_lower_row(self):
        # three equidistant rows, k=2: rows 0 and 1 win by index
        d = make_dataset([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]], [1, 1, 0])
        assert train_knn(d, k=2).predict([[0.0, 0.0]])[0] == 1

    def test_rejects_bad_k(self):
        d = make_dataset([[0.0]], [1])
        with pytest.raises(ValueError):
            train_knn(d, k=2)

    @given(st.integers(-6, 6))
    @settings(max_examples=20, deadline=None)
    def test_invariant_under_power_of_two_scaling(self, exponent):
        rng = np.random.default_rng(31)
        X = rng.normal(size=(40, 3))
        y = (rng.random(40) < 0.4).astype(int)
        d = make_dataset(X, y)
        q = rng.normal(size=(15, 3))
        factor = 2.0**exponent
        d2 = make_dataset(X * factor, y)
        assert np.array_equal(
            train_knn(d, k=5).predict(q), train_knn(d2, k=5).predict(q * factor)
        )


class TestGnb:
    def _two_blobs(self, ratio=1):
        pts0 = [-1.0, 0.0, 1.0] * ratio
        pts1 = [9.0, 10.0, 11.0]
        X = [[v] for v in pts0 + pts1]
        y = [0] * len(pts0) + [1] * len(pts1)
        return make_dataset(X, y)

    def test_query_at_class_mean(self):
        assert train_gnb(self._two_blobs()).predict([[0.0]])[0] == 0

    def test_symmetry_midpoint_tie_goes_to_lower_class(self):
        assert train_gnb(self._two_blobs()).predict([[5.0]])[0] == 0

    def test_priors_shift_decision(self):
        # nine-to-one prior pulls the midpoint decision toward class 0
        model = train_gnb(self._two_blobs(ratio=9))
        assert model.predict([[5.0]])[0] == 0
        # evaluate the log posteriors numerically: class 0 must win on prior
        s0 = model.log_priors[0] - 0.5 * (
            np.log(2 * np.pi * model.variances[0, 0])
            + (5.0 - model.means[0, 0]) ** 2 / model.variances[0, 0]
        )
        s1 = model.log_priors[1] - 0.5 * (
            np.log(2 * np.pi * model.variances[1, 0])
            + (5.0 - model.means[1, 0]) ** 2 / model.variances[1, 0]
        )
        assert s0 > s1

    def test_finite_scores_on_constant_feature(self):
        d = make_dataset([[1.0, 5.0], [1.0, 6.0], [1.0, 1.0], [1.0, 2.0]], [1, 1, 0, 0])
        model = train_gnb(d)
        assert np.isfinite(model.variances).all()
        assert model.predict([[1.0, 5.5]])[0] == 1


class TestPerceptron:
    def test_linearly_separable_converges_to_zero_error(self):
        X = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] * 5
        y = [1 if a + b >= 1.5 else 0 for a, b in X]
        d = make_dataset(X, y)
        model = train_perceptron(d, seed=3)
        assert np.array_equal(model.predict(np.asarray(X)), y)

    def test_xor_stays_imperfect(self):
        X = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] * 5
        y = [int(a != b) for a, b in X]
        d = make_dataset(X, y)
        model = train_perceptron(d, seed=3)
        assert (model.predict(np.asarray(X)) != np.asarray(y)).sum() > 0

    def test_single_class_makes_no_updates(self):
        d = make_dataset([[3.0], [4.0], [5.0]], [1, 1, 1])
        model = train_perceptron(d, seed=0)
        assert np.all(model.weights == 0.0) and model.bias == 0.0
        assert model.predict([[123.0]])[0] == 1

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(17)
        X = rng.normal(size=(60, 4))
        y = (rng.random(60) < 0.5).astype(int)
        d = make_dataset(X, y)
        a = train_perceptron(d, seed=5)
        b = train_perceptron(d, seed=5)
        assert np.array_equal(a.weights, b.weights) and a.bias == b.bias

    def test_respects_max_iter(self):
        rng = np.random.default_rng(23)
        X = rng.normal(size=(50, 3))
        y = rng.integers(0, 2, 50)
        model = train_perceptron(make_dataset(X, y), max_iter=1, seed=0)
        assert model.n_epochs == 1


class TestTree:
    def test_pure_input_single_leaf(self):
        d = make_dataset([[0.0], [1.0], [2.0]], [1, 1, 1])
        model = train_tree(d)
        assert model.n_nodes == 1
        assert model.predict([[99.0]])[0] == 1

    def test_one_dimensional_split_at_midpoint(self):
        d = make_dataset([[0.0], [1.0], [2.0], [3.0]], [0, 0, 1, 1])
        model = train_tree(d)
        assert model.feature[0] == 0
        assert model.threshold[0] == 1.5
        assert np.array_equal(model.predict([[0.0], [1.0], [2.0], [3.0]]), [0, 0, 1, 1])

    def test_gini_gain_prefers_clean_split(self):
        # (5,5) parent gini is 0.5; the x<=1.5 split is pure and must win
        # over the noisier feature 1.
        X = [[i, i % 2] for i in range(4)]
        d = make_dataset(X, [0, 0, 1, 1])
        model = train_tree(d)
        assert model.feature[0] == 0

    def test_tie_breaks_to_lower_feature_index(self):
        # two identical features: both give the same gain everywhere
        X = [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]
        d = make_dataset(X, [0, 0, 1, 1])
        assert train_tree(d).feature[0] == 0

    def test_leaf_majority_tie_to_lower_class(self):
        # xor-like single point grid cannot split profitably at the leaf
        d = make_dataset([[0.0], [0.0]], [1, 0])
        model = train_tree(d)
        assert model.n_nodes == 1
        assert model.predict([[0.0]])[0] == 0

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=15, deadline=None)
    def test_affine_invariance_property(self, seed):
        rng = np.random.default_rng(seed)
        n, d = 60, 4
        X = rng.normal(size=(n, d))
        y = (X @ rng.normal(size=d) + 0.4 * rng.normal(size=n) > 0).astype(int)
        if y.min() == y.max():
            return
        queries = rng.normal(size=(25, d))
        base = train_tree(make_dataset(X, y)).predict(queries)
        scale = 10.0 ** rng.uniform(-3, 3, d)
        shift = rng.uniform(-100, 100, d)
        moved = train_tree(make_dataset(X * scale + shift, y)).predict(queries * scale + shift)
        assert np.array_equal(base, moved)

    def test_invariance_through_real_scalers(self, blob_dataset):
        d = blob_dataset
        rng = np.random.default_rng(0)
        queries = rng.normal(size=(30, d.n_features)) * np.array([1e-3, 1.0, 40.0, 1e3, 0.2])
        base = train_tree(d).predict(queries)
        for tag in ("SS", "MM", "MA", "RS", "MC", "PS"):
            f = scaling.fit(scaling.ScalerKind(tag), d.features)
            moved = make_dataset(scaling.transform(f, d.features), d.labels)
            assert np.array_equal(train_tree(moved).predict(scaling.transform(f, queries)), base)


class TestLda:
    def test_midpoint_epsilon_toward_class_one(self):
        rng = np.random.default_rng(11)
        X0 = rng.normal(0, 1, (50, 2))
        X1 = rng.normal(6, 1, (50, 2))
        d = make_dataset(np.vstack([X0, X1]), [0] * 50 + [1] * 50)
        model = train_lda(d)
        mid = (X0.mean(axis=0) + X1.mean(axis=0)) / 2
        direction = X1.mean(axis=0) - X0.mean(axis=0)
        assert model.predict([mid + 0.05 * direction])[0] == 1
        assert model.predict([mid - 0.05 * direction])[0] == 0

    def test_query_at_class_mean(self):
        rng = np.random.default_rng(13)
        X0 = rng.normal([0, 0], 1, (30, 2))
        X1 = rng.normal([4, 4], 1, (30, 2))
        d = make_dataset(np.vstack([X0, X1]), [0] * 30 + [1] * 30)
        model = train_lda(d)
        assert model.predict([X0.mean(axis=0)])[0] == 0
        assert model.predict([X1.mean(axis=0)])[0] == 1

    def test_boundary_direction_solves_pooled_system(self):
        # correlated 2-D fixture: the coefficient difference must solve
        # pooled_cov @ w = (mu1 - mu0)
        rng = np.random.default_rng(17)
        cov = np.array([[2.0, 1.2], [1.2, 1.5]])
        L = np.linalg.cholesky(cov)
        X0 = rng.normal(size=(200, 2)) @ L.T
        X1 = rng.normal(size=(200, 2)) @ L.T + np.array([3.0, 1.0])
        d = make_dataset(np.vstack([X0, X1]), [0] * 200 + [1] * 200)
        model = train_lda(d)
        mu0, mu1 = X0.mean(axis=0), X1.mean(axis=0)
        n = 400
        pooled = (
            (X0 - mu0).T @ (X0 - mu0) + (X1 - mu1).T @ (X1 - mu1)
        ) / (n - 2)
        ridge = 1e-6 * np.trace(pooled) / 2
        pooled[np.diag_indices(2)] += ridge
        expected = np.linalg.solve(pooled, mu1 - mu0)
        assert np.allclose(model.coefs[1] - model.coefs[0], expected, rtol=1e-10)

    def test_rejects_single_instance_class(self):
        d = make_dataset([[0.0, 1.0], [1.0, 0.0], [5.0, 5.0]], [0, 0, 1])
        with pytest.raises(ValueError, match="at least 2"):
            train_lda(d)

    def test_finite_on_constant_features(self):
        d = make_dataset([[1.0, 1.0]] * 4, [0, 0, 1, 1])
        model = train_lda(d)
        assert np.isfinite(model.coefs).all() and np.isfinite(model.intercepts).all()


class TestDeterminism:
    def test_all_models_deterministic_across_retraining(self, blob_dataset):
        d = blob_dataset
        rng = np.random.default_rng(1)
        q = rng.normal(size=(20, d.n_features))
        for train in (
            lambda: train_knn(d),
            lambda: train_gnb(d),
            lambda: train_perceptron(d, seed=9),
            lambda: train_tree(d),
            lambda: train_lda(d),
        ):
            assert np.array_equal(train().predict(q), train().predict(q))
