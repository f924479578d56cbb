"""Kernel construction, sparsification, and Markov normalization."""

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.spatial.distance import cdist

import diffmap_nre as dn
from diffmap_nre.errors import (
    DisconnectedGraphError,
    IsolatedPointError,
    ParameterError,
)


def random_cloud(n=60, p=3, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, p))


class TestPairwiseAndKernel:
    def test_pairwise_against_cdist(self):
        X = random_cloud(40, 4, seed=1)
        sq = dn.pairwise_sq_dists(X)
        oracle = cdist(X, X, "sqeuclidean")
        assert np.allclose(sq, oracle, atol=1e-10)
        assert np.array_equal(sq, sq.T)
        assert np.all(np.diag(sq) == 0.0)
        assert np.all(sq >= 0.0)

    def test_kernel_convention(self):
        # Two points at distance 3 with epsilon = 9: exp(-9/9), i.e. the
        # bandwidth divides the squared distance with no extra factor.
        X = np.array([[0.0], [3.0]])
        K = dn.gaussian_kernel(dn.pairwise_sq_dists(X), 9.0)
        assert K[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-15)
        assert K[0, 0] == 1.0 and K[1, 1] == 1.0

    def test_kernel_bounds_and_monotonicity(self):
        sq = dn.pairwise_sq_dists(random_cloud(50, 3, seed=2))
        K = dn.gaussian_kernel(sq, 2.5)
        assert np.all(K > 0.0)
        assert np.all(K <= 1.0)
        assert np.array_equal(np.diag(K), np.ones(50))
        # Larger squared distance never gives a larger kernel value.
        flat_d = sq.ravel()
        flat_k = K.ravel()
        order = np.argsort(flat_d)
        assert np.all(np.diff(flat_k[order]) <= 1e-15)

    def test_kernel_epsilon_validation(self):
        sq = np.zeros((2, 2))
        for bad in [0.0, -1.0, np.nan, np.inf]:
            with pytest.raises(ParameterError):
                dn.gaussian_kernel(sq, bad)

    def test_scale_equals_duplication(self):
        # Appending m exact copies of a column multiplies its contribution
        # to squared distances by m + 1, the same as scaling it by
        # sqrt(m + 1).
        data = dn.make_swiss_roll(dn.SwissRollParams(n=40, noise_sigma=0.1, width=5.0, seed=3))
        m = 3
        dup = dn.duplicate_column(data, "y", m, noise_sigma=0.0)
        scaled = dn.scale_column(data, "y", np.sqrt(m + 1.0))
        assert np.allclose(
            dn.pairwise_sq_dists(dup.values),
            dn.pairwise_sq_dists(scaled.values),
            atol=1e-10,
        )


class TestKnnSparsify:
    def test_union_rule_is_exactly_symmetric(self):
        X = random_cloud(80, 3, seed=4)
        sq = dn.pairwise_sq_dists(X)
        K = dn.gaussian_kernel(sq, 1.0)
        out = dn.knn_sparsify(K, sq, 10)
        assert sp.issparse(out)
        assert (out != out.T).nnz == 0

    def test_self_edges_and_neighbor_counts(self):
        X = random_cloud(80, 3, seed=5)
        sq = dn.pairwise_sq_dists(X)
        K = dn.gaussian_kernel(sq, 1.0)
        out = dn.knn_sparsify(K, sq, 12).toarray()
        assert np.array_equal(np.diag(out), np.diag(K))
        # Every row keeps at least its own neighborhood (self included);
        # the union with reverse edges can only add entries.
        support = (out != 0.0).sum(axis=1)
        assert np.all(support >= 12)

    def test_kept_entries_match_kernel(self):
        X = random_cloud(40, 2, seed=6)
        sq = dn.pairwise_sq_dists(X)
        K = dn.gaussian_kernel(sq, 1.0)
        out = dn.knn_sparsify(K, sq, 5).toarray()
        kept = out != 0.0
        assert np.array_equal(out[kept], K[kept])

    def test_sparse_format_threshold(self):
        X = random_cloud(60, 2, seed=7)
        sq = dn.pairwise_sq_dists(X)
        K = dn.gaussian_kernel(sq, 1.0)
        # CSR only when the neighborhood is below a quarter of the points.
        assert sp.issparse(dn.knn_sparsify(K, sq, 14))
        assert isinstance(dn.knn_sparsify(K, sq, 15), np.ndarray)

    def test_full_neighborhood_is_identity(self):
        X = random_cloud(20, 2, seed=8)
        sq = dn.pairwise_sq_dists(X)
        K = dn.gaussian_kernel(sq, 1.0)
        out = dn.knn_sparsify(K, sq, 20)
        assert np.array_equal(out, K)

    def test_neighbor_validation(self):
        X = random_cloud(20, 2, seed=9)
        sq = dn.pairwise_sq_dists(X)
        K = dn.gaussian_kernel(sq, 1.0)
        for bad in [1, 0, 21]:
            with pytest.raises(ParameterError):
                dn.knn_sparsify(K, sq, bad)


class TestNormalization:
    def test_alpha_zero_returns_kernel(self):
        K = dn.gaussian_kernel(dn.pairwise_sq_dists(random_cloud(30)), 2.0)
        L = dn.anisotropic_normalize(K, 0.0)
        assert np.array_equal(L, K)
        assert L is not K

    def test_anisotropic_formula(self):
        K = dn.gaussian_kernel(dn.pairwise_sq_dists(random_cloud(30, seed=10)), 2.0)
        for alpha in [0.3, 0.5, 1.0]:
            L = dn.anisotropic_normalize(K, alpha)
            d = K.sum(axis=1)
            oracle = K / np.outer(d**alpha, d**alpha)
            assert np.allclose(L, oracle, rtol=1e-12)
            assert np.max(np.abs(L - L.T)) < 1e-15

    def test_alpha_validation(self):
        K = np.eye(3)
        for bad in [-0.1, 1.1]:
            with pytest.raises(ParameterError):
                dn.anisotropic_normalize(K, bad)

    def test_markov_normalize(self):
        K = dn.gaussian_kernel(dn.pairwise_sq_dists(random_cloud(30, seed=11)), 2.0)
        L = dn.anisotropic_normalize(K, 0.5)
        M, Ms, d_tilde = dn.markov_normalize(L)
        assert np.all(d_tilde > 0.0)
        assert np.allclose(M.sum(axis=1), 1.0, atol=1e-12)
        assert np.max(np.abs(Ms - Ms.T)) < 1e-15
        # Ms is the symmetric conjugate of M.
        s = np.sqrt(d_tilde)
        assert np.allclose(Ms, s[:, None] * M / s[None, :], rtol=1e-12)

    def test_isolated_point_errors(self):
        bad = np.array([[1.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 0.0]])
        with pytest.raises(IsolatedPointError) as exc:
            dn.anisotropic_normalize(bad, 0.5)
        assert exc.value.indices == (2,)
        with pytest.raises(IsolatedPointError):
            dn.markov_normalize(bad)


class TestBuildGraph:
    def test_invariants_dense(self):
        X = random_cloud(60, 3, seed=12)
        graph = dn.build_graph(X, dn.KernelParams(epsilon=2.0, alpha=0.5))
        assert graph.components == 1
        assert np.all(graph.d_tilde > 0.0)
        assert np.max(np.abs(graph.K - graph.K.T)) < 1e-10
        assert np.max(np.abs(graph.Ms - graph.Ms.T)) < 1e-10
        assert np.allclose(graph.M.sum(axis=1), 1.0, atol=1e-12)

    def test_invariants_sparse(self):
        X = random_cloud(120, 3, seed=13)
        graph = dn.build_graph(
            X, dn.KernelParams(epsilon=2.0, n_neighbors=15, alpha=1.0)
        )
        assert sp.issparse(graph.K)
        assert sp.issparse(graph.Ms)
        assert (graph.K != graph.K.T).nnz == 0
        gap = graph.Ms - graph.Ms.T
        assert np.max(np.abs(gap.toarray())) < 1e-10
        rows = np.asarray(graph.M.sum(axis=1)).ravel()
        assert np.allclose(rows, 1.0, atol=1e-12)
        assert np.all(graph.d_tilde > 0.0)

    def test_wide_kernel_is_nearly_flat(self):
        data = dn.make_swiss_roll(
            dn.SwissRollParams(n=500, noise_sigma=0.2, width=21.0, seed=0)
        )
        graph = dn.build_graph(dn.standardize(data), dn.KernelParams(epsilon=1000.0))
        assert graph.K.min() > 0.9

    def test_accepts_data_matrix(self):
        data = dn.make_curve_1d("arc", 30)
        graph = dn.build_graph(data, dn.KernelParams(epsilon=0.5))
        assert graph.K.shape == (30, 30)

    def test_disconnected_raises_then_warns(self):
        X = np.vstack(
            [random_cloud(15, 2, seed=14), random_cloud(15, 2, seed=15) + 100.0]
        )
        with pytest.raises(DisconnectedGraphError) as exc:
            dn.build_graph(X, dn.KernelParams(epsilon=0.5))
        assert exc.value.n_components == 2
        with pytest.warns(UserWarning, match="2 components"):
            graph = dn.build_graph(
                X, dn.KernelParams(epsilon=0.5), allow_disconnected=True
            )
        assert graph.components == 2

    def test_neighbor_count_exceeding_n(self):
        X = random_cloud(20, 2, seed=16)
        with pytest.raises(ParameterError):
            dn.build_graph(X, dn.KernelParams(epsilon=1.0, n_neighbors=21))

    def test_kernel_params_validation(self):
        with pytest.raises(ParameterError):
            dn.KernelParams(epsilon=0.0)
        with pytest.raises(ParameterError):
            dn.KernelParams(epsilon=1.0, n_neighbors=1)
        with pytest.raises(ParameterError):
            dn.KernelParams(epsilon=1.0, alpha=2.0)

    def test_connectivity_check(self):
        block = np.array(
            [
                [1.0, 0.7, 0.0, 0.0],
                [0.7, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.2],
                [0.0, 0.0, 0.2, 1.0],
            ]
        )
        assert dn.connectivity_check(block) == 2
        assert dn.connectivity_check(np.ones((4, 4))) == 1
