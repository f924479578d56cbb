"""Eigendecomposition, embeddings, and diffusion distances."""

import numpy as np
import pytest
import scipy.linalg

import diffmap_nre as dn
from conftest import make_roll
from diffmap_nre.errors import ParameterError


def cloud_model(n=40, p=2, seed=0, alpha=0.5, k_max=None):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    sq = dn.pairwise_sq_dists(X)
    eps = float(np.median(sq[np.triu_indices(n, 1)]))
    graph = dn.build_graph(X, dn.KernelParams(epsilon=eps, alpha=alpha))
    model = dn.decompose(graph.Ms, graph.d_tilde, k_max or n - 1, graph.params)
    return X, graph, model


class TestDecompose:
    def test_two_state_chain_analytic(self):
        # Symmetric two-state chain: eigenvalues 1 and 1 - 2a.
        a = 0.3
        M = np.array([[1.0 - a, a], [a, 1.0 - a]])
        model = dn.decompose(M, np.ones(2), k_max=1)
        assert np.allclose(model.eigenvalues, [1.0, 1.0 - 2.0 * a], atol=1e-14)
        assert np.allclose(model.psi[:, 0], [1.0, 1.0], atol=1e-14)
        assert np.allclose(model.psi[:, 1], [1.0, -1.0], atol=1e-14)
        assert np.allclose(model.phi[:, 0], [0.5, 0.5], atol=1e-14)

    def test_eigenvalues_match_generic_solver(self):
        # Oracle: scipy.linalg.eig on the dense row-stochastic matrix.
        _, graph, model = cloud_model(n=40, seed=1)
        oracle = np.sort(np.real(scipy.linalg.eig(graph.M)[0]))
        assert np.allclose(np.sort(model.eigenvalues), oracle, atol=1e-9)

    def test_trivial_pair(self):
        _, graph, model = cloud_model(n=35, seed=2, k_max=6)
        assert model.eigenvalues[0] == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(model.psi[:, 0], 1.0, atol=1e-10)
        stationary = model.phi[:, 0]
        assert np.all(stationary > 0)
        assert stationary.sum() == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(stationary @ graph.M, stationary, atol=1e-10)
        # Modulus-sorted, trivial eigenvalue first.
        mods = np.abs(model.eigenvalues)
        assert np.all(np.diff(mods) <= 1e-12)

    def test_residuals_and_right_eigenvectors(self):
        _, graph, model = cloud_model(n=45, seed=3, k_max=8)
        for i in range(model.eigenvalues.shape[0]):
            psi = model.psi[:, i]
            res = np.linalg.norm(graph.M @ psi - model.eigenvalues[i] * psi)
            assert res / np.linalg.norm(psi) < 1e-8

    def test_biorthogonality(self):
        _, _, model = cloud_model(n=50, seed=4, k_max=10)
        gram = model.phi.T @ model.psi
        assert np.allclose(gram, np.eye(gram.shape[0]), atol=1e-8)

    def test_sign_convention(self):
        _, _, model = cloud_model(n=30, seed=5, k_max=6)
        peaks = np.argmax(np.abs(model.psi), axis=0)
        assert np.all(model.psi[peaks, np.arange(model.psi.shape[1])] > 0)

    def test_sparse_and_dense_paths_agree(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((120, 3))
        graph = dn.build_graph(X, dn.KernelParams(epsilon=3.0, n_neighbors=25))
        assert not isinstance(graph.Ms, np.ndarray)
        sparse_model = dn.decompose(graph.Ms, graph.d_tilde, 5)
        dense_model = dn.decompose(graph.Ms.toarray(), graph.d_tilde, 5)
        assert np.allclose(
            sparse_model.eigenvalues, dense_model.eigenvalues, atol=1e-9
        )
        assert np.allclose(sparse_model.psi, dense_model.psi, atol=1e-7)

    def test_validation(self):
        M = np.eye(3)
        with pytest.raises(ParameterError):
            dn.decompose(np.zeros((2, 3)), np.ones(2), 1)
        with pytest.raises(ParameterError):
            dn.decompose(M, np.ones(2), 1)
        with pytest.raises(ParameterError):
            dn.decompose(M, np.array([1.0, 0.0, 1.0]), 1)
        with pytest.raises(ParameterError):
            dn.decompose(M, np.ones(3), 0)
        with pytest.raises(ParameterError):
            dn.decompose(M, np.ones(3), 3)  # k_max + 1 > n

    def test_disconnected_graph_doubles_top_eigenvalue(self):
        rng = np.random.default_rng(7)
        X = np.vstack(
            [rng.standard_normal((15, 2)), rng.standard_normal((15, 2)) + 50.0]
        )
        with pytest.warns(UserWarning):
            model, _ = dn.fit_diffusion_map(
                X, dn.KernelParams(epsilon=1.0), k_max=3, allow_disconnected=True
            )
        assert model.eigenvalues[0] == pytest.approx(1.0, abs=1e-10)
        assert model.eigenvalues[1] == pytest.approx(1.0, abs=1e-10)


class TestEmbed:
    def test_time_zero_returns_raw_coordinates(self):
        _, _, model = cloud_model(n=30, seed=8, k_max=5)
        emb = dn.embed(model, 0, (1, 3))
        assert np.array_equal(emb.coords, model.psi[:, [1, 3]])
        assert emb.component_indices == (1, 3)
        assert emb.t == 0
        assert emb.source == "diffusion"

    def test_coordinates_are_scaled_eigenvectors(self):
        _, _, model = cloud_model(n=30, seed=9, k_max=5)
        emb = dn.embed(model, 3, (2,))
        expected = model.psi[:, 2] * model.eigenvalues[2] ** 3
        assert np.allclose(emb.coords[:, 0], expected, rtol=1e-15)

    def test_rejections(self):
        _, _, model = cloud_model(n=30, seed=10, k_max=5)
        with pytest.raises(ParameterError, match="constant"):
            dn.embed(model, 1, (0, 1))
        with pytest.raises(ParameterError, match="duplicates"):
            dn.embed(model, 1, (2, 2))
        with pytest.raises(ParameterError):
            dn.embed(model, -1, (1,))
        with pytest.raises(ParameterError):
            dn.embed(model, 1.5, (1,))
        with pytest.raises(ParameterError):
            dn.embed(model, 1, ())
        with pytest.raises(ParameterError, match="out of range"):
            dn.embed(model, 1, (99,))


class TestDiffusionDistance:
    def test_three_point_chain_by_hand(self):
        M = np.array([[0.5, 0.5, 0.0], [0.25, 0.5, 0.25], [0.0, 0.5, 0.5]])
        phi0 = np.array([0.25, 0.5, 0.25])
        # p(.|0) = (.5, .5, 0), p(.|2) = (0, .5, .5):
        # D^2 = .25/.25 + 0 + .25/.25 = 2; for the (0, 1) pair 0.5.
        assert dn.diffusion_distance(M, 1, 0, 2, phi0) == pytest.approx(2.0, abs=1e-14)
        assert dn.diffusion_distance(M, 1, 0, 1, phi0) == pytest.approx(0.5, abs=1e-14)
        assert dn.diffusion_distance(M, 1, 1, 1, phi0) == 0.0

    def test_identity_with_full_embedding(self):
        # With all n - 1 components the embedding distance matches the
        # diffusion distance exactly (up to numerical error).
        X, graph, model = cloud_model(n=120, p=3, seed=11)
        phi0 = model.phi[:, 0]
        rng = np.random.default_rng(12)
        comps = tuple(range(1, 120))
        for t in (1, 2, 3):
            emb = dn.embed(model, t, comps)
            for _ in range(10):
                i, j = rng.integers(0, 120, size=2)
                if i == j:
                    continue
                d2 = dn.diffusion_distance(graph.M, t, i, j, phi0)
                e2 = float(np.sum((emb.coords[i] - emb.coords[j]) ** 2))
                assert abs(d2 - e2) / d2 < 1e-6

    def test_validation(self):
        M = np.array([[0.5, 0.5], [0.5, 0.5]])
        phi0 = np.array([0.5, 0.5])
        with pytest.raises(ParameterError):
            dn.diffusion_distance(M, 0, 0, 1, phi0)
        with pytest.raises(ParameterError):
            dn.diffusion_distance(M, 1, 0, 5, phi0)
        with pytest.raises(ParameterError):
            dn.diffusion_distance(M, 1, 0, 1, np.array([0.9, 0.2]))


class TestSpectrumThreshold:
    def test_monotone_in_time(self, line_model):
        _, model = line_model
        counts = [dn.spectrum_threshold(model, 0.5, t) for t in (1, 4, 16, 64, 256)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))
        assert dn.spectrum_threshold(model, 0.5, 100000) == 1
        assert dn.spectrum_threshold(model, 1e-6, 1) == model.n_components

    def test_validation(self, line_model):
        _, model = line_model
        for bad in [0.0, 1.0, 1.2, -0.5]:
            with pytest.raises(ParameterError):
                dn.spectrum_threshold(model, bad, 1)
        with pytest.raises(ParameterError):
            dn.spectrum_threshold(model, 0.5, 0)
        with pytest.raises(ParameterError):
            dn.spectrum_threshold(model, 0.5, 1.5)

    def test_roll_reference_counts(self):
        # Frozen reference: full spectrum of the 2000-point noisy roll.
        data = dn.make_swiss_roll(
            dn.SwissRollParams(n=2000, noise_sigma=0.2, width=21.0, seed=0)
        )
        graph = dn.build_graph(data, dn.KernelParams(epsilon=5.0, alpha=0.5))
        model = dn.decompose(graph.Ms, graph.d_tilde, 1999, graph.params)
        assert dn.spectrum_threshold(model, 0.1, 1) == 288
        assert dn.spectrum_threshold(model, 0.1, 1000) == 1


class TestExportSpectrum:
    def test_header_and_columns(self, line_model):
        _, model = line_model
        header, columns = dn.export_spectrum(model, (1, 2, 10))
        assert header == [
            "index",
            "eigenvalue",
            "eigenvalue_pow_t1",
            "eigenvalue_pow_t2",
            "eigenvalue_pow_t10",
        ]
        assert np.array_equal(columns[0], np.arange(model.eigenvalues.shape[0]))
        assert np.array_equal(columns[1], model.eigenvalues)
        assert np.allclose(columns[4], model.eigenvalues**10, rtol=1e-15)
        with pytest.raises(ParameterError):
            dn.export_spectrum(model, (1, -2))


class TestEmbeddingCsv:
    def test_diffusion_header_with_intrinsic(self, tmp_path):
        data = dn.make_curve_1d("arc", 30)
        model, _ = dn.fit_diffusion_map(data, dn.KernelParams(epsilon=0.5), k_max=3)
        emb = dn.embed(model, 1, (1, 2))
        path = tmp_path / "emb.csv"
        dn.embedding_to_csv(emb, path, data=data)
        lines = path.read_text().splitlines()
        assert lines[0] == "psi_1,psi_2,intrinsic_arc_position"
        assert len(lines) == 31

    def test_pca_header(self, tmp_path):
        data = dn.make_curve_1d("arc", 30)
        pca = dn.pca_fit(data, 2)
        emb = dn.pca_transform(pca, data)
        path = tmp_path / "emb.csv"
        dn.embedding_to_csv(emb, path)
        assert path.read_text().splitlines()[0] == "pc_1,pc_2"

    def test_embedding_validation(self):
        with pytest.raises(ParameterError):
            dn.Embedding(np.zeros((4, 2)), (1,), 1, "diffusion")
        with pytest.raises(ParameterError):
            dn.Embedding(np.zeros((4, 2)), (1, 2), 1, "other")


class TestWideKernelLimit:
    def test_wide_kernel_converges_to_pca(self):
        # Once the bandwidth dwarfs the data diameter, the kernel sees only
        # the large-scale covariance structure and the leading diffusion
        # coordinates line up with the leading principal components.
        data = dn.standardize(make_roll(0))
        model, _ = dn.fit_diffusion_map(
            data, dn.KernelParams(epsilon=1000.0, alpha=0.5), k_max=2
        )
        scores = dn.pca_transform(dn.pca_fit(data, 2), data).coords
        corr1 = abs(np.corrcoef(model.psi[:, 1], scores[:, 0])[0, 1])
        corr2 = abs(np.corrcoef(model.psi[:, 2], scores[:, 1])[0, 1])
        assert corr1 > 0.99
        assert corr2 > 0.95
