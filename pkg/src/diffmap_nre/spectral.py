"""Spectral decomposition of the diffusion operator and embeddings.

Eigenpairs are computed on the symmetric conjugate ``Ms`` (stable,
orthogonal eigenbasis) and mapped back to the right and left
eigenvectors ``psi`` and ``phi`` of the row-stochastic matrix ``M``:

    psi_i = sqrt(sum(d_tilde)) * v_i / sqrt(d_tilde)
    phi_i = v_i * sqrt(d_tilde) / sqrt(sum(d_tilde))

With this scaling ``psi_0`` is the constant vector of ones, ``phi_0`` is
the stationary distribution (summing to one), the bases are
biorthogonal (``phi_i . psi_j = delta_ij``), and squared diffusion
distances equal squared Euclidean distances between embedding rows
``Psi_t = (lambda_1^t psi_1, ..., lambda_k^t psi_k)`` exactly.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .csvio import write_table
from .datasets import DataMatrix, INTRINSIC_PREFIX
from .errors import EigensolverError, ParameterError
from .graph import KernelParams, build_graph

__all__ = [
    "DiffusionModel",
    "Embedding",
    "decompose",
    "embed",
    "diffusion_distance",
    "spectrum_threshold",
    "export_spectrum",
    "fit_diffusion_map",
    "embedding_to_csv",
]

_DENSE_EIG_MAX_N = 2000
_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class DiffusionModel:
    """Leading eigenpairs of one diffusion operator.

    Attributes
    ----------
    eigenvalues : numpy.ndarray
        Shape ``(m,)``, ordered by decreasing modulus with the trivial
        eigenvalue 1 first; ties broken by signed value then by solver
        order.
    v : numpy.ndarray
        Shape ``(n, m)`` orthonormal eigenvectors of the symmetric
        conjugate ``Ms``.
    psi : numpy.ndarray
        Right eigenvectors of ``M`` (``psi[:, 0]`` is all ones).
    phi : numpy.ndarray
        Left eigenvectors of ``M`` (``phi[:, 0]`` is the stationary
        distribution, summing to 1).
    d_tilde : numpy.ndarray
        Row sums used for the conjugation.
    params : KernelParams or None
        Kernel parameters when built through :func:`fit_diffusion_map`.
    """

    eigenvalues: np.ndarray
    v: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    d_tilde: np.ndarray
    params: KernelParams = None

    @property
    def n_components(self):
        """Number of nontrivial components (eigenpairs beyond index 0)."""
        return self.eigenvalues.shape[0] - 1

    @property
    def negative_indices(self):
        """Indices of retained eigenvalues that are negative."""
        return tuple(int(i) for i in np.flatnonzero(self.eigenvalues < 0.0))


@dataclass(frozen=True)
class Embedding:
    """Coordinates of points in a reduced space.

    Attributes
    ----------
    coords : numpy.ndarray
        Shape ``(n, k)``.
    component_indices : tuple of int
        Which components each column corresponds to (1-based for
        diffusion embeddings, matching eigenpair indices).
    t : int
        Diffusion time used to scale the coordinates (0 for PCA).
    source : str
        Either ``"diffusion"`` or ``"pca"``.
    """

    coords: np.ndarray
    component_indices: tuple
    t: int
    source: str

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(
            self, "component_indices", tuple(int(i) for i in self.component_indices)
        )
        if coords.ndim != 2:
            raise ParameterError(f"coords must be 2-D, got shape {coords.shape}")
        if len(self.component_indices) != coords.shape[1]:
            raise ParameterError(
                f"{len(self.component_indices)} component indices for "
                f"{coords.shape[1]} columns"
            )
        if self.source not in ("diffusion", "pca"):
            raise ParameterError(f"source must be 'diffusion' or 'pca', got {self.source!r}")


def _eigendecompose_symmetric(Ms, m):
    """Leading ``m`` eigenpairs of a symmetric matrix by modulus."""
    n = Ms.shape[0]
    use_dense = n <= _DENSE_EIG_MAX_N and not sp.issparse(Ms)
    if sp.issparse(Ms) and m >= n - 1:
        Ms = Ms.toarray()
        use_dense = True
    if use_dense:
        w, V = scipy.linalg.eigh(np.asarray(Ms))
    else:
        v0 = np.random.default_rng(0).standard_normal(n)
        try:
            w, V = eigsh(Ms, k=m, which="LM", tol=1e-10, v0=v0)
        except ArpackNoConvergence as exc:
            raise EigensolverError(
                f"eigensolver converged only {len(exc.eigenvalues)} of {m} "
                f"requested eigenpairs"
            ) from exc
    order = np.lexsort((np.arange(len(w)), -w, -np.abs(w)))[:m]
    return w[order], V[:, order]


def decompose(Ms, d_tilde, k_max, params=None):
    """Compute the leading ``k_max + 1`` eigenpairs of a diffusion operator.

    Parameters
    ----------
    Ms : ndarray or sparse matrix
        Symmetric conjugate of the transition matrix.
    d_tilde : numpy.ndarray
        Positive row sums defining the conjugation.
    k_max : int
        Number of nontrivial eigenpairs to retain (``>= 1``); the trivial
        pair is always included on top of these.
    params : KernelParams, optional
        Recorded on the model for reporting.

    Returns
    -------
    DiffusionModel

    Raises
    ------
    EigensolverError
        On non-convergence or if any eigen-residual
        ``|Ms v - lambda v|`` exceeds 1e-8.
    """
    n = Ms.shape[0]
    if Ms.shape[0] != Ms.shape[1]:
        raise ParameterError(f"Ms must be square, got shape {Ms.shape}")
    d_tilde = np.asarray(d_tilde, dtype=float)
    if d_tilde.shape != (n,):
        raise ParameterError(f"d_tilde must have shape ({n},), got {d_tilde.shape}")
    if np.any(d_tilde <= 0):
        raise ParameterError("d_tilde must be strictly positive")
    k_max = int(k_max)
    if k_max < 1:
        raise ParameterError(f"k_max must be >= 1, got {k_max}")
    m = k_max + 1
    if m > n:
        raise ParameterError(f"k_max + 1 = {m} eigenpairs requested from {n} points")

    w, V = _eigendecompose_symmetric(Ms, m)

    residuals = np.linalg.norm((Ms @ V) - V * w, axis=0)
    if np.max(residuals) > _RESIDUAL_TOL:
        raise EigensolverError(
            "eigen-residuals exceed tolerance "
            f"{_RESIDUAL_TOL:g}: {residuals.tolist()}"
        )

    sqrt_d = np.sqrt(d_tilde)
    total = np.sqrt(d_tilde.sum())
    psi = total * (V / sqrt_d[:, None])
    phi = (V * sqrt_d[:, None]) / total

    # one sign convention for all three bases: largest-|psi| entry positive
    flip = psi[np.argmax(np.abs(psi), axis=0), np.arange(m)] < 0
    sign = np.where(flip, -1.0, 1.0)
    return DiffusionModel(
        eigenvalues=w,
        v=V * sign,
        psi=psi * sign,
        phi=phi * sign,
        d_tilde=d_tilde,
        params=params,
    )


def embed(model, t, components):
    """Diffusion map coordinates ``lambda_i^t * psi_i`` for chosen components.

    Parameters
    ----------
    model : DiffusionModel
    t : int
        Diffusion time, ``>= 0``.
    components : sequence of int
        Distinct component indices, each in ``[1, k_max]``.  Index 0 is
        rejected: ``psi_0`` is constant and carries no information.

    Returns
    -------
    Embedding
    """
    if not isinstance(t, (int, np.integer)):
        raise ParameterError(f"t must be an integer, got {t!r}")
    t = int(t)
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    comps = [int(c) for c in components]
    if len(comps) == 0:
        raise ParameterError("components must be nonempty")
    if len(set(comps)) != len(comps):
        raise ParameterError(f"components contain duplicates: {comps}")
    m = model.eigenvalues.shape[0]
    for c in comps:
        if c == 0:
            raise ParameterError(
                "component 0 is the constant eigenvector psi_0 and carries "
                "no information; components start at 1"
            )
        if not 1 <= c < m:
            raise ParameterError(
                f"component {c} out of range; model holds components 1..{m - 1}"
            )
    coords = model.psi[:, comps] * (model.eigenvalues[comps] ** t)
    return Embedding(coords=coords, component_indices=tuple(comps), t=t,
                     source="diffusion")


def diffusion_distance(M, t, i, j, phi0):
    """Squared diffusion distance between points ``i`` and ``j`` at time ``t``.

    Computes ``sum_y (p_t(y | i) - p_t(y | j))^2 / phi0(y)``, where
    ``p_t(. | i)`` is row ``i`` of ``M^t``, by repeated vector-matrix
    products (no matrix power is formed).

    Parameters
    ----------
    M : ndarray or sparse matrix
        Row-stochastic transition matrix.
    t : int
        Diffusion time, ``>= 1``.
    i, j : int
        Point indices.
    phi0 : numpy.ndarray
        Stationary distribution; strictly positive, summing to 1 within
        1e-8.

    Returns
    -------
    float
        The squared distance (0 when ``i == j``).
    """
    if not isinstance(t, (int, np.integer)) or int(t) < 1:
        raise ParameterError(f"t must be an integer >= 1, got {t!r}")
    n = M.shape[0]
    i, j = int(i), int(j)
    if not (0 <= i < n and 0 <= j < n):
        raise ParameterError(f"indices ({i}, {j}) out of range for {n} points")
    phi0 = np.asarray(phi0, dtype=float)
    if phi0.shape != (n,):
        raise ParameterError(f"phi0 must have shape ({n},), got {phi0.shape}")
    if np.any(phi0 <= 0) or abs(phi0.sum() - 1.0) > 1e-8:
        raise ParameterError("phi0 must be strictly positive and sum to 1")
    p = np.zeros(n)
    q = np.zeros(n)
    p[i] = 1.0
    q[j] = 1.0
    for _ in range(int(t)):
        p = p @ M
        q = q @ M
    if sp.issparse(M):
        p = np.asarray(p).ravel()
        q = np.asarray(q).ravel()
    diff = p - q
    return float(np.sum(diff * diff / phi0))


def spectrum_threshold(model, delta, t):
    """Number of components whose decay passes a relative threshold.

    Counts the largest ``s`` such that ``|lambda_l|^t > delta * |lambda_1|^t``
    for all ``l = 1..s``; with the spectrum sorted by modulus this is the
    number of nontrivial eigenvalues passing the test.

    Parameters
    ----------
    model : DiffusionModel
    delta : float
        Relative cutoff in ``(0, 1)``.
    t : int
        Diffusion time, ``>= 1``.
    """
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    if not isinstance(t, (int, np.integer)) or int(t) < 1:
        raise ParameterError(f"t must be an integer >= 1, got {t!r}")
    lam = np.abs(model.eigenvalues[1:])
    if lam.size == 0 or lam[0] == 0.0:
        return 0
    return int(np.sum(lam ** int(t) > delta * lam[0] ** int(t)))


def export_spectrum(model, t_list):
    """Tabulate eigenvalues and their powers for several diffusion times.

    Returns
    -------
    header : list of str
        ``["index", "eigenvalue", "eigenvalue_pow_t<t>", ...]``.
    columns : list of numpy.ndarray
        Matching columns, ready for :func:`diffmap_nre.csvio.write_table`.
    """
    t_list = [int(t) for t in t_list]
    if any(t < 0 for t in t_list):
        raise ParameterError(f"t values must be >= 0, got {t_list}")
    lam = model.eigenvalues
    header = ["index", "eigenvalue"] + [f"eigenvalue_pow_t{t}" for t in t_list]
    columns = [np.arange(lam.shape[0]), lam] + [lam ** t for t in t_list]
    return header, columns


def fit_diffusion_map(data, params, k_max, allow_disconnected=False):
    """Build the kernel graph and decompose it in one call.

    Returns
    -------
    (DiffusionModel, GraphMatrices)
    """
    graph = build_graph(data, params, allow_disconnected=allow_disconnected)
    model = decompose(graph.Ms, graph.d_tilde, k_max, params=params)
    return model, graph


def embedding_to_csv(embedding, path, data=None):
    """Write embedding coordinates to CSV.

    Columns are named ``psi_<i>`` for diffusion embeddings and ``pc_<i>``
    for PCA.  When ``data`` is given its intrinsic columns are appended
    with the ``intrinsic_`` prefix for downstream comparison.
    """
    prefix = "psi" if embedding.source == "diffusion" else "pc"
    header = [f"{prefix}_{i}" for i in embedding.component_indices]
    columns = [embedding.coords[:, k] for k in range(embedding.coords.shape[1])]
    if data is not None and isinstance(data, DataMatrix) and data.intrinsic is not None:
        if data.intrinsic.shape[0] != embedding.coords.shape[0]:
            raise ParameterError(
                "data and embedding hold different numbers of points"
            )
        for k, name in enumerate(data.intrinsic_names):
            header.append(INTRINSIC_PREFIX + name)
            columns.append(data.intrinsic[:, k])
    write_table(path, header, columns)
