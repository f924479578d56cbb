"""Kernel graph construction and Markov normalization.

The pipeline is: squared pairwise distances -> Gaussian kernel
``K_ij = exp(-d_ij^2 / epsilon)`` -> optional k-nearest-neighbor
truncation -> density renormalization ``L = D^-alpha K D^-alpha`` ->
row-stochastic transition matrix ``M = Dt^-1 L`` together with its
symmetric conjugate ``Ms = Dt^-1/2 L Dt^-1/2``, where ``D`` and ``Dt``
hold the row sums of ``K`` and ``L`` respectively.

``M`` and ``Ms`` share eigenvalues; eigenvectors of ``M`` are recovered
from those of ``Ms`` in :mod:`diffmap_nre.spectral`.  Matrices are dense
``numpy`` arrays, switching to ``scipy.sparse`` CSR when a neighbor
count below ``n / 4`` makes truncation pay off.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist

from .datasets import DataMatrix
from .errors import DisconnectedGraphError, IsolatedPointError, ParameterError

__all__ = [
    "KernelParams",
    "GraphMatrices",
    "pairwise_sq_dists",
    "gaussian_kernel",
    "knn_sparsify",
    "anisotropic_normalize",
    "markov_normalize",
    "connectivity_check",
    "build_graph",
]


@dataclass(frozen=True)
class KernelParams:
    """Kernel bandwidth, neighborhood size and density normalization.

    Attributes
    ----------
    epsilon : float
        Gaussian bandwidth, ``> 0``.  The kernel is ``exp(-d^2 / epsilon)``
        (no factor of 2 in the denominator).
    n_neighbors : int or None
        Neighborhood size counted including the point itself, between 2
        and ``n``.  ``None`` keeps the full dense kernel.
    alpha : float
        Density renormalization exponent in ``[0, 1]``; 0 leaves the
        kernel untouched, 1 removes sampling-density effects.
    """

    epsilon: float
    n_neighbors: int = None
    alpha: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon <= 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")
        if self.n_neighbors is not None and int(self.n_neighbors) < 2:
            raise ParameterError(
                f"n_neighbors must be >= 2 or None, got {self.n_neighbors}"
            )
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must be in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class GraphMatrices:
    """All matrices produced while normalizing one kernel graph.

    Attributes
    ----------
    K : ndarray or sparse matrix
        Symmetric kernel after optional truncation, unit diagonal.
    L : ndarray or sparse matrix
        Density-renormalized kernel ``D^-alpha K D^-alpha``.
    M : ndarray or sparse matrix
        Row-stochastic transition matrix.
    Ms : ndarray or sparse matrix
        Symmetric conjugate of ``M``.
    d_tilde : numpy.ndarray
        Row sums of ``L``.
    components : int
        Number of connected components of the graph of ``K``.
    params : KernelParams or None
        Parameters used to build the graph, when built via
        :func:`build_graph`.
    """

    K: object
    L: object
    M: object
    Ms: object
    d_tilde: np.ndarray
    components: int
    params: KernelParams = None


def _as_values(data):
    if isinstance(data, DataMatrix):
        return data.values
    values = np.asarray(data, dtype=float)
    if values.ndim != 2:
        raise ParameterError(f"expected a 2-D array, got shape {values.shape}")
    return values


def pairwise_sq_dists(data):
    """Symmetric matrix of squared Euclidean distances.

    The diagonal is exactly zero and the matrix is exactly symmetric.
    """
    values = _as_values(data)
    d2 = cdist(values, values, metric="sqeuclidean")
    np.fill_diagonal(d2, 0.0)
    return d2


def gaussian_kernel(sq_dists, epsilon):
    """Elementwise ``exp(-d^2 / epsilon)``; unit diagonal for zero diagonal input."""
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    return np.exp(-np.asarray(sq_dists, dtype=float) / epsilon)


def knn_sparsify(kernel, sq_dists, n_neighbors):
    """Keep kernel entries only between mutual-or-one-sided nearest neighbors.

    An edge ``(i, j)`` survives if ``j`` is among the ``n_neighbors``
    closest points to ``i`` *or* vice versa (union rule), which keeps the
    matrix symmetric.  Each point always retains its self edge.  Distance
    ties are broken by index so the result is deterministic.

    Parameters
    ----------
    kernel : numpy.ndarray
        Dense symmetric kernel.
    sq_dists : numpy.ndarray
        Squared distances used for ranking neighbors.
    n_neighbors : int
        Neighborhood size counted including the point itself, in
        ``[2, n]``.

    Returns
    -------
    numpy.ndarray or scipy.sparse.csr_matrix
        CSR when ``n_neighbors < n / 4``, dense otherwise.
    """
    kernel = np.asarray(kernel, dtype=float)
    n = kernel.shape[0]
    n_neighbors = int(n_neighbors)
    if not 2 <= n_neighbors <= n:
        raise ParameterError(f"n_neighbors must be in [2, {n}], got {n_neighbors}")
    order = np.argsort(sq_dists, axis=1, kind="stable")[:, :n_neighbors]
    mask = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), n_neighbors)
    mask[rows, order.ravel()] = True
    np.fill_diagonal(mask, True)
    mask |= mask.T
    if n_neighbors < n / 4:
        return sp.csr_matrix(np.where(mask, kernel, 0.0))
    return np.where(mask, kernel, 0.0)


def _row_sums(matrix):
    if sp.issparse(matrix):
        return np.asarray(matrix.sum(axis=1)).ravel()
    return matrix.sum(axis=1)


def _check_no_zero_rows(row_sums):
    zero = np.flatnonzero(row_sums == 0.0)
    if zero.size:
        raise IsolatedPointError(zero)


def _symmetric_rescale(matrix, scale):
    """Return ``matrix_ij * scale_i * scale_j`` preserving exact symmetry."""
    if sp.issparse(matrix):
        coo = matrix.tocoo()
        data = coo.data * (scale[coo.row] * scale[coo.col])
        return sp.csr_matrix((data, (coo.row, coo.col)), shape=matrix.shape)
    return matrix * np.outer(scale, scale)


def anisotropic_normalize(kernel, alpha):
    """Density renormalization ``L = D^-alpha K D^-alpha``.

    ``D`` is the diagonal of row sums of the kernel.  ``alpha = 0``
    returns the kernel unchanged (bit-exact).

    Raises
    ------
    IsolatedPointError
        If any kernel row sums to zero, listing the offending indices.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must be in [0, 1], got {alpha}")
    d = _row_sums(kernel)
    _check_no_zero_rows(d)
    if alpha == 0.0:
        return kernel.copy()
    return _symmetric_rescale(kernel, d ** (-alpha))


def markov_normalize(L):
    """Row-stochastic matrix, symmetric conjugate, and row sums of ``L``.

    Returns
    -------
    M : ndarray or sparse matrix
        ``Dt^-1 L`` with rows summing to 1.
    Ms : ndarray or sparse matrix
        ``Dt^-1/2 L Dt^-1/2``, exactly symmetric, sharing eigenvalues
        with ``M``.
    d_tilde : numpy.ndarray
        Row sums of ``L``.

    Raises
    ------
    IsolatedPointError
        If any row of ``L`` sums to zero.
    """
    d_tilde = _row_sums(L)
    _check_no_zero_rows(d_tilde)
    inv_sqrt = 1.0 / np.sqrt(d_tilde)
    Ms = _symmetric_rescale(L, inv_sqrt)
    if sp.issparse(L):
        M = sp.diags(1.0 / d_tilde) @ L
        M = M.tocsr()
    else:
        M = L / d_tilde[:, None]
    return M, Ms, d_tilde


def connectivity_check(kernel):
    """Number of connected components of the graph with edges at nonzeros.

    Entries that underflowed to exactly zero carry no edge; the check is
    a breadth-first search over the symmetric nonzero structure.
    """
    adj = sp.csr_matrix(kernel) if not sp.issparse(kernel) else kernel.tocsr()
    n_components, _ = connected_components(adj, directed=False)
    return int(n_components)


def build_graph(data, params, allow_disconnected=False):
    """Run the full kernel pipeline on a dataset.

    Parameters
    ----------
    data : DataMatrix or ndarray
    params : KernelParams
    allow_disconnected : bool
        When True a disconnected graph only warns; the Markov matrix then
        has eigenvalue 1 with multiplicity equal to the component count.

    Returns
    -------
    GraphMatrices

    Raises
    ------
    DisconnectedGraphError
        If the graph has more than one component and
        ``allow_disconnected`` is False.
    """
    values = _as_values(data)
    n = values.shape[0]
    if params.n_neighbors is not None and int(params.n_neighbors) > n:
        raise ParameterError(
            f"n_neighbors={params.n_neighbors} exceeds the {n} available points"
        )
    sq = pairwise_sq_dists(values)
    K = gaussian_kernel(sq, params.epsilon)
    if params.n_neighbors is not None and int(params.n_neighbors) < n:
        K = knn_sparsify(K, sq, int(params.n_neighbors))
    components = connectivity_check(K)
    if components > 1:
        if not allow_disconnected:
            raise DisconnectedGraphError(components)
        warnings.warn(
            f"kernel graph has {components} components; eigenvalue 1 will "
            "have that multiplicity and the embedding is only meaningful "
            "per component",
            stacklevel=2,
        )
    L = anisotropic_normalize(K, params.alpha)
    M, Ms, d_tilde = markov_normalize(L)
    return GraphMatrices(K=K, L=L, M=M, Ms=Ms, d_tilde=d_tilde,
                         components=components, params=params)
